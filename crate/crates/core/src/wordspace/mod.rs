//! Words over the cell alphabet, assignments of one symmetry per cell, mass
//! distributions and the level-2 word space.

mod check;
mod trace;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use check::{check_b2_direct, check_transitivity, B2Report};
pub use trace::{equivalence_class, equivalent};

use crate::error::{Error, Result};
use crate::template::{FractalTemplate, SymId};

/// A word over `{1..N}`, stored with 0-based letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From 0-based letters.
    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Self {
        Word(letters.into_iter().map(|l| l as u8).collect())
    }

    /// Parses the printed form: digits when `n <= 9`, dot-separated otherwise.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Word::empty());
        }
        let parts: Vec<&str> = if n <= 9 {
            s.split("").filter(|p| !p.is_empty()).collect()
        } else {
            s.split('.').collect()
        };
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            let l: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter `{p}` in word `{s}`")))?;
            if l == 0 || l > n {
                return Err(Error::Parse(format!("letter {l} out of range 1..{n}")));
            }
            out.push((l - 1) as u8);
        }
        Ok(Word(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    /// `w⁻`; the parent of the empty word is empty.
    pub fn parent(&self) -> Word {
        let mut v = self.0.clone();
        v.pop();
        Word(v)
    }

    /// `w|_m`, the first `m` letters.
    pub fn restrict(&self, m: usize) -> Word {
        Word(self.0[..m.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn child(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter as u8);
        Word(v)
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn render(&self, n: usize) -> String {
        if self.0.is_empty() {
            return "∅".to_string();
        }
        let parts = self.0.iter().map(|&l| (l as usize + 1).to_string());
        if n <= 9 {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(".")
        }
    }

    /// All words of length `len` over `n` letters, in lexicographic order.
    pub fn all(n: usize, len: usize) -> impl Iterator<Item = Word> {
        let total = n.checked_pow(len as u32).expect("word count overflow");
        (0..total).map(move |mut idx| {
            let mut v = vec![0u8; len];
            for slot in v.iter_mut().rev() {
                *slot = (idx % n) as u8;
                idx /= n;
            }
            Word(v)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        f.write_str(&self.render(n))
    }
}

/// One symmetry element per cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    elements: Vec<SymId>,
}

impl Assignment {
    pub fn identity(template: &FractalTemplate) -> Self {
        Assignment {
            elements: vec![template.group.identity(); template.n()],
        }
    }

    pub fn new(template: &FractalTemplate, elements: Vec<SymId>) -> Result<Self> {
        if elements.len() != template.n() {
            return Err(Error::Parse(format!(
                "assignment has {} entries, template has {} cells",
                elements.len(),
                template.n()
            )));
        }
        if let Some(bad) = elements.iter().find(|&&g| g >= template.group.len()) {
            return Err(Error::Parse(format!("symmetry index {bad} out of range")));
        }
        Ok(Assignment { elements })
    }

    /// Parses `r0,r0,f1`-style text.
    pub fn parse(template: &FractalTemplate, text: &str) -> Result<Self> {
        let elements = text
            .split(',')
            .map(|tok| template.group.parse_code(tok))
            .collect::<Result<Vec<_>>>()?;
        Assignment::new(template, elements)
    }

    pub fn get(&self, cell: usize) -> SymId {
        self.elements[cell]
    }

    pub fn elements(&self) -> &[SymId] {
        &self.elements
    }

    pub fn encode(&self, template: &FractalTemplate) -> String {
        self.elements
            .iter()
            .map(|&g| template.group.element(g).code.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Positive weights per cell summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassDistribution {
    weights: Vec<BigRational>,
}

impl MassDistribution {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("empty weight list".into()));
        }
        for w in &weights {
            if !w.is_positive() || (weights.len() > 1 && *w >= BigRational::one()) {
                return Err(Error::InvalidParameter(format!("weight {w} not in (0,1)")));
            }
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(MassDistribution { weights })
    }

    pub fn homogeneous(n: usize) -> Self {
        let w = BigRational::new(BigInt::one(), BigInt::from(n));
        MassDistribution {
            weights: vec![w; n],
        }
    }

    /// Parses `p/q` fractions separated by commas.
    pub fn parse(text: &str) -> Result<Self> {
        let weights = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let (p, q) = tok
                    .split_once('/')
                    .ok_or_else(|| Error::Parse(format!("weight `{tok}` is not a fraction p/q")))?;
                let p: BigInt = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad numerator in `{tok}`")))?;
                let q: BigInt = q
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad denominator in `{tok}`")))?;
                if q.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in `{tok}`")));
                }
                Ok(BigRational::new(p, q))
            })
            .collect::<Result<Vec<_>>>()?;
        MassDistribution::new(weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, letter: usize) -> &BigRational {
        &self.weights[letter]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for MassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `m(w) = m(w_1)⋯m(w_n)`, with `m(∅) = 1`.
pub fn mass(m: &MassDistribution, w: &Word) -> BigRational {
    w.letters()
        .fold(BigRational::one(), |acc, l| acc * m.weight(l))
}

/// Row `i` lists the second letters of the sub-cells of cell `i` by
/// geometric slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordSpaceLevel2 {
    pub table: Vec<Vec<Word>>,
}

impl WordSpaceLevel2 {
    pub fn render(&self, n: usize) -> String {
        let rows: Vec<String> = self
            .table
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(|w| w.render(n)).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Entry `(i, s)` is `i · σ(g_i)⁻¹(s)`.
pub fn word_space(template: &FractalTemplate, assignment: &Assignment) -> WordSpaceLevel2 {
    let n = template.n();
    let group = &template.group;
    let table = (0..n)
        .map(|i| {
            let ginv = group.inv(assignment.get(i));
            (0..n)
                .map(|s| Word::from_letters([i, group.slot_action(ginv, s)]))
                .collect()
        })
        .collect();
    WordSpaceLevel2 { table }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::builtin_template;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn word_parse_render_roundtrip() {
        let w = Word::parse("121", 3).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.render(3), "121");
        assert_eq!(w.parent().render(3), "12");
        let big = Word::parse("12.3", 15).unwrap();
        assert_eq!(big.render(15), "12.3");
        assert!(Word::parse("14", 3).is_err());
        assert_eq!(Word::empty().render(3), "∅");
    }

    #[test]
    fn mass_examples() {
        let hom = MassDistribution::homogeneous(3);
        assert_eq!(mass(&hom, &Word::parse("12", 3).unwrap()), q(1, 9));
        let m = MassDistribution::parse("1/2,1/4,1/4").unwrap();
        assert_eq!(mass(&m, &Word::parse("121", 3).unwrap()), q(1, 16));
        assert_eq!(mass(&m, &Word::empty()), q(1, 1));
    }

    #[test]
    fn mass_rejects_bad_weights() {
        assert!(MassDistribution::parse("1/2,1/2,1/4").is_err());
        assert!(MassDistribution::parse("1/2,0.5").is_err());
        assert!(MassDistribution::parse("1/1,0/1").is_err());
    }

    #[test]
    fn canonical_word_space_rows() {
        for name in ["sg", "sg3", "vicsek"] {
            let t = builtin_template(name).unwrap();
            let ws = word_space(&t, &t.canonical_assignment());
            for (i, row) in ws.table.iter().enumerate() {
                let expect: Vec<Word> = (0..t.n()).map(|s| Word::from_letters([i, s])).collect();
                assert_eq!(row, &expect);
            }
        }
    }

    #[test]
    fn assignment_parse_encode() {
        let t = builtin_template("sg").unwrap();
        let a = Assignment::parse(&t, "r0, r2,f1").unwrap();
        assert_eq!(a.encode(&t), "r0,r2,f1");
        assert!(Assignment::parse(&t, "r0,r3,r0").is_err());
        assert!(Assignment::parse(&t, "r0,r0").is_err());
    }
}
