//! The finite mass-equality system of one assignment: for every pair of
//! cells in a contact group, the two depth-2 words holding the contact point
//! must carry equal mass.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::Result;
use crate::template::FractalTemplate;
use crate::wordspace::{mass, Assignment, MassDistribution, Word};

/// `Π m(i)^lhs[i] = Π m(i)^rhs[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialEquation {
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
    pub group: usize,
    pub left: Word,
    pub right: Word,
}

impl MonomialEquation {
    fn from_words(n: usize, group: usize, left: Word, right: Word) -> Self {
        let mut lhs = vec![0; n];
        let mut rhs = vec![0; n];
        for l in left.letters() {
            lhs[l] += 1;
        }
        for l in right.letters() {
            rhs[l] += 1;
        }
        MonomialEquation {
            lhs,
            rhs,
            group,
            left,
            right,
        }
    }

    /// Exponent difference `lhs - rhs`.
    pub fn difference(&self) -> Vec<i64> {
        self.lhs.iter().zip(&self.rhs).map(|(a, b)| a - b).collect()
    }

    pub fn is_degree_balanced(&self) -> bool {
        self.lhs.iter().sum::<i64>() == self.rhs.iter().sum::<i64>()
    }

    pub fn holds(&self, m: &MassDistribution) -> bool {
        mass(m, &self.left) == mass(m, &self.right)
    }

    /// `m(i)*m(x) = m(j)*m(y)`.
    pub fn render(&self, n: usize) -> String {
        let side = |w: &Word| {
            w.letters()
                .map(|l| Word::from_letters([l]).render(n))
                .map(|s| format!("m({s})"))
                .collect::<Vec<_>>()
                .join("*")
        };
        format!("{} = {}", side(&self.left), side(&self.right))
    }
}

/// Monomial equations plus the constraint `Σ m(a) = 1`, which is always
/// present and not stored explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationSystem {
    pub n: usize,
    pub monomials: Vec<MonomialEquation>,
}

impl EquationSystem {
    pub fn render(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.monomials.iter().map(|e| e.render(self.n)).collect();
        lines.push("sum = 1".to_string());
        lines
    }

    pub fn difference_matrix(&self) -> Vec<Vec<i64>> {
        self.monomials
            .iter()
            .map(MonomialEquation::difference)
            .collect()
    }
}

pub fn b2_system(template: &FractalTemplate, assignment: &Assignment) -> Result<EquationSystem> {
    let n = template.n();
    let mut monomials = Vec::with_capacity(template.equation_count());
    for (gi, group) in template.contact_groups.iter().enumerate() {
        let words = group
            .incidences
            .iter()
            .map(|inc| {
                let (x, _) = template.incidence_step(inc, assignment)?;
                Ok(Word::from_letters([inc.cell, x]))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..words.len() {
            for b in a + 1..words.len() {
                monomials.push(MonomialEquation::from_words(
                    n,
                    gi,
                    words[a].clone(),
                    words[b].clone(),
                ));
            }
        }
    }
    Ok(EquationSystem { n, monomials })
}

/// Every monomial equation and the sum constraint hold exactly.
pub fn satisfies(system: &EquationSystem, m: &MassDistribution) -> bool {
    m.len() == system.n
        && m.weights().iter().sum::<BigRational>().is_one()
        && system.monomials.iter().all(|e| e.holds(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::builtin_template;

    fn render(system: &EquationSystem) -> Vec<String> {
        system.render()
    }

    #[test]
    fn canonical_sg_equations() {
        let t = builtin_template("sg").unwrap();
        let s = b2_system(&t, &t.canonical_assignment()).unwrap();
        assert_eq!(
            render(&s),
            vec![
                "m(1)*m(2) = m(2)*m(1)",
                "m(1)*m(3) = m(3)*m(1)",
                "m(2)*m(3) = m(3)*m(2)",
                "sum = 1"
            ]
        );
        assert!(s.monomials.iter().all(MonomialEquation::is_degree_balanced));
    }

    #[test]
    fn flipped_third_cell_equations() {
        let t = builtin_template("sg").unwrap();
        let a = Assignment::parse(&t, "r0,r0,f1").unwrap();
        let s = b2_system(&t, &a).unwrap();
        assert_eq!(
            render(&s)[..3],
            [
                "m(1)*m(2) = m(2)*m(1)",
                "m(1)*m(3) = m(3)*m(2)",
                "m(2)*m(3) = m(3)*m(1)"
            ]
        );
        let good = MassDistribution::parse("2/5,2/5,1/5").unwrap();
        assert!(satisfies(&s, &good));
    }

    #[test]
    fn satisfaction_examples() {
        let t = builtin_template("sg").unwrap();
        let m = MassDistribution::parse("1/2,1/4,1/4").unwrap();
        let canon = b2_system(&t, &t.canonical_assignment()).unwrap();
        assert!(satisfies(&canon, &m));
        let rotated = b2_system(&t, &Assignment::parse(&t, "r0,r1,r2").unwrap()).unwrap();
        assert!(!satisfies(&rotated, &m));
        assert!(satisfies(&rotated, &MassDistribution::homogeneous(3)));
    }
}
