//! The word equivalence relation, decided by descending contact points
//! symbolically through the assignment instead of intersecting cells.

use super::{Assignment, Word};
use crate::template::{FractalTemplate, Incidence};

fn trace(
    template: &FractalTemplate,
    assignment: &Assignment,
    inc: &Incidence,
    len: usize,
) -> Vec<usize> {
    template
        .trace_incidence(inc, assignment, len)
        .expect("descent is validated when the template is built")
}

fn suffix_matches(word: &Word, from: usize, letters: &[usize]) -> bool {
    letters
        .iter()
        .enumerate()
        .all(|(k, &l)| word.letter(from + k) == l)
}

/// `v ∼ w`: equal words, or equal-length words with different parents whose
/// cells share a contact point.
pub fn equivalent(template: &FractalTemplate, assignment: &Assignment, v: &Word, w: &Word) -> bool {
    if v.len() != w.len() {
        return false;
    }
    if v == w {
        return true;
    }
    let n = v.len();
    let split = v.common_prefix_len(w);
    if split + 1 >= n {
        return false;
    }
    let (i, j) = (v.letter(split), w.letter(split));
    let depth = n - split - 1;
    template.contact_groups.iter().any(|group| {
        group.incidences.iter().filter(|a| a.cell == i).any(|a| {
            suffix_matches(v, split + 1, &trace(template, assignment, a, depth))
                && group
                    .incidences
                    .iter()
                    .filter(|b| b.cell == j)
                    .any(|b| suffix_matches(w, split + 1, &trace(template, assignment, b, depth)))
        })
    })
}

/// All words equivalent to `w`, including `w`, sorted.
pub fn equivalence_class(
    template: &FractalTemplate,
    assignment: &Assignment,
    w: &Word,
) -> Vec<Word> {
    let n = w.len();
    let mut out = vec![w.clone()];
    for split in 0..n.saturating_sub(1) {
        let i = w.letter(split);
        let depth = n - split - 1;
        let prefix = w.restrict(split);
        for group in &template.contact_groups {
            for a in group.incidences.iter().filter(|a| a.cell == i) {
                if !suffix_matches(w, split + 1, &trace(template, assignment, a, depth)) {
                    continue;
                }
                for b in group.incidences.iter().filter(|b| b.cell != i) {
                    let tail = trace(template, assignment, b, depth);
                    let mut v = prefix.child(b.cell);
                    for l in tail {
                        v = v.child(l);
                    }
                    out.push(v);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::builtin_template;

    fn words(t: &FractalTemplate, s: &[&str]) -> Vec<Word> {
        s.iter().map(|w| Word::parse(w, t.n()).unwrap()).collect()
    }

    #[test]
    fn canonical_sg_pairs() {
        let t = builtin_template("sg").unwrap();
        let a = t.canonical_assignment();
        let w = words(&t, &["12", "21", "13", "31"]);
        assert!(equivalent(&t, &a, &w[0], &w[1]));
        assert!(!equivalent(&t, &a, &w[0], &w[2]));
        assert!(equivalent(&t, &a, &w[0], &w[0]));
        assert_eq!(equivalence_class(&t, &a, &w[0]), words(&t, &["12", "21"]));
    }

    #[test]
    fn single_letters_are_never_equivalent() {
        let t = builtin_template("sg3").unwrap();
        let a = t.canonical_assignment();
        for x in 0..t.n() {
            for y in 0..t.n() {
                let (v, w) = (Word::from_letters([x]), Word::from_letters([y]));
                assert_eq!(equivalent(&t, &a, &v, &w), x == y);
            }
        }
    }

    #[test]
    fn sg3_triple_point() {
        let t = builtin_template("sg3").unwrap();
        let a = t.canonical_assignment();
        let w = Word::parse("43", 6).unwrap();
        assert_eq!(
            equivalence_class(&t, &a, &w),
            words(&t, &["43", "52", "61"])
        );
    }

    #[test]
    fn unequal_lengths_are_not_equivalent() {
        let t = builtin_template("sg").unwrap();
        let a = t.canonical_assignment();
        let w = words(&t, &["12", "212"]);
        assert!(!equivalent(&t, &a, &w[0], &w[1]));
    }
}
