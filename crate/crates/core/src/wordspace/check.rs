//! Brute-force checks over all words up to a fixed depth.

use std::collections::HashSet;

use super::{equivalence_class, equivalent, mass, Assignment, MassDistribution, Word};
use crate::template::FractalTemplate;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Report {
    pub pass: bool,
    pub classes_checked: usize,
    /// First failing class, sorted.
    pub witness: Option<Vec<Word>>,
}

/// For every class `C` of words of length `2..=depth` with `|C| > 1`: the
/// masses agree across `C`, or the parents are pairwise equivalent.
pub fn check_b2_direct(
    template: &FractalTemplate,
    assignment: &Assignment,
    m: &MassDistribution,
    depth: usize,
) -> B2Report {
    let mut checked = 0;
    for len in 2..=depth {
        let mut done: HashSet<Word> = HashSet::new();
        for w in Word::all(template.n(), len) {
            if done.contains(&w) {
                continue;
            }
            let class = equivalence_class(template, assignment, &w);
            done.extend(class.iter().cloned());
            if class.len() < 2 {
                continue;
            }
            checked += 1;
            let m0 = mass(m, &class[0]);
            let equal_mass = class[1..].iter().all(|v| mass(m, v) == m0);
            let parents: Vec<Word> = class.iter().map(Word::parent).collect();
            let parents_equivalent = parents.iter().enumerate().all(|(k, p)| {
                parents[k + 1..]
                    .iter()
                    .all(|q| equivalent(template, assignment, p, q))
            });
            if !equal_mass && !parents_equivalent {
                return B2Report {
                    pass: false,
                    classes_checked: checked,
                    witness: Some(class),
                };
            }
        }
    }
    B2Report {
        pass: true,
        classes_checked: checked,
        witness: None,
    }
}

/// True iff the relation restricted to each word length `1..=depth` is
/// symmetric and transitive, i.e. every member of a class generates the
/// same class.
pub fn check_transitivity(
    template: &FractalTemplate,
    assignment: &Assignment,
    depth: usize,
) -> bool {
    for len in 1..=depth {
        for w in Word::all(template.n(), len) {
            let class = equivalence_class(template, assignment, &w);
            for v in &class {
                if v != &w && equivalence_class(template, assignment, v) != class {
                    return false;
                }
                if !equivalent(template, assignment, &w, v)
                    || !equivalent(template, assignment, v, &w)
                {
                    return false;
                }
            }
        }
    }
    true
}
