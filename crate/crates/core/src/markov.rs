//! Exact Markov-chain kernels on the word space.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::template::FractalTemplate;
use crate::wordspace::{equivalence_class, equivalent, mass, Assignment, MassDistribution, Word};

/// Bundles the fixed inputs of every kernel evaluation.
#[derive(Clone, Copy)]
pub struct Chain<'a> {
    pub template: &'a FractalTemplate,
    pub assignment: &'a Assignment,
    pub mass: &'a MassDistribution,
}

impl<'a> Chain<'a> {
    pub fn new(
        template: &'a FractalTemplate,
        assignment: &'a Assignment,
        mass: &'a MassDistribution,
    ) -> Self {
        Chain {
            template,
            assignment,
            mass,
        }
    }

    fn class(&self, w: &Word) -> Vec<Word> {
        equivalence_class(self.template, self.assignment, w)
    }

    /// `m(w) / Σ_{v̂∼v} m(v̂)` when `w⁻ ∼ v`, else 0.
    pub fn transition(&self, v: &Word, w: &Word) -> BigRational {
        if w.len() != v.len() + 1 || !equivalent(self.template, self.assignment, &w.parent(), v) {
            return BigRational::zero();
        }
        let total: BigRational = self.class(v).iter().map(|u| mass(self.mass, u)).sum();
        mass(self.mass, w) / total
    }

    /// `p_n(v, w)`.
    pub fn n_step(&self, v: &Word, w: &Word, n: usize) -> BigRational {
        if n == 0 {
            return if v == w {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        if w.len() != v.len() + n {
            return BigRational::zero();
        }
        // p(u, w) vanishes unless u ∼ w⁻
        self.class(&w.parent())
            .iter()
            .map(|u| {
                let head = self.n_step(v, u, n - 1);
                if head.is_zero() {
                    head
                } else {
                    head * self.transition(u, w)
                }
            })
            .sum()
    }

    /// `g(v, w) = p_{|w|-|v|}(v, w)`.
    pub fn green(&self, v: &Word, w: &Word) -> BigRational {
        if w.len() < v.len() {
            return BigRational::zero();
        }
        self.n_step(v, w, w.len() - v.len())
    }

    /// `k(v, w) = g(v, w) / m(w)`.
    pub fn martin_kernel(&self, v: &Word, w: &Word) -> BigRational {
        self.green(v, w) / mass(self.mass, w)
    }
}

pub fn transition(
    template: &FractalTemplate,
    assignment: &Assignment,
    m: &MassDistribution,
    v: &Word,
    w: &Word,
) -> BigRational {
    Chain::new(template, assignment, m).transition(v, w)
}

pub fn n_step(
    template: &FractalTemplate,
    assignment: &Assignment,
    m: &MassDistribution,
    v: &Word,
    w: &Word,
    n: usize,
) -> BigRational {
    Chain::new(template, assignment, m).n_step(v, w, n)
}

pub fn green(
    template: &FractalTemplate,
    assignment: &Assignment,
    m: &MassDistribution,
    v: &Word,
    w: &Word,
) -> BigRational {
    Chain::new(template, assignment, m).green(v, w)
}

pub fn martin_kernel(
    template: &FractalTemplate,
    assignment: &Assignment,
    m: &MassDistribution,
    v: &Word,
    w: &Word,
) -> BigRational {
    Chain::new(template, assignment, m).martin_kernel(v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::builtin_template;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn homogeneous_sg_kernels() {
        let t = builtin_template("sg").unwrap();
        let a = t.canonical_assignment();
        let m = MassDistribution::homogeneous(3);
        let c = Chain::new(&t, &a, &m);
        let w = |s: &str| Word::parse(s, 3).unwrap();
        assert_eq!(c.transition(&w("1"), &w("12")), q(1, 3));
        assert_eq!(c.transition(&w("12"), &w("121")), q(1, 6));
        assert_eq!(c.transition(&Word::empty(), &Word::empty()), q(0, 1));
        assert_eq!(c.n_step(&w("12"), &w("12"), 0), q(1, 1));
        assert_eq!(c.n_step(&w("12"), &w("13"), 0), q(0, 1));
        assert_eq!(c.n_step(&Word::empty(), &w("12"), 2), q(1, 9));
        assert_eq!(c.green(&w("12"), &w("12")), q(1, 1));
        assert_eq!(c.green(&w("121"), &w("12")), q(0, 1));
        assert_eq!(c.martin_kernel(&w("1"), &w("12")), q(3, 1));
        assert_eq!(c.martin_kernel(&Word::empty(), &w("231")), q(1, 1));
        assert_eq!(c.martin_kernel(&w("23"), &w("23")), q(9, 1));
    }
}
