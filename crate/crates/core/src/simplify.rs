//! Rewrites an equation system into free equations, fixed-variable
//! definitions, and free variables: cancel common factors, take roots of
//! single-variable sides, drop duplicates, and substitute isolated
//! variables until nothing changes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::equations::EquationSystem;
use crate::error::{Error, Result};
pub use crate::expr::{Expr, Q};

/// `Σ coefficient · Π x^exponents`, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Vec<Q>, Q>,
}

impl Poly {
    /// `x_1 + … + x_n - 1`.
    pub fn affine_sum(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        for i in 0..n {
            let mut e = vec![Q::zero(); n];
            e[i] = Q::one();
            terms.insert(e, Q::one());
        }
        terms.insert(vec![Q::zero(); n], -Q::one());
        Poly { terms }
    }

    fn substitute(&self, var: usize, def: &[Q]) -> Poly {
        let mut terms: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[var];
            let mut e2 = e.clone();
            if !k.is_zero() {
                e2[var] = Q::zero();
                for (slot, d) in e2.iter_mut().zip(def) {
                    *slot += k * d;
                }
            }
            *terms.entry(e2).or_insert_with(Q::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    fn mentions(&self, var: usize) -> bool {
        self.terms.keys().any(|e| !e[var].is_zero())
    }

    /// The variable `x` and its coefficient when `c·x` is a term and `x`
    /// occurs in no other term.
    fn linear_coefficient(&self, var: usize) -> Option<Q> {
        let mut found = None;
        for (e, c) in &self.terms {
            if e[var].is_zero() {
                continue;
            }
            let alone = e
                .iter()
                .enumerate()
                .all(|(j, x)| if j == var { x.is_one() } else { x.is_zero() });
            if !alone || found.is_some() {
                return None;
            }
            found = Some(*c);
        }
        found
    }

    /// Solves `self = 0` for the linear variable `var`.
    fn solve_for(&self, var: usize, coefficient: Q) -> Expr {
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            if !e[var].is_zero() {
                continue;
            }
            let scale = -*c / coefficient;
            let mono = Expr::monomial(e);
            parts.push(match mono {
                Expr::Const(one) => Expr::Const(scale * one),
                m if scale.is_one() => m,
                m => Expr::Product(vec![Expr::Const(scale), m]),
            });
        }
        match parts.len() {
            0 => Expr::Const(Q::zero()),
            1 => parts.pop().unwrap(),
            _ => Expr::Sum(parts),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneralEquation {
    /// `Π x^lhs = Π x^rhs`.
    Monomial { lhs: Vec<Q>, rhs: Vec<Q> },
    /// `poly = 0`.
    Polynomial(Poly),
}

fn render_side(f: &mut fmt::Formatter<'_>, e: &[Q]) -> fmt::Result {
    let mono = Expr::monomial(e);
    write!(f, "{mono}")
}

impl fmt::Display for GeneralEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralEquation::Monomial { lhs, rhs } => {
                render_side(f, lhs)?;
                f.write_str(" = ")?;
                render_side(f, rhs)
            }
            GeneralEquation::Polynomial(p) => {
                let mut first = true;
                for (e, c) in p.terms.iter().rev() {
                    let neg = c.is_negative();
                    let mag = c.abs();
                    if first {
                        if neg {
                            f.write_str("-")?;
                        }
                    } else {
                        f.write_str(if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    let mono = Expr::monomial(e);
                    match mono {
                        Expr::Const(_) => write!(f, "{}", Expr::Const(mag))?,
                        m if mag.is_one() => write!(f, "{m}")?,
                        m => write!(f, "{}*{m}", Expr::Const(mag))?,
                    }
                }
                if first {
                    f.write_str("0")?;
                }
                f.write_str(" = 0")
            }
        }
    }
}

fn single_variable(e: &[Q]) -> Option<(usize, Q)> {
    let mut it = e.iter().enumerate().filter(|(_, x)| !x.is_zero());
    let (i, k) = it.next()?;
    if it.next().is_some() {
        None
    } else {
        Some((i, *k))
    }
}

fn first_variable(e: &[Q]) -> Option<usize> {
    e.iter().position(|x| !x.is_zero())
}

/// `(Π x^e)^{1/k}`.
pub fn take_root(exponents: &[Q], k: Q) -> Result<Vec<Q>> {
    if k.is_zero() {
        return Err(Error::DegenerateExponent(format!(
            "root of order 0 of {}",
            Expr::monomial(exponents)
        )));
    }
    Ok(exponents.iter().map(|e| e / k).collect())
}

impl GeneralEquation {
    pub fn monomial(lhs: Vec<Q>, rhs: Vec<Q>) -> Self {
        GeneralEquation::Monomial { lhs, rhs }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GeneralEquation::Monomial { lhs, rhs } => lhs == rhs,
            GeneralEquation::Polynomial(p) => p.terms.is_empty(),
        }
    }

    fn mentions(&self, var: usize) -> bool {
        match self {
            GeneralEquation::Monomial { lhs, rhs } => !lhs[var].is_zero() || !rhs[var].is_zero(),
            GeneralEquation::Polynomial(p) => p.mentions(var),
        }
    }

    /// Key under which two equations with the same solution set coincide:
    /// side swaps and positive rescaling of exponents are identified.
    fn dedupe_key(&self) -> (u8, Vec<Q>, Vec<(Vec<Q>, Q)>) {
        match self {
            GeneralEquation::Monomial { lhs, rhs } => {
                let diff: Vec<Q> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
                let lead = diff
                    .iter()
                    .find(|x| !x.is_zero())
                    .copied()
                    .unwrap_or_else(Q::one);
                (0, diff.iter().map(|x| x / lead).collect(), Vec::new())
            }
            GeneralEquation::Polynomial(p) => {
                let lead = p.terms.values().next().copied().unwrap_or_else(Q::one);
                (
                    1,
                    Vec::new(),
                    p.terms.iter().map(|(e, c)| (e.clone(), c / lead)).collect(),
                )
            }
        }
    }

    fn substitute(&self, var: usize, def: &[Q]) -> GeneralEquation {
        match self {
            GeneralEquation::Monomial { lhs, rhs } => {
                let sub = |side: &Vec<Q>| {
                    let k = side[var];
                    let mut out = side.clone();
                    if !k.is_zero() {
                        out[var] = Q::zero();
                        for (slot, d) in out.iter_mut().zip(def) {
                            *slot += k * d;
                        }
                    }
                    out
                };
                GeneralEquation::Monomial {
                    lhs: sub(lhs),
                    rhs: sub(rhs),
                }
            }
            GeneralEquation::Polynomial(p) => GeneralEquation::Polynomial(p.substitute(var, def)),
        }
    }
}

/// Cancels common factors: `m(a)^k m(b) = m(a)^l m(c)` becomes
/// `m(b) = m(a)^{l-k} m(c)`. Polynomials are divided by the largest
/// monomial dividing every term.
pub fn delete_factorial_variables(eq: &GeneralEquation) -> GeneralEquation {
    match eq {
        GeneralEquation::Monomial { lhs, rhs } => {
            let common: Vec<Q> = lhs.iter().zip(rhs).map(|(a, b)| *a.min(b)).collect();
            GeneralEquation::Monomial {
                lhs: lhs.iter().zip(&common).map(|(a, c)| a - c).collect(),
                rhs: rhs.iter().zip(&common).map(|(b, c)| b - c).collect(),
            }
        }
        GeneralEquation::Polynomial(p) => {
            let mut keys = p.terms.keys();
            let Some(first) = keys.next() else {
                return eq.clone();
            };
            let mut common = first.clone();
            for e in keys {
                for (c, x) in common.iter_mut().zip(e) {
                    *c = (*c).min(*x);
                }
            }
            if common.iter().all(Zero::is_zero) {
                return eq.clone();
            }
            let terms = p
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(&common).map(|(x, m)| x - m).collect(), *c))
                .collect();
            GeneralEquation::Polynomial(Poly { terms })
        }
    }
}

/// Normalises a single-variable side to exponent 1 by taking the root of
/// both sides, and puts that side on the left. With two single-variable
/// sides the lower variable index is kept on the left.
pub fn replace_polynomial_terms(eq: &GeneralEquation) -> Result<GeneralEquation> {
    let GeneralEquation::Monomial { lhs, rhs } = eq else {
        return Ok(eq.clone());
    };
    let l = single_variable(lhs);
    let r = single_variable(rhs);
    let left_first = match (l, r) {
        (Some((a, _)), Some((b, _))) => a <= b,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => {
            // no root to take; orient by lowest variable
            let a = first_variable(lhs).unwrap_or(usize::MAX);
            let b = first_variable(rhs).unwrap_or(usize::MAX);
            return Ok(if a <= b {
                eq.clone()
            } else {
                GeneralEquation::Monomial {
                    lhs: rhs.clone(),
                    rhs: lhs.clone(),
                }
            });
        }
    };
    let (single, other) = if left_first { (lhs, rhs) } else { (rhs, lhs) };
    let (_, k) = single_variable(single).expect("checked above");
    Ok(GeneralEquation::Monomial {
        lhs: take_root(single, k)?,
        rhs: take_root(other, k)?,
    })
}

fn rooted_by_swap(before: &GeneralEquation, after: &GeneralEquation) -> bool {
    match (before, after) {
        (
            GeneralEquation::Monomial { lhs, rhs },
            GeneralEquation::Monomial { lhs: l2, rhs: r2 },
        ) => lhs == r2 && rhs == l2,
        _ => false,
    }
}

/// Removes identities and duplicates (up to side swap and rescaling),
/// keeping first occurrences.
pub fn delete_double_equations(eqs: Vec<GeneralEquation>) -> Vec<GeneralEquation> {
    let mut seen = HashSet::new();
    eqs.into_iter()
        .filter(|e| !e.is_identity() && seen.insert(e.dedupe_key()))
        .collect()
}

/// How a fixed variable was determined, as recorded when it was fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixSource {
    /// `x = Π y^e` with `e` over all variables at fixing time.
    Monomial(Vec<Q>),
    /// Solved from the sum constraint.
    Affine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixEquation {
    pub variable: usize,
    /// In terms of free variables only.
    pub definition: Expr,
    pub source: FixSource,
}

#[derive(Clone, Debug, PartialEq)]
enum Definition {
    Monomial(Vec<Q>),
    Expr(Expr),
}

impl Definition {
    fn into_expr(self) -> Expr {
        match self {
            Definition::Monomial(e) => Expr::monomial(&e),
            Definition::Expr(e) => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplificationState {
    pub n: usize,
    pub free_equations: Vec<GeneralEquation>,
    pub fix_equations: Vec<FixEquation>,
    pub free_variables: Vec<usize>,
    pub fix_variables: Vec<usize>,
    pub trace: Vec<String>,
    pub iterations: usize,
}

impl SimplificationState {
    /// `M`, all equations.
    pub fn total_equations(&self) -> usize {
        self.free_equations.len() + self.fix_equations.len()
    }

    /// `M₁`, the equations left unsolved.
    pub fn free_equation_count(&self) -> usize {
        self.free_equations.len()
    }
}

struct Work {
    n: usize,
    eqs: Vec<GeneralEquation>,
    defs: Vec<(usize, Definition, FixSource)>,
    fixed: Vec<bool>,
    trace: Option<Vec<String>>,
}

impl Work {
    fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(line());
        }
    }

    fn rewrite(&mut self) -> Result<()> {
        let mut out = Vec::with_capacity(self.eqs.len());
        for eq in std::mem::take(&mut self.eqs) {
            let cancelled = delete_factorial_variables(&eq);
            if cancelled != eq {
                self.log(|| format!("cancel: {eq}  ->  {cancelled}"));
            }
            let rooted = replace_polynomial_terms(&cancelled)?;
            if rooted != cancelled && !rooted_by_swap(&cancelled, &rooted) {
                self.log(|| format!("root: {cancelled}  ->  {rooted}"));
            }
            out.push(rooted);
        }
        let before = out.len();
        let identities = out.iter().filter(|e| e.is_identity()).count();
        let kept = delete_double_equations(out);
        if kept.len() < before {
            self.log(|| {
                format!(
                    "dedupe: dropped {identities} identities and {} duplicates",
                    before - kept.len() - identities
                )
            });
        }
        self.eqs = kept;
        Ok(())
    }

    fn fix(&mut self, var: usize, def: Definition, source: FixSource) {
        self.fixed[var] = true;
        for (_, d, _) in self.defs.iter_mut() {
            match (&def, &mut *d) {
                (Definition::Monomial(e), Definition::Monomial(cur)) => {
                    let k = cur[var];
                    if !k.is_zero() {
                        cur[var] = Q::zero();
                        for (slot, x) in cur.iter_mut().zip(e) {
                            *slot += k * x;
                        }
                    }
                }
                (Definition::Monomial(e), Definition::Expr(cur)) => {
                    *cur = cur.substitute(var, &Expr::monomial(e));
                }
                (Definition::Expr(value), cur) => {
                    let expr = std::mem::replace(cur, Definition::Expr(Expr::Const(Q::zero())))
                        .into_expr();
                    *cur = Definition::Expr(expr.substitute(var, value));
                }
            }
        }
        self.defs.push((var, def, source));
    }

    fn substitute_variable(&mut self) -> bool {
        self.substitute_isolated() || self.solve_sum() || self.isolate_in_product()
    }

    fn eliminate(&mut self, k: usize, var: usize, def: Vec<Q>) {
        self.eqs.remove(k);
        for e in self.eqs.iter_mut() {
            *e = e.substitute(var, &def);
        }
        self.fix(
            var,
            Definition::Monomial(def.clone()),
            FixSource::Monomial(def),
        );
    }

    /// A monomial equation with a side that is exactly one variable.
    fn substitute_isolated(&mut self) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for (k, eq) in self.eqs.iter().enumerate() {
            if let GeneralEquation::Monomial { lhs, rhs } = eq {
                for side in [lhs, rhs] {
                    if let Some((v, e)) = single_variable(side) {
                        if e.is_one() && best.is_none_or(|(b, _)| v < b) {
                            best = Some((v, k));
                        }
                    }
                }
            }
        }
        let Some((var, k)) = best else {
            return false;
        };
        let GeneralEquation::Monomial { lhs, rhs } = &self.eqs[k] else {
            unreachable!()
        };
        let def = if single_variable(lhs) == Some((var, Q::one())) {
            rhs.clone()
        } else {
            lhs.clone()
        };
        self.log(|| format!("substitute: m{} := {}", var + 1, Expr::monomial(&def)));
        self.eliminate(k, var, def);
        true
    }

    /// The sum constraint, for a variable that occurs linearly in it and in
    /// no monomial equation.
    fn solve_sum(&mut self) -> bool {
        let Some(pk) = self
            .eqs
            .iter()
            .position(|e| matches!(e, GeneralEquation::Polynomial(_)))
        else {
            return false;
        };
        let GeneralEquation::Polynomial(poly) = &self.eqs[pk] else {
            unreachable!()
        };
        let candidate = (0..self.n).filter(|&v| !self.fixed[v]).find_map(|v| {
            let c = poly.linear_coefficient(v)?;
            let used = self
                .eqs
                .iter()
                .any(|e| matches!(e, GeneralEquation::Monomial { .. }) && e.mentions(v));
            (!used).then_some((v, c))
        });
        let Some((var, c)) = candidate else {
            return false;
        };
        let expr = poly.solve_for(var, c);
        self.log(|| format!("solve sum: m{} := {}", var + 1, expr));
        self.eqs.remove(pk);
        self.fix(var, Definition::Expr(expr), FixSource::Affine);
        true
    }

    /// Last resort when no side is a lone variable, e.g. `m1*m4 = m2*m3`:
    /// divide out the other factors of the first equation's lowest variable
    /// and take the root, giving `m1 = m2*m3*m4^-1`.
    fn isolate_in_product(&mut self) -> bool {
        let Some((k, var)) = self.eqs.iter().enumerate().find_map(|(k, e)| match e {
            GeneralEquation::Monomial { lhs, rhs } => {
                let v = lhs.iter().zip(rhs).position(|(a, b)| a != b)?;
                Some((k, v))
            }
            GeneralEquation::Polynomial(_) => None,
        }) else {
            return false;
        };
        let GeneralEquation::Monomial { lhs, rhs } = &self.eqs[k] else {
            unreachable!()
        };
        // lhs - rhs = 0 in log space; solve for `var`
        let diff: Vec<Q> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
        let coefficient = diff[var];
        let def: Vec<Q> = diff
            .iter()
            .enumerate()
            .map(|(j, d)| {
                if j == var {
                    Q::zero()
                } else {
                    -d / coefficient
                }
            })
            .collect();
        let eq = self.eqs[k].clone();
        self.log(|| {
            format!(
                "isolate: {eq}  ->  m{} := {}",
                var + 1,
                Expr::monomial(&def)
            )
        });
        self.eliminate(k, var, def);
        true
    }
}

/// Runs the rewrite rules and substitutions to a fixed point.
pub fn simplify_equations(system: &EquationSystem) -> Result<SimplificationState> {
    simplify_with_trace(system, false)
}

pub fn simplify_with_trace(system: &EquationSystem, trace: bool) -> Result<SimplificationState> {
    let n = system.n;
    let to_q = |v: &Vec<i64>| v.iter().map(|&x| Q::from(x)).collect::<Vec<Q>>();
    let mut eqs: Vec<GeneralEquation> = system
        .monomials
        .iter()
        .map(|m| GeneralEquation::monomial(to_q(&m.lhs), to_q(&m.rhs)))
        .collect();
    eqs.push(GeneralEquation::Polynomial(Poly::affine_sum(n)));
    let bound = n + eqs.len() + 1;
    let mut work = Work {
        n,
        eqs,
        defs: Vec::new(),
        fixed: vec![false; n],
        trace: trace.then(Vec::new),
    };
    let mut iterations = 0;
    loop {
        iterations += 1;
        assert!(iterations <= bound, "simplification did not terminate");
        work.rewrite()?;
        if !work.substitute_variable() {
            break;
        }
    }
    let fix_equations: Vec<FixEquation> = work
        .defs
        .into_iter()
        .map(|(variable, def, source)| FixEquation {
            variable,
            definition: def.into_expr(),
            source,
        })
        .collect();
    let mut fix_variables: Vec<usize> = fix_equations.iter().map(|f| f.variable).collect();
    fix_variables.sort_unstable();
    Ok(SimplificationState {
        n,
        free_equations: work.eqs,
        fix_equations,
        free_variables: (0..n).filter(|&v| !work.fixed[v]).collect(),
        fix_variables,
        trace: work.trace.unwrap_or_default(),
        iterations,
    })
}

/// One substitution step on a state; returns whether anything was fixed.
pub fn substitute_variable(state: &SimplificationState) -> (SimplificationState, bool) {
    let mut fixed = vec![false; state.n];
    for &v in &state.fix_variables {
        fixed[v] = true;
    }
    let mut work = Work {
        n: state.n,
        eqs: state.free_equations.clone(),
        defs: state
            .fix_equations
            .iter()
            .map(|f| {
                (
                    f.variable,
                    Definition::Expr(f.definition.clone()),
                    f.source.clone(),
                )
            })
            .collect(),
        fixed,
        trace: Some(Vec::new()),
    };
    let progress = work.substitute_variable();
    let mut next = state.clone();
    next.trace.extend(work.trace.take().unwrap_or_default());
    next.free_equations = work.eqs;
    next.fix_equations = work
        .defs
        .into_iter()
        .map(|(variable, def, source)| FixEquation {
            variable,
            definition: def.into_expr(),
            source,
        })
        .collect();
    next.fix_variables = next.fix_equations.iter().map(|f| f.variable).collect();
    next.fix_variables.sort_unstable();
    next.free_variables = (0..state.n).filter(|&v| !work.fixed[v]).collect();
    (next, progress)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::from(x)).collect()
    }

    fn mono(l: &[i64], r: &[i64]) -> GeneralEquation {
        GeneralEquation::monomial(q(l), q(r))
    }

    #[test]
    fn cancel_common_factors() {
        // m1^3 m2 = m1 m3  ->  m1^2 m2 = m3
        let e = delete_factorial_variables(&mono(&[3, 1, 0], &[1, 0, 1]));
        assert_eq!(e, mono(&[2, 1, 0], &[0, 0, 1]));
        let e = delete_factorial_variables(&mono(&[1, 0, 1], &[0, 1, 1]));
        assert_eq!(e.to_string(), "m1 = m2");
        assert!(delete_factorial_variables(&mono(&[1, 0], &[1, 0])).is_identity());
    }

    #[test]
    fn roots_of_single_variable_sides() {
        let e = replace_polynomial_terms(&mono(&[2, 0, 0], &[0, 1, 1])).unwrap();
        assert_eq!(e.to_string(), "m1 = m2^(1/2)*m3^(1/2)");
        let e = replace_polynomial_terms(&mono(&[0, 1, 2], &[3, 0, 0])).unwrap();
        assert_eq!(e.to_string(), "m1 = m2^(1/3)*m3^(2/3)");
        let same = mono(&[1, 0], &[0, 1]);
        assert_eq!(replace_polynomial_terms(&same).unwrap(), same);
        assert!(matches!(
            take_root(&q(&[1, 1]), Q::zero()),
            Err(Error::DegenerateExponent(_))
        ));
    }

    #[test]
    fn duplicates_and_identities_are_removed() {
        let e = mono(&[1, 1, 0, 0], &[0, 0, 1, 1]);
        let swapped = mono(&[0, 0, 1, 1], &[1, 1, 0, 0]);
        assert_eq!(delete_double_equations(vec![e.clone(), swapped]).len(), 1);
        assert!(delete_double_equations(vec![mono(&[1, 1], &[1, 1])]).is_empty());
        assert_eq!(
            delete_double_equations(vec![e.clone(), e.clone(), e]).len(),
            1
        );
    }

    #[test]
    fn affine_display() {
        let p = Poly::affine_sum(3);
        assert_eq!(
            GeneralEquation::Polynomial(p).to_string(),
            "m1 + m2 + m3 - 1 = 0"
        );
    }
}
