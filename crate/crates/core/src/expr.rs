//! Small expression trees for back-substituted variable definitions.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = Ratio<i64>;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Q),
    Var(usize),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Q),
}

impl Expr {
    /// `Π x_i^e_i`.
    pub fn monomial(exponents: &[Q]) -> Expr {
        let factors: Vec<Expr> = exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| {
                if e.is_one() {
                    Expr::Var(i)
                } else {
                    Expr::Pow(Box::new(Expr::Var(i)), *e)
                }
            })
            .collect();
        match factors.len() {
            0 => Expr::Const(Q::one()),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Product(factors),
        }
    }

    pub fn substitute(&self, var: usize, value: &Expr) -> Expr {
        match self {
            Expr::Var(v) if *v == var => value.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| t.substitute(var, value)).collect()),
            Expr::Product(fs) => {
                Expr::Product(fs.iter().map(|f| f.substitute(var, value)).collect())
            }
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.substitute(var, value)), *e),
        }
    }

    pub fn mentions(&self, var: usize) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Const(_) => false,
            Expr::Sum(ts) | Expr::Product(ts) => ts.iter().any(|t| t.mentions(var)),
            Expr::Pow(b, _) => b.mentions(var),
        }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => c.to_f64().unwrap_or(f64::NAN),
            Expr::Var(v) => values[*v],
            Expr::Sum(ts) => ts.iter().map(|t| t.eval(values)).sum(),
            Expr::Product(fs) => fs.iter().map(|f| f.eval(values)).product(),
            Expr::Pow(b, e) => b.eval(values).powf(e.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

fn write_q(f: &mut fmt::Formatter<'_>, q: &Q) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn atomic(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Const(c) => !c.is_negative(),
        _ => false,
    }
}

/// `-e` when `e` is visibly negative, for printing `a - b`.
fn negate_display(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut rest = fs.clone();
                if c == &-Q::one() {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::Const(-c);
                }
                Some(if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Product(rest)
                })
            }
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_q(f, c),
            Expr::Var(v) => write!(f, "m{}", v + 1),
            Expr::Sum(ts) => {
                for (k, t) in ts.iter().enumerate() {
                    let negated = if k > 0 { negate_display(t) } else { None };
                    let t = match &negated {
                        Some(n) => {
                            f.write_str(" - ")?;
                            n
                        }
                        None if k > 0 => {
                            f.write_str(" + ")?;
                            t
                        }
                        None => t,
                    };
                    match t {
                        Expr::Sum(_) => write!(f, "({t})")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
            Expr::Product(fs) => {
                for (k, x) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    if atomic(x) || matches!(x, Expr::Pow(..)) {
                        write!(f, "{x}")?;
                    } else {
                        write!(f, "({x})")?;
                    }
                }
                Ok(())
            }
            Expr::Pow(b, e) => {
                if atomic(b) {
                    write!(f, "{b}")?;
                } else {
                    write!(f, "({b})")?;
                }
                f.write_str("^")?;
                if e.is_integer() {
                    write_q(f, e)
                } else {
                    f.write_str("(")?;
                    write_q(f, e)?;
                    f.write_str(")")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_display_and_eval() {
        let e = Expr::monomial(&[Q::new(1, 2), Q::zero(), Q::new(1, 2)]);
        assert_eq!(e.to_string(), "m1^(1/2)*m3^(1/2)");
        assert!((e.eval(&[4.0, 0.0, 9.0]) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn substitution_replaces_every_occurrence() {
        let e = Expr::Sum(vec![
            Expr::Var(0),
            Expr::Product(vec![Expr::Const(Q::from(2)), Expr::Var(0)]),
        ]);
        let s = e.substitute(0, &Expr::Var(2));
        let d = Expr::Sum(vec![
            Expr::Const(Q::new(1, 2)),
            Expr::Product(vec![Expr::Const(Q::new(-1, 2)), Expr::Var(2)]),
        ]);
        assert_eq!(d.to_string(), "1/2 - 1/2*m3");
        assert!(!s.mentions(0));
        assert!((s.eval(&[0.0, 0.0, 1.5]) - 4.5).abs() < 1e-12);
    }
}
