//! Counting free parameters: a Jacobian test at the homogeneous point on the
//! simplified system, and an independent rank count on the raw exponent
//! matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::equations::EquationSystem;
use crate::expr::Q;
use crate::linalg::{det_q, kernel_basis, rank_i64};
use crate::simplify::{FixSource, GeneralEquation, SimplificationState};
use crate::wordspace::MassDistribution;

#[derive(Clone, Debug, PartialEq)]
pub struct JacobianReport {
    pub matrix: Vec<Vec<Q>>,
    pub determinant: BigRational,
    pub fixed_set: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Ift,
    IftSubsetSearch,
    RankOracleFallback,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Ift => "ift",
            SolveMethod::IftSubsetSearch => "ift-subset-search",
            SolveMethod::RankOracleFallback => "rank-oracle-fallback",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParameterResult {
    pub count: usize,
    pub method: SolveMethod,
    pub warning: bool,
}

/// Gradient rows at `(1/N, …, 1/N)`, one per equation, over all variables.
/// Every monomial side has degree-balanced exponents, so the common factor
/// `N^(1-d)` is dropped; it does not affect whether the determinant vanishes.
fn gradient_rows(state: &SimplificationState) -> Vec<Vec<Q>> {
    let n = state.n;
    let mut rows = Vec::with_capacity(state.total_equations());
    for fix in &state.fix_equations {
        rows.push(match &fix.source {
            FixSource::Monomial(e) => {
                let mut row: Vec<Q> = e.iter().map(|x| -x).collect();
                row[fix.variable] += Q::one();
                row
            }
            FixSource::Affine => vec![Q::one(); n],
        });
    }
    for eq in &state.free_equations {
        rows.push(match eq {
            GeneralEquation::Monomial { lhs, rhs } => {
                lhs.iter().zip(rhs).map(|(a, b)| a - b).collect()
            }
            GeneralEquation::Polynomial(_) => vec![Q::one(); n],
        });
    }
    rows
}

/// `∂F_i/∂y_j` at the homogeneous point for `y` ranging over `fixed_set`.
pub fn jacobian_at_hom(state: &SimplificationState, fixed_set: &[usize]) -> JacobianReport {
    let mut cols = fixed_set.to_vec();
    cols.sort_unstable();
    let matrix: Vec<Vec<Q>> = gradient_rows(state)
        .into_iter()
        .map(|row| cols.iter().map(|&c| row[c]).collect())
        .collect();
    let determinant = if matrix.iter().all(|r| r.len() == matrix.len()) {
        det_q(&matrix)
    } else {
        BigRational::zero()
    };
    JacobianReport {
        matrix,
        determinant,
        fixed_set: cols,
    }
}

/// Lexicographic `k`-subsets of `items`.
fn subsets(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = items.len();
    let mut idx: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let cur = idx.as_mut()?;
        let out: Vec<usize> = cur.iter().map(|&i| items[i]).collect();
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Free-parameter count from the simplified system. Falls back to the rank
/// count of `system` with `warning` set when no Jacobian certifies it.
pub fn free_parameters_ift(
    state: &SimplificationState,
    system: &EquationSystem,
) -> FreeParameterResult {
    let m1 = state.free_equation_count();
    if m1 == 0 {
        if !jacobian_at_hom(state, &state.fix_variables)
            .determinant
            .is_zero()
        {
            return FreeParameterResult {
                count: state.free_variables.len(),
                method: SolveMethod::Ift,
                warning: false,
            };
        }
    } else {
        for extra in subsets(&state.free_variables, m1) {
            let mut set = state.fix_variables.clone();
            set.extend(extra);
            if !jacobian_at_hom(state, &set).determinant.is_zero() {
                return FreeParameterResult {
                    count: state.n - state.total_equations(),
                    method: SolveMethod::IftSubsetSearch,
                    warning: false,
                };
            }
        }
    }
    log::warn!("no invertible Jacobian found; using rank count");
    FreeParameterResult {
        count: free_parameters_rank(system),
        method: SolveMethod::RankOracleFallback,
        warning: true,
    }
}

/// `N - 1 - rank(lhs - rhs)` over the raw monomial equations.
pub fn free_parameters_rank(system: &EquationSystem) -> usize {
    system.n - 1 - rank_i64(&system.difference_matrix())
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Integer directions spanning the log-linear solution set; the all-ones
/// direction lies in their span.
pub fn solution_directions(system: &EquationSystem) -> Vec<Vec<BigInt>> {
    kernel_basis(&system.difference_matrix(), system.n)
}

/// The exact solution `m ∝ Π_j b_j^{v_j}` for directions `v_j` and
/// positive bases `b_j`.
pub fn solution_from_bases(
    directions: &[Vec<BigInt>],
    bases: &[BigRational],
    n: usize,
) -> MassDistribution {
    let mut w = vec![BigRational::one(); n];
    for (v, b) in directions.iter().zip(bases) {
        for (slot, e) in w.iter_mut().zip(v) {
            let e: i32 = e.try_into().expect("exponent out of range");
            *slot *= b.pow(e);
        }
    }
    let total: BigRational = w.iter().sum();
    MassDistribution::new(w.into_iter().map(|x| x / &total).collect())
        .expect("normalised positive weights")
}

/// An exact solution using base `1/p_j` for the `j`-th direction. It is
/// inhomogeneous whenever the system has at least one free parameter.
pub fn sample_solution(system: &EquationSystem) -> MassDistribution {
    let dirs = solution_directions(system);
    assert!(dirs.len() <= PRIMES.len(), "too many solution directions");
    let bases: Vec<BigRational> = PRIMES[..dirs.len()]
        .iter()
        .map(|&p| BigRational::new(BigInt::one(), BigInt::from(p)))
        .collect();
    solution_from_bases(&dirs, &bases, system.n)
}
