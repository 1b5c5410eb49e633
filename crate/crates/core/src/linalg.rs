//! Exact rank, determinant and kernel computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expr::Q;

/// Fraction-free elimination in place. Returns the pivot columns and the
/// sign of the row permutation.
fn bareiss(m: &mut [Vec<BigInt>]) -> (Vec<usize>, bool) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut negated = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            negated = !negated;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, negated)
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss(&mut m).0.len()
}

/// Scales each row to integers; returns the rows and the product of scales.
fn integer_rows(rows: &[Vec<Q>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let out = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(1i64, |acc, q| acc.lcm(q.denom()));
            scale *= BigInt::from(l);
            row.iter()
                .map(|q| BigInt::from(q.numer() * (l / q.denom())))
                .collect()
        })
        .collect();
    (out, scale)
}

pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let (mut m, _) = integer_rows(rows);
    bareiss(&mut m).0.len()
}

/// Determinant of a square matrix.
pub fn det_q(rows: &[Vec<Q>]) -> BigRational {
    let n = rows.len();
    assert!(
        rows.iter().all(|r| r.len() == n),
        "determinant of a non-square matrix"
    );
    if n == 0 {
        return BigRational::one();
    }
    let (mut m, scale) = integer_rows(rows);
    let (pivots, negated) = bareiss(&mut m);
    if pivots.len() < n {
        return BigRational::zero();
    }
    let d = if negated {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    };
    BigRational::new(d, scale)
}

/// Integer basis of `{v : A v = 0}`, one vector per non-pivot column.
pub fn kernel_basis(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<BigInt>> {
    // reduced row echelon form over the rationals
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &lead;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[row][f].clone();
            }
            let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            v.iter()
                .map(|q| (q * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Q::from(x)).collect())
            .collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_i64(&[vec![0, 0, 0]]), 0);
        assert_eq!(rank_i64(&[vec![1, -1, 0], vec![-1, 1, 0]]), 1);
        assert_eq!(
            rank_i64(&[vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]]),
            2
        );
        assert_eq!(rank_i64(&[]), 0);
    }

    #[test]
    fn determinants() {
        assert_eq!(
            det_q(&q(&[&[1, -1], &[1, 1]])),
            BigRational::from_integer(2.into())
        );
        assert_eq!(
            det_q(&q(&[&[0, 1], &[1, 0]])),
            BigRational::from_integer((-1).into())
        );
        assert_eq!(det_q(&q(&[&[1, 2], &[2, 4]])), BigRational::zero());
        let half = vec![
            vec![Q::new(1, 2), Q::from(0)],
            vec![Q::from(0), Q::new(2, 3)],
        ];
        assert_eq!(det_q(&half), BigRational::new(1.into(), 3.into()));
        let m = q(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(det_q(&m), BigRational::from_integer(6.into()));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = vec![vec![1, -1, 0, 0], vec![0, 2, -1, -1]];
        let k = kernel_basis(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &a {
                let s: BigInt = row.iter().zip(v).map(|(x, y)| BigInt::from(*x) * y).sum();
                assert!(s.is_zero());
            }
        }
    }
}
