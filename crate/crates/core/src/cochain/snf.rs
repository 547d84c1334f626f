//! Integer diagonalisation over arbitrary-precision integers.
//!
//! `U A V = D` with `U`, `V` unimodular and `D` diagonal. Only what a
//! caller needs is tracked: invariant factors need neither transform,
//! solving needs `V` and the transformed right-hand side, certificates
//! need `U`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::nerve::IntegerMatrix;

type Matrix = Vec<Vec<BigInt>>;

fn to_big(m: &IntegerMatrix) -> Matrix {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

struct Diagonal {
    /// Nonzero pivots `d_0 … d_{rank-1}` in elimination order (not a
    /// divisibility chain).
    pivots: Vec<BigInt>,
    u: Option<Matrix>,
    v: Option<Matrix>,
    rhs: Option<Vec<BigInt>>,
}

fn row_axpy(m: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    let (t, s) = if target < source {
        let (lo, hi) = m.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in t.iter_mut().zip(s) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(m: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[source].is_zero() {
            let delta = q * &row[source];
            row[target] -= delta;
        }
    }
}

fn col_swap(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn diagonalize(mut a: Matrix, cols: usize, track_u: bool, track_v: bool, rhs: Option<Vec<BigInt>>) -> Diagonal {
    let rows = a.len();
    let mut u = track_u.then(|| identity(rows));
    let mut v = track_v.then(|| identity(cols));
    let mut rhs = rhs;
    let mut pivots = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Diagonal { pivots, u, v, rhs };
            };
            if pi != t {
                a.swap(pi, t);
                if let Some(u) = u.as_mut() {
                    u.swap(pi, t);
                }
                if let Some(b) = rhs.as_mut() {
                    b.swap(pi, t);
                }
            }
            if pj != t {
                col_swap(&mut a, pj, t);
                if let Some(v) = v.as_mut() {
                    col_swap(v, pj, t);
                }
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                row_axpy(&mut a, i, t, &q);
                if let Some(u) = u.as_mut() {
                    row_axpy(u, i, t, &q);
                }
                if let Some(b) = rhs.as_mut() {
                    let delta = &q * &b[t];
                    b[i] -= delta;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                col_axpy(&mut a, j, t, &q);
                if let Some(v) = v.as_mut() {
                    col_axpy(v, j, t, &q);
                }
                clean &= a[t][j].is_zero();
            }
            if clean {
                pivots.push(p);
                break;
            }
        }
    }
    Diagonal { pivots, u, v, rhs }
}

/// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
pub fn invariant_factors(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = diagonalize(to_big(m), m.cols(), false, false, None)
        .pivots
        .into_iter()
        .map(|p| p.abs())
        .collect();
    // pairwise gcd/lcm turns any diagonal into the divisibility chain
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Rank over the rationals.
pub fn rank(m: &IntegerMatrix) -> usize {
    diagonalize(to_big(m), m.cols(), false, false, None).pivots.len()
}

/// Rank over `F_p` (or over `Z/p` for any modulus, counting units).
pub fn rank_mod(m: &IntegerMatrix, p: u64) -> usize {
    let p = BigInt::from(p);
    invariant_factors(m).iter().filter(|d| !(*d % &p).is_zero()).count()
}

/// Proof that `A x = b` has no integer solution: `yᵀA ≡ 0` and
/// `yᵀb ≢ 0` modulo `modulus` (`modulus = 0` means exact equality).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub functional: Vec<BigInt>,
    pub modulus: BigInt,
}

impl Certificate {
    /// Re-checks the certificate against the system.
    pub fn verify(&self, a: &IntegerMatrix, b: &[i64]) -> bool {
        let reduce = |x: BigInt| if self.modulus.is_zero() { x } else { x.mod_floor(&self.modulus) };
        let annihilates = (0..a.cols()).all(|c| {
            let s: BigInt = (0..a.rows()).map(|r| &self.functional[r] * a.get(r, c)).sum();
            reduce(s).is_zero()
        });
        let s: BigInt = self.functional.iter().zip(b).map(|(y, &v)| y * v).sum();
        annihilates && !reduce(s).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSolution {
    Solved(Vec<BigInt>),
    Unsolvable(Certificate),
}

/// Solves `A x = b` over `Z`.
pub fn solve_integer(a: &IntegerMatrix, b: &[i64]) -> IntegerSolution {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let rhs = b.iter().map(|&v| BigInt::from(v)).collect();
    let diag = diagonalize(to_big(a), a.cols(), true, true, Some(rhs));
    let (u, v, c) = (diag.u.expect("tracked"), diag.v.expect("tracked"), diag.rhs.expect("tracked"));
    let rank = diag.pivots.len();
    if let Some(i) = (rank..a.rows()).find(|&i| !c[i].is_zero()) {
        return IntegerSolution::Unsolvable(Certificate { functional: u[i].clone(), modulus: BigInt::zero() });
    }
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, d) in diag.pivots.iter().enumerate() {
        let (q, r) = c[i].div_mod_floor(d);
        if !r.is_zero() {
            return IntegerSolution::Unsolvable(Certificate { functional: u[i].clone(), modulus: d.abs() });
        }
        y[i] = q;
    }
    let x = v.iter().map(|row| row.iter().zip(&y).map(|(vij, yj)| vij * yj).sum()).collect();
    IntegerSolution::Solved(x)
}

/// Solves `A x ≡ b (mod k)`; solutions are reduced into `0..k`.
/// Certificates refer to the integer system `[A | kI] (x, s) = b`.
pub fn solve_mod(a: &IntegerMatrix, b: &[i64], k: u64) -> IntegerSolution {
    let k_i64 = i64::try_from(k).expect("modulus fits in i64");
    let mut wide = IntegerMatrix::zeros(a.rows(), a.cols() + a.rows());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            wide.set(r, c, a.get(r, c));
        }
        wide.set(r, a.cols() + r, k_i64);
    }
    match solve_integer(&wide, b) {
        IntegerSolution::Solved(x) => {
            let k = BigInt::from(k);
            IntegerSolution::Solved(x[..a.cols()].iter().map(|v| v.mod_floor(&k)).collect())
        }
        unsolvable => unsolvable,
    }
}
