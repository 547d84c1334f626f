//! First cohomology `ker δ₁ / im δ₀` of a nerve.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::snf::{invariant_factors, rank};
use crate::error::{Error, Result};
use crate::groups::{GroupKind, GroupSpec};
use crate::nerve::{IntegerMatrix, Nerve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Z,
    R,
    Zmod(u64),
}

impl Coefficients {
    /// `Sign` is read as `Z/2`; `T` and nonabelian groups are unsupported.
    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec.kind() {
            GroupKind::Z => Ok(Coefficients::Z),
            GroupKind::R => Ok(Coefficients::R),
            GroupKind::Zmod(n) => Ok(Coefficients::Zmod(n)),
            GroupKind::Sign => Ok(Coefficients::Zmod(2)),
            _ => Err(Error::unsupported(format!("H¹ with {} coefficients", spec.name()))),
        }
    }

    /// `z`, `r`, `zmod:n`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "z" => Ok(Coefficients::Z),
            "r" => Ok(Coefficients::R),
            other => match other.strip_prefix("zmod:").and_then(|n| n.parse::<u64>().ok()) {
                Some(n) if n >= 2 => Ok(Coefficients::Zmod(n)),
                _ => Err(Error::input(format!("unknown coefficients {text:?} (expected z, r or zmod:n)"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "coefficients")]
pub enum H1Description {
    #[serde(rename = "Z")]
    Integer { free_rank: usize, torsion: Vec<u64> },
    #[serde(rename = "R")]
    Real { dimension: usize },
    /// Cyclic orders of a decomposition `⊕ Z/q_i`.
    #[serde(rename = "Zmod")]
    Modular { n: u64, invariants: Vec<u64> },
}

impl H1Description {
    pub fn is_trivial(&self) -> bool {
        match self {
            H1Description::Integer { free_rank, torsion } => *free_rank == 0 && torsion.is_empty(),
            H1Description::Real { dimension } => *dimension == 0,
            H1Description::Modular { invariants, .. } => invariants.is_empty(),
        }
    }

    /// Number of elements, for finite groups.
    pub fn order(&self) -> Option<BigInt> {
        match self {
            H1Description::Modular { invariants, .. } => Some(invariants.iter().map(|&q| BigInt::from(q)).product()),
            H1Description::Integer { free_rank: 0, torsion } => Some(torsion.iter().map(|&q| BigInt::from(q)).product()),
            _ => None,
        }
    }
}

fn to_u64(d: &BigInt) -> Result<u64> {
    d.to_u64().ok_or_else(|| Error::consistency(format!("invariant factor {d} exceeds 64 bits")))
}

/// Coboundary matrices `(δ₀, δ₁)`; `δ₁` has no rows when the nerve holds
/// no triangles.
pub fn coboundary_matrices(nerve: &Nerve) -> Result<(IntegerMatrix, IntegerMatrix)> {
    let d0 = nerve.boundary_matrix(1)?.transpose();
    let d1 = if nerve.triangles().is_empty() {
        IntegerMatrix::zeros(0, nerve.edges().len())
    } else {
        nerve.boundary_matrix(2)?.transpose()
    };
    Ok((d0, d1))
}

/// Free rank over `Z` plus the invariant factors of `δ₀` and `δ₁` that
/// exceed one (the torsion of `C¹/im δ₀` and of `C²/im δ₁`).
pub fn h1(nerve: &Nerve, coefficients: Coefficients) -> Result<H1Description> {
    let (d0, d1) = coboundary_matrices(nerve)?;
    let free = nerve.edges().len() - rank(&d1) - rank(&d0);
    let torsion = |m: &IntegerMatrix| -> Vec<BigInt> { invariant_factors(m).into_iter().filter(|d| !d.is_one()).collect() };
    Ok(match coefficients {
        Coefficients::R => H1Description::Real { dimension: free },
        Coefficients::Z => {
            H1Description::Integer { free_rank: free, torsion: torsion(&d0).iter().map(to_u64).collect::<Result<_>>()? }
        }
        Coefficients::Zmod(n) => {
            // H¹ ⊗ Z/n  ⊕  Tor(H², Z/n)
            let nb = BigInt::from(n);
            let mut invariants = vec![n; free];
            for d in torsion(&d0).iter().chain(&torsion(&d1)) {
                let g = d.gcd(&nb);
                if !g.is_one() {
                    invariants.push(to_u64(&g)?);
                }
            }
            invariants.sort_unstable();
            H1Description::Modular { n, invariants }
        }
    })
}
