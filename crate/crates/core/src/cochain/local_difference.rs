//! Recovering `f` from prescribed differences `f(x) - f(y) = F(x, y)` on
//! a symmetric, reflexive relation `W` of sample points.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{solve_coboundary, CoboundarySolution, Cochain1, Convention};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};
use crate::nerve::Nerve;

/// `F` on the off-diagonal pairs of `W`, stored for `x < y`.
///
/// Self-pairs are implicit with `F(x, x) = 0`; a pair listed in one
/// orientation only is completed by antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDifferenceProblem {
    points: usize,
    eps: f64,
    values: BTreeMap<(usize, usize), f64>,
}

impl LocalDifferenceProblem {
    pub fn new(points: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>, eps: f64) -> Result<Self> {
        let mut values: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (x, y, f) in entries {
            if x >= points || y >= points {
                return Err(Error::input(format!("pair ({x}, {y}) refers to a point outside 0..{points}")));
            }
            if !f.is_finite() {
                return Err(Error::input(format!("F({x}, {y}) is not finite")));
            }
            if x == y {
                if f.abs() > eps {
                    return Err(Error::input(format!("F({x}, {x}) = {f}, but differences vanish on the diagonal")));
                }
                continue;
            }
            let (key, oriented) = if x < y { ((x, y), f) } else { ((y, x), -f) };
            match values.get(&key) {
                Some(&prev) if (prev - oriented).abs() > eps => {
                    return Err(Error::input(format!("F({x}, {y}) and F({y}, {x}) are not antisymmetric")));
                }
                Some(_) => {}
                None => {
                    values.insert(key, oriented);
                }
            }
        }
        Ok(LocalDifferenceProblem { points, eps, values })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `F(x, y)` when `(x, y) ∈ W`.
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        if x == y {
            return (x < self.points).then_some(0.0);
        }
        if x < y {
            self.values.get(&(x, y)).copied()
        } else {
            self.values.get(&(y, x)).map(|f| -f)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalDifferenceSolution {
    /// `f`, zero at the smallest point of each component.
    Solved(Vec<f64>),
    /// Closed walk whose `F`-sum is `sum ≠ 0`.
    Obstructed { cycle: Vec<usize>, sum: f64 },
}

/// Spanning-forest solve on the graph `(points, W)`.
pub fn solve_local_difference(problem: &LocalDifferenceProblem) -> Result<LocalDifferenceSolution> {
    let edges: Vec<[usize; 2]> = problem.values.keys().map(|&(x, y)| [x, y]).collect();
    let nerve = Arc::new(Nerve::from_simplices(problem.points, &edges, &[])?);
    let spec = GroupSpec::with_eps(crate::groups::GroupKind::R, problem.eps)?;
    // f(y) = f(x) - F(x, y), i.e. the coboundary of f is -F
    let values = problem.values.values().map(|&f| GroupElement::Real(-f)).collect();
    let r = Cochain1::new(nerve, spec, values)?;
    match solve_coboundary(&r, Convention::Abg)? {
        CoboundarySolution::Solved(t) => {
            Ok(LocalDifferenceSolution::Solved(t.values().iter().map(|g| g.as_real().expect("real")).collect()))
        }
        CoboundarySolution::Obstructed { cycle, .. } => {
            let sum = cycle.vertices.windows(2).map(|w| problem.get(w[0], w[1]).expect("edge of W")).sum();
            Ok(LocalDifferenceSolution::Obstructed { cycle: cycle.vertices, sum })
        }
    }
}
