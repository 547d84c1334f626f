//! Partitions of unity on ball covers and the pointwise solver for
//! real function-valued 1-cocycles.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cochain::Cochain1;
use crate::cover::{Cover, Provenance};
use crate::error::{Error, Result};
use crate::nerve::Nerve;

/// Tolerance for the pointwise cocycle identity on triple points.
pub const COCYCLE_EPS: f64 = 1e-9;

/// `weights[α][p] = η_α(p)`; zero off `U_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOfUnity {
    cover: Arc<Cover>,
    weights: Vec<Vec<f64>>,
}

impl PartitionOfUnity {
    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn weight(&self, alpha: usize, p: usize) -> f64 {
        self.weights[alpha][p]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Largest `|Σ_α η_α(p) - 1|` over all points.
    pub fn normalization_error(&self) -> f64 {
        let points = self.cover.space().len();
        (0..points)
            .map(|p| (self.weights.iter().map(|w| w[p]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Whether every positive weight sits inside its set.
    pub fn is_subordinate(&self) -> bool {
        self.weights
            .iter()
            .enumerate()
            .all(|(a, w)| w.iter().enumerate().all(|(p, &x)| (0.0..=1.0).contains(&x) && (x == 0.0 || self.cover.set(a).contains(p))))
    }
}

/// Normalised tent weights `max(0, 1 - d(p, c_α) / ρ_α)`.
pub fn partition_of_unity(cover: Arc<Cover>) -> Result<PartitionOfUnity> {
    let space = cover.space().clone();
    let mut weights = vec![vec![0.0; space.len()]; cover.len()];
    for (a, set) in cover.sets().iter().enumerate() {
        let Provenance::Ball { center, radius } = *set.provenance() else {
            return Err(Error::input(format!("set {a} is not a metric ball")));
        };
        for p in set.members() {
            weights[a][p] = (1.0 - space.distance(p, center)? / radius).max(0.0);
        }
    }
    for p in 0..space.len() {
        let total: f64 = weights.iter().map(|w| w[p]).sum();
        if total <= 0.0 {
            return Err(Error::input(format!("point {p} ({}) carries no weight", space.label(p))));
        }
        for w in weights.iter_mut() {
            w[p] /= total;
        }
    }
    Ok(PartitionOfUnity { cover, weights })
}

/// Real functions `r_ab` tabulated on `U_a ∩ U_b`, stored for `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionCochain1 {
    cover: Arc<Cover>,
    nerve: Arc<Nerve>,
    tables: Vec<BTreeMap<usize, f64>>,
}

fn intersection(cover: &Cover, a: usize, b: usize) -> Vec<usize> {
    cover.set(a).members().filter(|&p| cover.set(b).contains(p)).collect()
}

impl FunctionCochain1 {
    /// Tables listed per oriented edge. A reversed edge holds `-r`; edges
    /// listed in both orientations must agree. Unlisted edges are zero.
    pub fn new(
        cover: Arc<Cover>,
        nerve: Arc<Nerve>,
        entries: impl IntoIterator<Item = ((usize, usize), Vec<(usize, f64)>)>,
    ) -> Result<Self> {
        if nerve.vertex_count() != cover.len() {
            return Err(Error::input("nerve does not belong to this cover"));
        }
        let mut tables: Vec<Option<BTreeMap<usize, f64>>> = vec![None; nerve.edges().len()];
        for ((a, b), table) in entries {
            let (e, reversed) =
                nerve.edge_id(a, b).ok_or_else(|| Error::input(format!("({a}, {b}) is not an edge of the nerve")))?;
            let sign = if reversed { -1.0 } else { 1.0 };
            let mut oriented = BTreeMap::new();
            for (p, v) in table {
                if !v.is_finite() {
                    return Err(Error::input(format!("r_({a},{b})({p}) is not finite")));
                }
                if oriented.insert(p, sign * v).is_some() {
                    return Err(Error::input(format!("point {p} listed twice on edge ({a}, {b})")));
                }
            }
            let expected = intersection(&cover, a.min(b), a.max(b));
            if !oriented.keys().copied().eq(expected.iter().copied()) {
                return Err(Error::input(format!("table for ({a}, {b}) must list exactly the intersection points")));
            }
            match &tables[e] {
                Some(prev) => {
                    if prev.iter().any(|(p, v)| (v - oriented[p]).abs() > COCYCLE_EPS * (1.0 + v.abs())) {
                        return Err(Error::input(format!("r_({a},{b}) is not antisymmetric")));
                    }
                }
                None => tables[e] = Some(oriented),
            }
        }
        let tables = tables
            .into_iter()
            .zip(nerve.edges())
            .map(|(t, &[a, b])| t.unwrap_or_else(|| intersection(&cover, a, b).into_iter().map(|p| (p, 0.0)).collect()))
            .collect();
        Ok(FunctionCochain1 { cover, nerve, tables })
    }

    /// The constant functions `r_ab(p) = c_ab` of a real 1-cochain.
    pub fn from_constant(cover: Arc<Cover>, c: &Cochain1) -> Result<Self> {
        let nerve = c.nerve().clone();
        let entries = nerve
            .edges()
            .iter()
            .zip(c.values())
            .map(|(&[a, b], g)| {
                let v = g.as_real().ok_or_else(|| Error::input("constant cochain must be real-valued"))?;
                Ok(((a, b), intersection(&cover, a, b).into_iter().map(|p| (p, v)).collect()))
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionCochain1::new(cover, nerve, entries)
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    /// `r_ab(p)`, zero for `a = b`; `None` off the intersection.
    pub fn get(&self, a: usize, b: usize, p: usize) -> Option<f64> {
        if a == b {
            return self.cover.set(a).contains(p).then_some(0.0);
        }
        let (e, reversed) = self.nerve.edge_id(a, b)?;
        let v = *self.tables[e].get(&p)?;
        Some(if reversed { -v } else { v })
    }

    /// Checks `r_ab(p) + r_bc(p) + r_ca(p) = 0` on every triple point.
    pub fn validate_cocycle(&self) -> Result<()> {
        for p in 0..self.cover.space().len() {
            let sets = self.cover.sets_containing(p);
            for (i, &a) in sets.iter().enumerate() {
                for (j, &b) in sets.iter().enumerate().skip(i + 1) {
                    for &c in &sets[j + 1..] {
                        let get = |x, y| {
                            self.get(x, y, p).ok_or_else(|| Error::input(format!("({x}, {y}) missing at point {p}")))
                        };
                        let (ab, bc, ca) = (get(a, b)?, get(b, c)?, get(c, a)?);
                        let scale = 1.0 + ab.abs() + bc.abs() + ca.abs();
                        if (ab + bc + ca).abs() > COCYCLE_EPS * scale {
                            return Err(Error::input(format!(
                                "cocycle identity fails on sets ({a}, {b}, {c}) at point {p}: sum {}",
                                ab + bc + ca
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> FunctionCochainFile {
        FunctionCochainFile {
            edges: self
                .nerve
                .edges()
                .iter()
                .zip(&self.tables)
                .map(|(e, t)| EdgeTable {
                    simplex: e.to_vec(),
                    table: t.iter().map(|(&point, &value)| TableEntry { point, value }).collect(),
                })
                .collect(),
        }
    }
}

/// `t_α(p)` for `p ∈ U_α`, with `t_β - t_α = r_αβ` on overlaps.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPotentials {
    pub tables: Vec<BTreeMap<usize, f64>>,
}

impl LocalPotentials {
    /// `max |t_b(p) - t_a(p) - r_ab(p)|` over edges and intersection points.
    pub fn residual(&self, r: &FunctionCochain1) -> f64 {
        let mut worst: f64 = 0.0;
        for (&[a, b], table) in r.nerve.edges().iter().zip(&r.tables) {
            for (&p, &v) in table {
                worst = worst.max((self.tables[b][&p] - self.tables[a][&p] - v).abs());
            }
        }
        worst
    }
}

/// `t_α(p) = -Σ_γ r_αγ(p) η_γ(p)`, summing over sets containing `p`.
pub fn solve_function_cocycle(r: &FunctionCochain1, eta: &PartitionOfUnity) -> Result<LocalPotentials> {
    if !Arc::ptr_eq(&r.cover, &eta.cover) && r.cover != eta.cover {
        return Err(Error::input("cocycle and partition of unity use different covers"));
    }
    r.validate_cocycle()?;
    let cover = &r.cover;
    let mut tables = vec![BTreeMap::new(); cover.len()];
    for p in 0..cover.space().len() {
        let sets = cover.sets_containing(p);
        for &a in &sets {
            let t: f64 = sets
                .iter()
                .filter(|&&g| g != a)
                .map(|&g| r.get(a, g, p).expect("validated overlap") * eta.weight(g, p))
                .sum();
            tables[a].insert(p, -t);
        }
    }
    Ok(LocalPotentials { tables })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionCochainFile {
    pub edges: Vec<EdgeTable>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeTable {
    pub simplex: Vec<usize>,
    pub table: Vec<TableEntry>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub point: usize,
    pub value: f64,
}

impl FunctionCochainFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_cochain(self, cover: Arc<Cover>, nerve: Arc<Nerve>) -> Result<FunctionCochain1> {
        let entries = self
            .edges
            .into_iter()
            .map(|e| match e.simplex[..] {
                [a, b] => Ok(((a, b), e.table.into_iter().map(|t| (t.point, t.value)).collect())),
                _ => Err(Error::input(format!("edge simplex {:?} must have two vertices", e.simplex))),
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionCochain1::new(cover, nerve, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{solve_coboundary, Convention};
    use crate::cover::{CoverSet, SampleSpace};
    use crate::groups::{GroupElement, GroupSpec};
    use crate::nerve::build_nerve;

    fn line_cover() -> Arc<Cover> {
        let space = Arc::new(SampleSpace::from_coords((0..11).map(|i| vec![i as f64 / 10.0]).collect()).unwrap());
        let sets = vec![
            CoverSet::ball(&space, 0, 0.45).unwrap(),
            CoverSet::ball(&space, 5, 0.35).unwrap(),
            CoverSet::ball(&space, 10, 0.45).unwrap(),
        ];
        Arc::new(Cover::new(space, sets).unwrap())
    }

    #[test]
    fn single_ball_gives_constant_one() {
        let space = Arc::new(SampleSpace::from_coords((0..5).map(|i| vec![i as f64]).collect()).unwrap());
        let set = CoverSet::ball(&space, 2, 10.0).unwrap();
        let eta = partition_of_unity(Arc::new(Cover::new(space, vec![set]).unwrap())).unwrap();
        assert!(eta.weights()[0].iter().all(|&w| w == 1.0));
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let space = Arc::new(SampleSpace::from_coords(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap());
        let sets = vec![CoverSet::ball(&space, 0, 1.5).unwrap(), CoverSet::ball(&space, 2, 1.5).unwrap()];
        let eta = partition_of_unity(Arc::new(Cover::new(space, sets).unwrap())).unwrap();
        assert_eq!((eta.weight(0, 1), eta.weight(1, 1)), (0.5, 0.5));
        assert!(eta.is_subordinate());
    }

    #[test]
    fn uncovered_points_are_named() {
        let space = Arc::new(SampleSpace::from_coords(vec![vec![0.0], vec![5.0]]).unwrap());
        let sets = vec![CoverSet::ball(&space, 0, 1.0).unwrap()];
        let err = partition_of_unity(Arc::new(Cover::new(space, sets).unwrap())).unwrap_err();
        assert!(err.to_string().contains("point 1"));
    }

    #[test]
    fn explicit_sets_are_rejected() {
        let space = Arc::new(SampleSpace::abstract_points(2));
        let sets = vec![CoverSet::explicit(&space, [0, 1]).unwrap()];
        assert!(partition_of_unity(Arc::new(Cover::new(space, sets).unwrap())).is_err());
    }

    #[test]
    fn gradient_cocycle_is_solved() {
        let cover = line_cover();
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        let g = |a: usize, p: usize| (a as f64 + 1.0) * (p as f64).sin();
        let entries = nerve
            .edges()
            .iter()
            .map(|&[a, b]| ((a, b), intersection(&cover, a, b).into_iter().map(|p| (p, g(a, p) - g(b, p))).collect()))
            .collect::<Vec<_>>();
        let r = FunctionCochain1::new(cover.clone(), nerve, entries).unwrap();
        let eta = partition_of_unity(cover).unwrap();
        assert!(eta.normalization_error() <= 1e-12);
        let t = solve_function_cocycle(&r, &eta).unwrap();
        assert!(t.residual(&r) <= 1e-9);
    }

    #[test]
    fn zero_cocycle_gives_zero_potentials() {
        let cover = line_cover();
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        let r = FunctionCochain1::new(cover.clone(), nerve, []).unwrap();
        let t = solve_function_cocycle(&r, &partition_of_unity(cover).unwrap()).unwrap();
        assert!(t.tables.iter().flat_map(|m| m.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn constant_cocycle_agrees_with_coboundary_solver() {
        let cover = line_cover();
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        let c = Cochain1::new(nerve, GroupSpec::r(), vec![GroupElement::Real(1.5), GroupElement::Real(-0.25)]).unwrap();
        let r = FunctionCochain1::from_constant(cover.clone(), &c).unwrap();
        let t = solve_function_cocycle(&r, &partition_of_unity(cover.clone()).unwrap()).unwrap();
        let s = solve_coboundary(&c, Convention::Abg).unwrap();
        let s = s.solution().unwrap();
        for (&[a, b], _) in c.nerve().edges().iter().zip(c.values()) {
            let expected = s.get(b).as_real().unwrap() - s.get(a).as_real().unwrap();
            for p in intersection(&cover, a, b) {
                assert!((t.tables[b][&p] - t.tables[a][&p] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_shape_and_antisymmetry_are_checked() {
        let cover = line_cover();
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        let overlap = intersection(&cover, 0, 1);
        assert_eq!(overlap, vec![2, 3, 4]);
        assert!(FunctionCochain1::new(cover.clone(), nerve.clone(), [((0, 1), vec![(2, 1.0)])]).is_err());
        let full: Vec<(usize, f64)> = overlap.iter().map(|&p| (p, 1.0)).collect();
        assert!(FunctionCochain1::new(cover.clone(), nerve.clone(), [((0, 1), full.clone()), ((1, 0), full.clone())])
            .is_err());
        let neg: Vec<(usize, f64)> = overlap.iter().map(|&p| (p, -1.0)).collect();
        let r = FunctionCochain1::new(cover, nerve, [((0, 1), full), ((1, 0), neg)]).unwrap();
        assert_eq!(r.get(1, 0, overlap[0]), Some(-1.0));
    }
}
