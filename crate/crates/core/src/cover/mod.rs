//! Finite sample spaces and the open covers defined over them.
//!
//! "Open" is modelled by strict-inequality membership: a ball keeps the
//! points with `d(p, center) < radius`, an interval the points with
//! `lo < x < hi`. Membership is a bitset over the point list, so order and
//! adjacency questions reduce to popcounts and disjointness tests.

mod generate;
mod io;

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

pub use generate::{
    brick_cover, brick_cover_with, circle_arcs, cover_from_complex, grid_unit_square,
    interval_cover, random_ball_cover, random_interval_cover, unit_interval_sample, BrickLayout,
    BrickParams,
};
pub use io::{CoverFile, MetricFile, SetFile, SpaceFile};

#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Euclidean,
    /// Symmetric, zero-diagonal, nonnegative distance table.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpace {
    labels: Vec<String>,
    coords: Option<Vec<Vec<f64>>>,
    metric: Metric,
}

impl SampleSpace {
    pub fn new(
        labels: Vec<String>,
        coords: Option<Vec<Vec<f64>>>,
        metric: Metric,
    ) -> Result<Self> {
        let n = labels.len();
        let mut seen = std::collections::HashSet::with_capacity(n);
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::input(format!("duplicate point identifier {label:?}")));
            }
        }
        if let Some(coords) = &coords {
            if coords.len() != n {
                return Err(Error::input(format!(
                    "{} coordinate tuples for {n} points",
                    coords.len()
                )));
            }
            if let Some(first) = coords.first() {
                let dim = first.len();
                if let Some((i, _)) = coords.iter().enumerate().find(|(_, c)| c.len() != dim) {
                    return Err(Error::input(format!(
                        "point {i} has a coordinate tuple of the wrong dimension"
                    )));
                }
            }
        }
        match &metric {
            Metric::Euclidean => {
                if coords.is_none() && n > 0 {
                    return Err(Error::input("euclidean metric requires coordinates"));
                }
            }
            Metric::Matrix(m) => {
                if m.len() != n || m.iter().any(|row| row.len() != n) {
                    return Err(Error::input(format!("distance matrix must be {n}x{n}")));
                }
                for i in 0..n {
                    if m[i][i] != 0.0 {
                        return Err(Error::input(format!("distance matrix diagonal at {i} is nonzero")));
                    }
                    for j in 0..n {
                        let d = m[i][j];
                        if !(d >= 0.0) || !d.is_finite() {
                            return Err(Error::input(format!("invalid distance at ({i},{j})")));
                        }
                        if d != m[j][i] {
                            return Err(Error::input(format!("distance matrix asymmetric at ({i},{j})")));
                        }
                    }
                }
            }
        }
        Ok(SampleSpace { labels, coords, metric })
    }

    /// Euclidean space over the given coordinates, labelled `p0, p1, ...`.
    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..coords.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, Some(coords), Metric::Euclidean)
    }

    /// Points without geometry; only explicit covers make sense over it.
    pub fn abstract_points(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        SampleSpace { labels, coords: None, metric: Metric::Matrix(vec![vec![0.0; n]; n]) }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, point: usize) -> &str {
        &self.labels[point]
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        match &self.metric {
            Metric::Matrix(m) => Ok(m[a][b]),
            Metric::Euclidean => {
                let coords = self
                    .coords
                    .as_ref()
                    .ok_or_else(|| Error::input("euclidean metric requires coordinates"))?;
                Ok(coords[a]
                    .iter()
                    .zip(&coords[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt())
            }
        }
    }

    fn check_point(&self, p: usize) -> Result<()> {
        if p < self.len() {
            Ok(())
        } else {
            Err(Error::input(format!("unknown point index {p} (space has {} points)", self.len())))
        }
    }

    /// One-dimensional coordinate of a point, for interval covers.
    fn line_coord(&self, p: usize) -> Result<f64> {
        match self.coords.as_ref().map(|c| c[p].as_slice()) {
            Some([x]) => Ok(*x),
            _ => Err(Error::unsupported("interval sets need one-dimensional coordinates")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Explicit,
    Ball { center: usize, radius: f64 },
    Interval { lo: f64, hi: f64 },
    /// `U_left ∩ V_right` from a common refinement.
    Intersection { left: usize, right: usize },
    /// `f⁻¹(U_source)` from a pullback.
    Preimage { source: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverSet {
    members: FixedBitSet,
    provenance: Provenance,
}

impl CoverSet {
    pub fn explicit(space: &SampleSpace, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = FixedBitSet::with_capacity(space.len());
        for p in members {
            space.check_point(p)?;
            bits.insert(p);
        }
        Ok(CoverSet { members: bits, provenance: Provenance::Explicit })
    }

    pub fn ball(space: &SampleSpace, center: usize, radius: f64) -> Result<Self> {
        space.check_point(center)?;
        if !(radius > 0.0) {
            return Err(Error::input(format!("ball radius must be positive, got {radius}")));
        }
        let mut bits = FixedBitSet::with_capacity(space.len());
        for p in 0..space.len() {
            if space.distance(p, center)? < radius {
                bits.insert(p);
            }
        }
        Ok(CoverSet { members: bits, provenance: Provenance::Ball { center, radius } })
    }

    pub fn interval(space: &SampleSpace, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::input(format!("empty interval ({lo}, {hi})")));
        }
        let mut bits = FixedBitSet::with_capacity(space.len());
        for p in 0..space.len() {
            let x = space.line_coord(p)?;
            if lo < x && x < hi {
                bits.insert(p);
            }
        }
        Ok(CoverSet { members: bits, provenance: Provenance::Interval { lo, hi } })
    }

    fn from_bits(members: FixedBitSet, provenance: Provenance) -> Self {
        CoverSet { members, provenance }
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.contains(p)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn meets(&self, other: &CoverSet) -> bool {
        !self.members.is_disjoint(&other.members)
    }

    pub fn is_subset(&self, other: &CoverSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    space: Arc<SampleSpace>,
    sets: Vec<CoverSet>,
}

impl Cover {
    pub fn new(space: Arc<SampleSpace>, sets: Vec<CoverSet>) -> Result<Self> {
        for (alpha, set) in sets.iter().enumerate() {
            if set.members.len() != space.len() {
                return Err(Error::input(format!("set {alpha} was built over a different space")));
            }
            match set.provenance {
                Provenance::Ball { center, radius } => {
                    let expected = CoverSet::ball(&space, center, radius)?;
                    if expected.members != set.members {
                        return Err(Error::input(format!(
                            "set {alpha}: members disagree with ball (center {center}, radius {radius})"
                        )));
                    }
                }
                Provenance::Interval { lo, hi } => {
                    let expected = CoverSet::interval(&space, lo, hi)?;
                    if expected.members != set.members {
                        return Err(Error::input(format!(
                            "set {alpha}: members disagree with interval ({lo}, {hi})"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(Cover { space, sets })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn set(&self, alpha: usize) -> &CoverSet {
        &self.sets[alpha]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `A(p)`: indices of the sets containing `p`, ascending.
    pub fn sets_containing(&self, p: usize) -> Vec<usize> {
        self.sets.iter().enumerate().filter(|(_, s)| s.contains(p)).map(|(a, _)| a).collect()
    }

    /// Number of sets containing each point.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.space.len()];
        for set in &self.sets {
            for p in set.members() {
                counts[p] += 1;
            }
        }
        counts
    }

    pub fn union(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.space.len());
        for set in &self.sets {
            all.union_with(&set.members);
        }
        all
    }

    pub fn uncovered_points(&self) -> Vec<usize> {
        let union = self.union();
        (0..self.space.len()).filter(|p| !union.contains(*p)).collect()
    }

    pub fn covers_space(&self) -> bool {
        self.union().count_ones(..) == self.space.len()
    }

    fn same_space(&self, other: &Cover) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::input("covers are defined over different sample spaces"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOrder {
    /// `max_p |A(p)| - 1`, or `-1` when no point is covered.
    pub order: i64,
    /// Smallest point attaining the maximum multiplicity.
    pub witness: Option<usize>,
}

impl CoverOrder {
    pub fn is_empty_order(&self) -> bool {
        self.order < 0
    }
}

pub fn cover_order(cover: &Cover) -> Result<CoverOrder> {
    if cover.is_empty() {
        return Err(Error::input("cover has no sets"));
    }
    let counts = cover.multiplicities();
    let mut best: Option<(usize, usize)> = None;
    for (p, &c) in counts.iter().enumerate() {
        if c > 0 && best.is_none_or(|(_, b)| c > b) {
            best = Some((p, c));
        }
    }
    Ok(match best {
        Some((p, c)) => CoverOrder { order: c as i64 - 1, witness: Some(p) },
        None => CoverOrder { order: -1, witness: None },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// `witness[beta] = alpha` with `V_beta ⊆ U_alpha`, smallest such `alpha`.
    Refines { witness: Vec<usize> },
    /// `V_beta` lies in no `U_alpha`.
    Fails { beta: usize },
}

impl Refinement {
    pub fn holds(&self) -> bool {
        matches!(self, Refinement::Refines { .. })
    }
}

/// Whether `v` refines `u`: every `V_beta` sits inside some `U_alpha`.
pub fn is_refinement(v: &Cover, u: &Cover) -> Result<Refinement> {
    v.same_space(u)?;
    let mut witness = Vec::with_capacity(v.len());
    for (beta, vb) in v.sets.iter().enumerate() {
        match u.sets.iter().position(|ua| vb.is_subset(ua)) {
            Some(alpha) => witness.push(alpha),
            None => return Ok(Refinement::Fails { beta }),
        }
    }
    Ok(Refinement::Refines { witness })
}

/// All nonempty `U_alpha ∩ V_beta`, in `(alpha, beta)` lexicographic order.
pub fn common_refinement(u: &Cover, v: &Cover) -> Result<Cover> {
    u.same_space(v)?;
    let mut sets = Vec::new();
    for (alpha, ua) in u.sets.iter().enumerate() {
        for (beta, vb) in v.sets.iter().enumerate() {
            let mut bits = ua.members.clone();
            bits.intersect_with(&vb.members);
            if !bits.is_clear() {
                sets.push(CoverSet::from_bits(bits, Provenance::Intersection { left: alpha, right: beta }));
            }
        }
    }
    Ok(Cover { space: u.space.clone(), sets })
}

/// Classes of the chain-of-intersections equivalence on set indices.
///
/// Each class is sorted; classes are ordered by their smallest member.
pub fn adjacency_components(cover: &Cover) -> Vec<Vec<usize>> {
    components_of(cover, &(0..cover.len()).collect::<Vec<_>>())
}

fn components_of(cover: &Cover, indices: &[usize]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(indices.len());
    for (i, &a) in indices.iter().enumerate() {
        for (j, &b) in indices.iter().enumerate().skip(i + 1) {
            if cover.sets[a].meets(&cover.sets[b]) {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: std::collections::HashMap<usize, usize> = Default::default();
    for (i, &root) in labels.iter().enumerate() {
        let k = *slot.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(indices[i]);
    }
    classes
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Compatible,
    /// Two groups of set indices meeting `e` whose unions are disjoint.
    Disconnected { v: Vec<usize>, w: Vec<usize> },
}

/// Checks that the sets meeting `e` form a single adjacency class.
///
/// A split is exactly a witness that `e` is disconnected at the resolution
/// of this cover.
pub fn connectivity_verdict(cover: &Cover, e: &[usize]) -> Result<Connectivity> {
    let mut subset = FixedBitSet::with_capacity(cover.space.len());
    for &p in e {
        cover.space.check_point(p)?;
        subset.insert(p);
    }
    let union = cover.union();
    if let Some(p) = subset.difference(&union).next() {
        return Err(Error::input(format!(
            "point {p} ({}) of the subset is not covered",
            cover.space.label(p)
        )));
    }
    let meeting: Vec<usize> = (0..cover.len())
        .filter(|&a| !cover.sets[a].members.is_disjoint(&subset))
        .collect();
    let classes = components_of(cover, &meeting);
    if classes.len() <= 1 {
        return Ok(Connectivity::Compatible);
    }
    let v = classes[0].clone();
    let mut w: Vec<usize> = classes[1..].iter().flatten().copied().collect();
    w.sort_unstable();
    Ok(Connectivity::Disconnected { v, w })
}

/// A total map between two sample spaces.
#[derive(Clone, Debug)]
pub struct PointMap {
    source: Arc<SampleSpace>,
    target: Arc<SampleSpace>,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new(source: Arc<SampleSpace>, target: Arc<SampleSpace>, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.len() {
            return Err(Error::input(format!(
                "map defined on {} points, source has {}",
                image.len(),
                source.len()
            )));
        }
        for (x, &y) in image.iter().enumerate() {
            if y >= target.len() {
                return Err(Error::input(format!("point {x} maps to unknown target point {y}")));
            }
        }
        Ok(PointMap { source, target, image })
    }

    pub fn identity(space: Arc<SampleSpace>) -> Self {
        let image = (0..space.len()).collect();
        PointMap { source: space.clone(), target: space, image }
    }

    pub fn source(&self) -> &Arc<SampleSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SampleSpace> {
        &self.target
    }

    pub fn apply(&self, p: usize) -> usize {
        self.image[p]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &PointMap) -> Result<PointMap> {
        if !(Arc::ptr_eq(&self.target, &g.source) || *self.target == *g.source) {
            return Err(Error::input("maps do not compose: target and source spaces differ"));
        }
        Ok(PointMap {
            source: self.source.clone(),
            target: g.target.clone(),
            image: self.image.iter().map(|&y| g.image[y]).collect(),
        })
    }
}

/// `f*(U)`: set `alpha` is `f⁻¹(U_alpha)`; empty preimages keep their slot.
pub fn pullback_cover(f: &PointMap, u: &Cover) -> Result<Cover> {
    if !(Arc::ptr_eq(&f.target, &u.space) || *f.target == *u.space) {
        return Err(Error::input("cover does not live on the map's target space"));
    }
    let sets = u
        .sets
        .iter()
        .enumerate()
        .map(|(alpha, ua)| {
            let mut bits = FixedBitSet::with_capacity(f.source.len());
            for (x, &y) in f.image.iter().enumerate() {
                if ua.contains(y) {
                    bits.insert(x);
                }
            }
            CoverSet::from_bits(bits, Provenance::Preimage { source: alpha })
        })
        .collect();
    Ok(Cover { space: f.source.clone(), sets })
}

/// An order-≤1 refinement of an interval cover of a segment sample.
///
/// Greedy sweep: from the leftmost uncovered sample point, keep the
/// interval through it that reaches furthest right; then move each kept
/// interval's left end to the midpoint of its overlap with the previous one
/// so that only consecutive intervals meet. Covers already of order ≤ 1 are
/// returned unchanged.
pub fn refine_intervals_order1(u: &Cover) -> Result<Cover> {
    let mut intervals = Vec::with_capacity(u.len());
    for (alpha, set) in u.sets.iter().enumerate() {
        match set.provenance {
            Provenance::Interval { lo, hi } => intervals.push((alpha, lo, hi)),
            _ => {
                return Err(Error::unsupported(format!("set {alpha} has no interval provenance")));
            }
        }
    }
    if let Some(p) = u.uncovered_points().first() {
        return Err(Error::input(format!("cover misses point {p} ({})", u.space.label(*p))));
    }
    if u.is_empty() || cover_order(u)?.order <= 1 {
        return Ok(u.clone());
    }

    let space = &u.space;
    let mut xs: Vec<f64> = (0..space.len()).map(|p| space.line_coord(p)).collect::<Result<_>>()?;
    xs.sort_by(f64::total_cmp);

    let mut chosen: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let (_, lo, hi) = intervals
            .iter()
            .filter(|(_, lo, hi)| *lo < x && x < *hi)
            .fold(None::<(usize, f64, f64)>, |best, &(a, lo, hi)| match best {
                Some((_, _, bh)) if bh >= hi => best,
                _ => Some((a, lo, hi)),
            })
            .ok_or_else(|| Error::consistency(format!("sample point {x} escaped the sweep")))?;
        chosen.push((lo, hi));
        while i < xs.len() && xs[i] < hi {
            i += 1;
        }
    }

    let mut shrunk = Vec::with_capacity(chosen.len());
    for k in 0..chosen.len() {
        let (lo, hi) = chosen[k];
        let lo = match k.checked_sub(1).map(|j| chosen[j].1) {
            Some(prev_hi) if lo < prev_hi => 0.5 * (lo + prev_hi),
            _ => lo,
        };
        shrunk.push(CoverSet::interval(space, lo, hi)?);
    }
    Cover::new(space.clone(), shrunk)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub order: i64,
    pub covers_space: bool,
    pub adjacency_classes: Vec<Vec<usize>>,
    pub max_multiplicity_witness: Option<usize>,
    pub uncovered: Vec<usize>,
}

pub fn analyze(cover: &Cover) -> Result<CoverReport> {
    let order = cover_order(cover)?;
    Ok(CoverReport {
        order: order.order,
        covers_space: cover.covers_space(),
        adjacency_classes: adjacency_components(cover),
        max_multiplicity_witness: order.witness,
        uncovered: cover.uncovered_points(),
    })
}
