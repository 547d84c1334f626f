//! Group-valued cochains on a nerve.
//!
//! 1-cochains are stored once per edge on its ascending orientation;
//! reading `(b, a)` yields the inverse. Abelian groups use
//! `(δt)_ab = t_b - t_a`. For nonabelian groups the [`Convention`] picks
//! one of the two consistent pairings of coboundary and cocycle rule.

mod h1;
mod io;
mod local_difference;
pub mod snf;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};
use crate::nerve::{Cycle, Nerve};

pub use h1::{coboundary_matrices, h1, Coefficients, H1Description};
pub use io::{CochainFile, CochainValue};
pub use local_difference::{solve_local_difference, LocalDifferenceProblem, LocalDifferenceSolution};

/// Ordering of nonabelian cocycle products.
///
/// * `Abg`: `ρ_ab ρ_bc ρ_ca = e`, coboundaries `ρ_ab = τ_a⁻¹ τ_b`.
/// * `Gba`: `ρ_ca ρ_bc ρ_ab = e`, coboundaries `ρ_ab = τ_b τ_a⁻¹`.
///
/// Irrelevant for abelian groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Abg,
    Gba,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Abg => "abg",
            Convention::Gba => "gba",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "abg" => Ok(Convention::Abg),
            "gba" => Ok(Convention::Gba),
            other => Err(Error::input(format!("unknown convention {other:?} (expected abg or gba)"))),
        }
    }
}

fn check_values(spec: &GroupSpec, values: &[GroupElement], expected: usize, what: &str) -> Result<()> {
    if values.len() != expected {
        return Err(Error::input(format!("{what} needs {expected} values, got {}", values.len())));
    }
    values.iter().try_for_each(|g| spec.validate(g))
}

fn same_nerve(a: &Arc<Nerve>, b: &Arc<Nerve>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::input("cochains live on different nerves"))
    }
}

fn same_spec(a: &GroupSpec, b: &GroupSpec) -> Result<()> {
    if a.kind() == b.kind() {
        Ok(())
    } else {
        Err(Error::GroupMismatch { expected: a.name(), found: b.name() })
    }
}

/// One group element per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain0 {
    nerve: Arc<Nerve>,
    spec: GroupSpec,
    values: Vec<GroupElement>,
}

impl Cochain0 {
    pub fn new(nerve: Arc<Nerve>, spec: GroupSpec, values: Vec<GroupElement>) -> Result<Self> {
        check_values(&spec, &values, nerve.vertex_count(), "0-cochain")?;
        Ok(Cochain0 { nerve, spec, values })
    }

    pub fn identity(nerve: Arc<Nerve>, spec: GroupSpec) -> Self {
        let values = vec![spec.identity(); nerve.vertex_count()];
        Cochain0 { nerve, spec, values }
    }

    pub fn random<R: rand::Rng + ?Sized>(nerve: Arc<Nerve>, spec: GroupSpec, rng: &mut R) -> Self {
        let values = (0..nerve.vertex_count()).map(|_| spec.random_element(rng)).collect();
        Cochain0 { nerve, spec, values }
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn get(&self, v: usize) -> &GroupElement {
        &self.values[v]
    }
}

/// One group element per stored edge `(a, b)`, `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain1 {
    nerve: Arc<Nerve>,
    spec: GroupSpec,
    values: Vec<GroupElement>,
}

impl Cochain1 {
    /// Values indexed like [`Nerve::edges`].
    pub fn new(nerve: Arc<Nerve>, spec: GroupSpec, values: Vec<GroupElement>) -> Result<Self> {
        check_values(&spec, &values, nerve.edges().len(), "1-cochain")?;
        Ok(Cochain1 { nerve, spec, values })
    }

    pub fn identity(nerve: Arc<Nerve>, spec: GroupSpec) -> Self {
        let values = vec![spec.identity(); nerve.edges().len()];
        Cochain1 { nerve, spec, values }
    }

    /// Builds a cochain from oriented edge values; unlisted edges get the
    /// identity.
    pub fn from_oriented(
        nerve: Arc<Nerve>,
        spec: GroupSpec,
        entries: impl IntoIterator<Item = ((usize, usize), GroupElement)>,
    ) -> Result<Self> {
        let mut out = Cochain1::identity(nerve, spec);
        let mut seen = vec![false; out.values.len()];
        for ((a, b), g) in entries {
            let (e, _) = out.edge(a, b)?;
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::input(format!("edge ({a}, {b}) given twice")));
            }
            out.set(a, b, g)?;
        }
        Ok(out)
    }

    pub fn random<R: rand::Rng + ?Sized>(nerve: Arc<Nerve>, spec: GroupSpec, rng: &mut R) -> Self {
        let values = (0..nerve.edges().len()).map(|_| spec.random_element(rng)).collect();
        Cochain1 { nerve, spec, values }
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Values on the stored orientation.
    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    fn edge(&self, a: usize, b: usize) -> Result<(usize, bool)> {
        self.nerve.edge_id(a, b).ok_or_else(|| Error::input(format!("({a}, {b}) is not an edge of the nerve")))
    }

    /// `r_ab`, inverted when `a > b`.
    pub fn get(&self, a: usize, b: usize) -> Result<GroupElement> {
        let (e, reversed) = self.edge(a, b)?;
        if reversed {
            self.spec.inverse(&self.values[e])
        } else {
            Ok(self.values[e].clone())
        }
    }

    /// Sets `r_ab` (storing the inverse when `a > b`).
    pub fn set(&mut self, a: usize, b: usize, g: GroupElement) -> Result<()> {
        self.spec.validate(&g)?;
        let (e, reversed) = self.edge(a, b)?;
        self.values[e] = if reversed { self.spec.inverse(&g)? } else { g };
        Ok(())
    }

    /// Edgewise comparison at the group's tolerance.
    pub fn approx_eq(&self, other: &Cochain1) -> bool {
        self.spec.kind() == other.spec.kind()
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| self.spec.approx_eq(a, b))
    }

    /// Applies `f` to every stored value, producing a cochain over `spec`.
    pub fn map(&self, spec: GroupSpec, f: impl FnMut(&GroupElement) -> Result<GroupElement>) -> Result<Cochain1> {
        let values = self.values.iter().map(f).collect::<Result<Vec<_>>>()?;
        Cochain1::new(self.nerve.clone(), spec, values)
    }
}

/// One group element per stored triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain2 {
    nerve: Arc<Nerve>,
    spec: GroupSpec,
    values: Vec<GroupElement>,
}

impl Cochain2 {
    pub fn new(nerve: Arc<Nerve>, spec: GroupSpec, values: Vec<GroupElement>) -> Result<Self> {
        check_values(&spec, &values, nerve.triangles().len(), "2-cochain")?;
        Ok(Cochain2 { nerve, spec, values })
    }

    pub fn identity(nerve: Arc<Nerve>, spec: GroupSpec) -> Self {
        let values = vec![spec.identity(); nerve.triangles().len()];
        Cochain2 { nerve, spec, values }
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn get(&self, t: usize) -> &GroupElement {
        &self.values[t]
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().all(|g| self.spec.is_identity(g))
    }

    /// First triangle whose value is not the identity.
    pub fn first_nontrivial(&self) -> Option<usize> {
        self.values.iter().position(|g| !self.spec.is_identity(g))
    }
}

/// `δ₀t`: `t_b - t_a`, `τ_a⁻¹ τ_b` (abg) or `τ_b τ_a⁻¹` (gba).
pub fn delta0(t: &Cochain0, convention: Convention) -> Result<Cochain1> {
    let spec = t.spec;
    let values = t
        .nerve
        .edges()
        .iter()
        .map(|&[a, b]| coboundary_edge(&spec, convention, &t.values[a], &t.values[b]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cochain1 { nerve: t.nerve.clone(), spec, values })
}

fn coboundary_edge(
    spec: &GroupSpec,
    convention: Convention,
    ta: &GroupElement,
    tb: &GroupElement,
) -> Result<GroupElement> {
    match convention {
        _ if spec.abelian() => spec.op_inv(tb, ta),
        Convention::Abg => spec.inv_op(ta, tb),
        Convention::Gba => spec.op_inv(tb, ta),
    }
}

/// Propagates a vertex value across the edge `(u, w)` so that the edge is
/// satisfied: `τ_w = τ_u ρ_uw` (abg) or `ρ_uw τ_u` (gba).
fn propagate(spec: &GroupSpec, convention: Convention, tu: &GroupElement, r_uw: &GroupElement) -> Result<GroupElement> {
    match convention {
        Convention::Abg => spec.op(tu, r_uw),
        Convention::Gba => spec.op(r_uw, tu),
    }
}

/// `δ₁r` per triangle `(a, b, c)`: `r_ab + r_bc + r_ca`, or the ordered
/// product `ρ_ab ρ_bc ρ_ca` (abg) / `ρ_ca ρ_bc ρ_ab` (gba).
pub fn delta1(r: &Cochain1, convention: Convention) -> Result<Cochain2> {
    let values = r
        .nerve
        .triangles()
        .iter()
        .map(|&[a, b, c]| triangle_product(r, convention, a, b, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cochain2 { nerve: r.nerve.clone(), spec: r.spec, values })
}

fn triangle_product(r: &Cochain1, convention: Convention, a: usize, b: usize, c: usize) -> Result<GroupElement> {
    holonomy(r, &[a, b, c, a], convention)
}

/// Ordered product of `r` along a closed walk `w₀ … w_k` (`w_k = w₀`):
/// left to right for abg, right to left for gba.
pub fn holonomy(r: &Cochain1, walk: &[usize], convention: Convention) -> Result<GroupElement> {
    let spec = &r.spec;
    let mut acc = spec.identity();
    for step in walk.windows(2) {
        let g = r.get(step[0], step[1])?;
        acc = match convention {
            Convention::Abg => spec.op(&acc, &g)?,
            Convention::Gba => spec.op(&g, &acc)?,
        };
    }
    Ok(acc)
}

/// Holonomy of `r` around a fundamental cycle.
pub fn cycle_holonomy(r: &Cochain1, cycle: &Cycle, convention: Convention) -> Result<GroupElement> {
    holonomy(r, &cycle.vertices, convention)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleVerdict {
    Ok,
    Violation { triangle: [usize; 3], value: GroupElement },
}

impl CocycleVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, CocycleVerdict::Ok)
    }
}

/// `Ok` iff `δ₁r` is the identity on every triangle; otherwise the first
/// violating triangle in stored order.
pub fn check_cocycle(r: &Cochain1, convention: Convention) -> Result<CocycleVerdict> {
    for &[a, b, c] in r.nerve.triangles() {
        let value = triangle_product(r, convention, a, b, c)?;
        if !r.spec.is_identity(&value) {
            return Ok(CocycleVerdict::Violation { triangle: [a, b, c], value });
        }
    }
    Ok(CocycleVerdict::Ok)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoboundarySolution {
    /// `δ₀t = r`, with `t` the identity at every component root.
    Solved(Cochain0),
    /// `holonomy` is the product around `cycle` based at the component
    /// root (the gauged value of the closing edge).
    Obstructed { cycle: Cycle, holonomy: GroupElement },
}

impl CoboundarySolution {
    pub fn is_solved(&self) -> bool {
        matches!(self, CoboundarySolution::Solved(_))
    }

    pub fn solution(&self) -> Option<&Cochain0> {
        match self {
            CoboundarySolution::Solved(t) => Some(t),
            CoboundarySolution::Obstructed { .. } => None,
        }
    }
}

/// Vertex values obtained by propagating `r` along the breadth-first
/// spanning forest from identity roots.
pub fn tree_gauge(r: &Cochain1, convention: Convention) -> Result<Cochain0> {
    let spec = &r.spec;
    let forest = r.nerve.spanning_forest();
    let mut t = vec![spec.identity(); r.nerve.vertex_count()];
    for &v in &forest.order {
        if let Some(p) = forest.parent[v] {
            t[v] = propagate(spec, convention, &t[p], &r.get(p, v)?)?;
        }
    }
    Ok(Cochain0 { nerve: r.nerve.clone(), spec: *spec, values: t })
}

/// The closing edge of each fundamental cycle after gauging by
/// [`tree_gauge`]: `τ_a ρ_ab τ_b⁻¹` (abg), `τ_b⁻¹ ρ_ab τ_a` (gba),
/// `r_ab - (t_b - t_a)` (abelian). This is the holonomy around the cycle
/// based at its component root.
pub fn holonomies(r: &Cochain1, convention: Convention) -> Result<Vec<(Cycle, GroupElement)>> {
    let t = tree_gauge(r, convention)?;
    r.nerve
        .fundamental_cycles()
        .into_iter()
        .map(|cycle| {
            let h = gauged_edge(r, &t, convention, cycle.closing_edge)?;
            Ok((cycle, h))
        })
        .collect()
}

fn gauged_edge(r: &Cochain1, t: &Cochain0, convention: Convention, e: usize) -> Result<GroupElement> {
    let spec = &r.spec;
    let [a, b] = r.nerve.edges()[e];
    let (ta, tb, g) = (&t.values[a], &t.values[b], &r.values[e]);
    match convention {
        _ if spec.abelian() => spec.op_inv(g, &spec.op_inv(tb, ta)?),
        Convention::Abg => spec.op_inv(&spec.op(ta, g)?, tb),
        Convention::Gba => spec.op(&spec.inv_op(tb, g)?, ta),
    }
}

/// Finds `t` with `δ₀t = r` by gauge-fixing along the breadth-first
/// spanning forest, then checks every non-tree edge in stored order.
pub fn solve_coboundary(r: &Cochain1, convention: Convention) -> Result<CoboundarySolution> {
    let t = tree_gauge(r, convention)?;
    for cycle in r.nerve.fundamental_cycles() {
        let holonomy = gauged_edge(r, &t, convention, cycle.closing_edge)?;
        if !r.spec.is_identity(&holonomy) {
            return Ok(CoboundarySolution::Obstructed { cycle, holonomy });
        }
    }
    Ok(CoboundarySolution::Solved(t))
}

/// `r` twisted by the 0-cochain `t` so that the result is cohomologous:
/// `r + δ₀t`, `τ_a⁻¹ ρ_ab τ_b` (abg) or `τ_b ρ_ab τ_a⁻¹` (gba).
pub fn gauge_transform(r: &Cochain1, t: &Cochain0, convention: Convention) -> Result<Cochain1> {
    same_nerve(&r.nerve, &t.nerve)?;
    same_spec(&r.spec, &t.spec)?;
    let spec = &r.spec;
    let values = r
        .nerve
        .edges()
        .iter()
        .zip(&r.values)
        .map(|(&[a, b], g)| match convention {
            _ if spec.abelian() => spec.op(g, &spec.op_inv(&t.values[b], &t.values[a])?),
            Convention::Abg => spec.op(&spec.inv_op(&t.values[a], g)?, &t.values[b]),
            Convention::Gba => spec.op_inv(&spec.op(&t.values[b], g)?, &t.values[a]),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cochain1 { nerve: r.nerve.clone(), spec: *spec, values })
}
