//! Bundles glued from constant transition data on a cover.
//!
//! Fibres are symbolic: a bundle is its transition cocycle, a section is a
//! gauge `φ_α` per set with `δ₀φ = ρ`, and triviality means such a gauge
//! exists.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cochain::{
    check_cocycle, holonomies, holonomy, solve_coboundary, CoboundarySolution, Cochain0, Cochain1, CochainFile,
    CocycleVerdict, Convention,
};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::groups::{circle_distance, circle_rep, GroupElement, GroupKind, GroupSpec};
use crate::lift::winding_class;
use crate::nerve::{build_nerve, Cycle, Nerve};

#[derive(Clone, Debug, PartialEq)]
pub struct BundleSpec {
    cover: Arc<Cover>,
    transitions: Cochain1,
    convention: Convention,
}

impl BundleSpec {
    /// Structure groups: `T`, `GL(n)`, `Sign`, `UnitQuaternion`.
    pub fn new(cover: Arc<Cover>, transitions: Cochain1, convention: Convention) -> Result<Self> {
        match transitions.spec().kind() {
            GroupKind::T | GroupKind::GL(_) | GroupKind::Sign | GroupKind::UnitQuaternion => {}
            _ => return Err(Error::unsupported(format!("{} bundles", transitions.spec().name()))),
        }
        if transitions.nerve().vertex_count() != cover.len() {
            return Err(Error::input("transitions live on a nerve of a different cover"));
        }
        for (e, &[a, b]) in transitions.nerve().edges().iter().enumerate() {
            if !cover.set(a).meets(cover.set(b)) {
                return Err(Error::input(format!("transition {e} joins disjoint sets {a} and {b}")));
            }
        }
        Ok(BundleSpec { cover, transitions, convention })
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        self.transitions.nerve()
    }

    pub fn spec(&self) -> &GroupSpec {
        self.transitions.spec()
    }

    pub fn transitions(&self) -> &Cochain1 {
        &self.transitions
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }
}

/// A bundle whose identifications were checked at every sample point.
#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    spec: BundleSpec,
    identifications_checked: usize,
}

impl Bundle {
    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn transitions(&self) -> &Cochain1 {
        &self.spec.transitions
    }

    pub fn convention(&self) -> Convention {
        self.spec.convention
    }

    /// Number of (point, triple of sets) identifications verified.
    pub fn identifications_checked(&self) -> usize {
        self.identifications_checked
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuildOutcome {
    Valid(Bundle),
    /// `point` is set when the failure was found by the per-point check.
    Rejected { triangle: [usize; 3], value: GroupElement, point: Option<usize> },
}

/// Checks the cocycle rule on the nerve, then path independence of the
/// identifications over each point (all triples of sets containing it).
pub fn build_bundle(spec: BundleSpec) -> Result<BuildOutcome> {
    let r = &spec.transitions;
    if let CocycleVerdict::Violation { triangle, value } = check_cocycle(r, spec.convention)? {
        return Ok(BuildOutcome::Rejected { triangle, value, point: None });
    }
    let mut checked = 0;
    for p in 0..spec.cover.space().len() {
        let sets = spec.cover.sets_containing(p);
        for (i, &a) in sets.iter().enumerate() {
            for (j, &b) in sets.iter().enumerate().skip(i + 1) {
                for &c in &sets[j + 1..] {
                    let value = holonomy(r, &[a, b, c, a], spec.convention)?;
                    if !r.spec().is_identity(&value) {
                        return Ok(BuildOutcome::Rejected { triangle: [a, b, c], value, point: Some(p) });
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(BuildOutcome::Valid(Bundle { spec, identifications_checked: checked }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SectionVerdict {
    /// `fibers` is the gauge `φ`, identity at each component root.
    Section { fibers: Cochain0, winding: Option<Vec<(Cycle, i64)>> },
    Obstructed { cycle: Cycle, holonomy: GroupElement },
}

impl SectionVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, SectionVerdict::Section { .. })
    }
}

/// Section test by coboundary solving; for circle bundles the integer
/// winding of the real lift is reported with the section.
pub fn section_exists(bundle: &Bundle) -> Result<SectionVerdict> {
    let r = bundle.transitions();
    Ok(match solve_coboundary(r, bundle.convention())? {
        CoboundarySolution::Solved(fibers) => {
            let winding = match r.spec().kind() {
                GroupKind::T => Some(winding_class(r)?),
                _ => None,
            };
            SectionVerdict::Section { fibers, winding }
        }
        CoboundarySolution::Obstructed { cycle, holonomy } => SectionVerdict::Obstructed { cycle, holonomy },
    })
}

/// Gauge-fixed holonomy around each fundamental cycle; the bundle is
/// trivial iff all of them are the identity.
pub fn flat_holonomy(bundle: &Bundle) -> Result<Vec<(Cycle, GroupElement)>> {
    holonomies(bundle.transitions(), bundle.convention())
}

/// Subgroups `H ⊂ G` with a computable quotient label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// `Z ⊂ R`; labels in `R/Z`.
    Integers,
    /// `{j/k} ⊂ T`; labels `k·x mod 1`.
    Cyclic(u64),
    /// `{±I} ⊂ GL(n)`; labels are sign-normalised matrices.
    PlusMinusIdentity,
}

impl Subgroup {
    fn check_group(self, spec: &GroupSpec) -> Result<()> {
        let ok = matches!(
            (self, spec.kind()),
            (Subgroup::Integers, GroupKind::R) | (Subgroup::Cyclic(_), GroupKind::T) | (Subgroup::PlusMinusIdentity, GroupKind::GL(_))
        );
        if matches!(self, Subgroup::Cyclic(0)) {
            return Err(Error::input("cyclic subgroup needs order at least 1"));
        }
        if ok {
            Ok(())
        } else {
            Err(Error::unsupported(format!("subgroup {self:?} of {}", spec.name())))
        }
    }

    pub fn contains(self, spec: &GroupSpec, g: &GroupElement) -> bool {
        let eps = spec.eps();
        match (self, g) {
            (Subgroup::Integers, GroupElement::Real(x)) => (x - x.round()).abs() <= eps,
            (Subgroup::Cyclic(k), GroupElement::Circle(x)) => circle_distance(circle_rep(k as f64 * x), 0.0) <= eps * k as f64,
            (Subgroup::PlusMinusIdentity, GroupElement::Matrix(m)) => {
                let id = nalgebra::DMatrix::identity(m.nrows(), m.ncols());
                (m - &id).amax() <= eps || (m + &id).amax() <= eps
            }
            _ => false,
        }
    }

    /// Image of `g` in `G/H`.
    pub fn label(self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (Subgroup::Integers, GroupElement::Real(x)) => GroupElement::Circle(circle_rep(*x)),
            (Subgroup::Cyclic(k), GroupElement::Circle(x)) => GroupElement::Circle(circle_rep(k as f64 * x)),
            (Subgroup::PlusMinusIdentity, GroupElement::Matrix(m)) => {
                // the largest entry, first in row-major order, is made positive
                let mut best = (0usize, 0usize);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        if m[(i, j)].abs() > m[best].abs() {
                            best = (i, j);
                        }
                    }
                }
                GroupElement::Matrix(if m[best] < 0.0 { -m } else { m.clone() })
            }
            _ => g.clone(),
        }
    }

    fn label_spec(self, spec: &GroupSpec) -> GroupSpec {
        match self {
            Subgroup::Integers | Subgroup::Cyclic(_) => GroupSpec::with_eps(GroupKind::T, spec.eps()).expect("valid"),
            Subgroup::PlusMinusIdentity => *spec,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GlueOutcome {
    Glued {
        /// `ρ_ab = φ_a⁻¹ φ_b`, all in `H`.
        transitions: Cochain1,
        /// `q∘φ_α` at each covered point, `None` off the cover.
        labels: Vec<Option<GroupElement>>,
        /// `φ'_α = φ_α τ_α⁻¹` when `τ` was supplied.
        global: Option<Vec<GroupElement>>,
    },
    /// `ρ_ab ∉ H`.
    NotInSubgroup { edge: [usize; 2], value: GroupElement },
    /// The supplied `τ` does not make `φ'` agree on the overlap.
    Mismatch { edge: [usize; 2], left: GroupElement, right: GroupElement },
}

/// Checks that constant maps `φ_α` differ by `H` on overlaps and glues
/// the quotient labels (and, with `τ ∈ H`, the corrected maps).
pub fn subgroup_glue(
    cover: &Cover,
    spec: &GroupSpec,
    phis: &[GroupElement],
    subgroup: Subgroup,
    tau: Option<&[GroupElement]>,
) -> Result<GlueOutcome> {
    subgroup.check_group(spec)?;
    if phis.len() != cover.len() {
        return Err(Error::input(format!("need one map per set ({}), got {}", cover.len(), phis.len())));
    }
    phis.iter().try_for_each(|g| spec.validate(g))?;
    let nerve = Arc::new(build_nerve(cover, 1)?);
    let values = nerve
        .edges()
        .iter()
        .map(|&[a, b]| spec.inv_op(&phis[a], &phis[b]))
        .collect::<Result<Vec<_>>>()?;
    let transitions = Cochain1::new(nerve.clone(), *spec, values)?;
    for (&[a, b], g) in nerve.edges().iter().zip(transitions.values()) {
        if !subgroup.contains(spec, g) {
            return Ok(GlueOutcome::NotInSubgroup { edge: [a, b], value: g.clone() });
        }
    }

    let label_spec = subgroup.label_spec(spec);
    let mut labels = Vec::with_capacity(cover.space().len());
    for p in 0..cover.space().len() {
        let sets = cover.sets_containing(p);
        let Some(&first) = sets.first() else {
            labels.push(None);
            continue;
        };
        let label = subgroup.label(&phis[first]);
        for &b in &sets[1..] {
            if !label_spec.approx_eq(&label, &subgroup.label(&phis[b])) {
                return Err(Error::consistency(format!("quotient labels of sets {first} and {b} differ at point {p}")));
            }
        }
        labels.push(Some(label));
    }

    let global = match tau {
        None => None,
        Some(tau) => {
            if tau.len() != cover.len() {
                return Err(Error::input(format!("need one τ per set ({}), got {}", cover.len(), tau.len())));
            }
            for (a, t) in tau.iter().enumerate() {
                spec.validate(t)?;
                if !subgroup.contains(spec, t) {
                    return Err(Error::input(format!("τ_{a} = {t} is not in the subgroup")));
                }
            }
            let corrected =
                phis.iter().zip(tau).map(|(phi, t)| spec.op_inv(phi, t)).collect::<Result<Vec<_>>>()?;
            for &[a, b] in nerve.edges() {
                if !spec.approx_eq(&corrected[a], &corrected[b]) {
                    return Ok(GlueOutcome::Mismatch {
                        edge: [a, b],
                        left: corrected[a].clone(),
                        right: corrected[b].clone(),
                    });
                }
            }
            Some(corrected)
        }
    };
    Ok(GlueOutcome::Glued { transitions, labels, global })
}

/// Bundle file: cover and transitions are inline JSON or paths relative
/// to the bundle file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleFile {
    pub cover: Value,
    pub spec: GroupSpec,
    #[serde(default)]
    pub convention: Convention,
    pub transitions: Value,
}

fn inline_or_path(v: &Value, base: &Path) -> Result<String> {
    match v {
        Value::String(path) => Ok(std::fs::read_to_string(base.join(path))?),
        Value::Object(_) => Ok(v.to_string()),
        other => Err(Error::input(format!("expected a file path or an inline object, got {other}"))),
    }
}

impl BundleFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves references and builds the [`BundleSpec`] (nerve up to triangles).
    pub fn into_spec(self, base: &Path) -> Result<BundleSpec> {
        let cover = Arc::new(Cover::from_json(&inline_or_path(&self.cover, base)?)?);
        let nerve = Arc::new(build_nerve(&cover, 2)?);
        let file = CochainFile::from_json(&inline_or_path(&self.transitions, base)?)?;
        if file.spec.kind() != self.spec.kind() {
            return Err(Error::GroupMismatch { expected: self.spec.name(), found: file.spec.name() });
        }
        let transitions = CochainFile { spec: self.spec, ..file }.into_cochain1(nerve)?;
        BundleSpec::new(cover, transitions, self.convention)
    }
}
