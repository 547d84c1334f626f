//! Lifting 1-cocycles along homomorphisms with central kernel.
//!
//! The pipeline is: pick a set-theoretic preimage of every edge value,
//! measure its failure to be a cocycle in kernel coordinates, then try to
//! absorb that failure with a kernel-valued 1-cochain. Only the
//! homomorphisms below are provided; all of them except the determinant
//! have central kernels.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cochain::snf::{solve_integer, solve_mod, Certificate, IntegerSolution};
use crate::cochain::{check_cocycle, delta1, Cochain1, Cochain2, CochainFile, CocycleVerdict, Convention};
use crate::error::{Error, Result};
use crate::groups::{circle_rep, GroupElement, GroupKind, GroupSpec};
use crate::nerve::{Cycle, IntegerMatrix, Nerve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomKind {
    /// `R -> T`, kernel `Z`.
    RtoT,
    /// `Z -> Z/n`, kernel `nZ ≅ Z`.
    ZtoZmod(u64),
    /// `Z/n -> Z/m` for `m | n`, kernel `mZ/nZ ≅ Z/(n/m)`.
    ZmodToZmod { n: u64, m: u64 },
    /// `GL(n) -> GL(1)`, the determinant. Noncentral kernel; lifting
    /// beyond the set-theoretic step is unsupported.
    GlDet(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomSpec {
    kind: HomKind,
    source: GroupSpec,
    target: GroupSpec,
    /// `None` when the kernel is not one of the coefficient groups.
    kernel: Option<GroupSpec>,
    central: bool,
}

impl HomSpec {
    pub fn new(kind: HomKind) -> Result<Self> {
        let (source, target, kernel, central) = match kind {
            HomKind::RtoT => (GroupSpec::r(), GroupSpec::t(), Some(GroupSpec::z()), true),
            HomKind::ZtoZmod(n) => (GroupSpec::z(), GroupSpec::zmod(n)?, Some(GroupSpec::z()), true),
            HomKind::ZmodToZmod { n, m } => {
                if m < 2 || m >= n || n % m != 0 {
                    return Err(Error::input(format!("Z/{n} -> Z/{m} needs m to be a proper divisor of n, m >= 2")));
                }
                (GroupSpec::zmod(n)?, GroupSpec::zmod(m)?, Some(GroupSpec::zmod(n / m)?), true)
            }
            HomKind::GlDet(n) => (GroupSpec::gl(n)?, GroupSpec::gl(1)?, None, n == 1),
        };
        Ok(HomSpec { kind, source, target, kernel, central })
    }

    pub fn r_to_t() -> Self {
        HomSpec::new(HomKind::RtoT).expect("valid")
    }

    pub fn z_to_zmod(n: u64) -> Result<Self> {
        HomSpec::new(HomKind::ZtoZmod(n))
    }

    pub fn zmod_to_zmod(n: u64, m: u64) -> Result<Self> {
        HomSpec::new(HomKind::ZmodToZmod { n, m })
    }

    pub fn gl_det(n: usize) -> Result<Self> {
        HomSpec::new(HomKind::GlDet(n))
    }

    /// The provided homomorphism between two groups, if any.
    pub fn between(source: &GroupSpec, target: &GroupSpec) -> Result<Self> {
        let kind = match (source.kind(), target.kind()) {
            (GroupKind::R, GroupKind::T) => HomKind::RtoT,
            (GroupKind::Z, GroupKind::Zmod(n)) => HomKind::ZtoZmod(n),
            (GroupKind::Zmod(n), GroupKind::Zmod(m)) => HomKind::ZmodToZmod { n, m },
            (GroupKind::GL(n), GroupKind::GL(1)) => HomKind::GlDet(n),
            _ => {
                return Err(Error::unsupported(format!(
                    "no homomorphism {} -> {} is provided",
                    source.name(),
                    target.name()
                )))
            }
        };
        HomSpec::new(kind)
    }

    /// `r-to-t`, `z-to-zmod:n`, `zmod-to-zmod:n:m`, `gl-det:n`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |i: usize| {
            parts
                .get(i)
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| Error::input(format!("homomorphism {text:?} needs a numeric parameter")))
        };
        let kind = match parts[0] {
            "r-to-t" if parts.len() == 1 => HomKind::RtoT,
            "z-to-zmod" if parts.len() == 2 => HomKind::ZtoZmod(num(1)?),
            "zmod-to-zmod" if parts.len() == 3 => HomKind::ZmodToZmod { n: num(1)?, m: num(2)? },
            "gl-det" if parts.len() == 2 => HomKind::GlDet(num(1)? as usize),
            _ => return Err(Error::input(format!("unknown homomorphism {text:?}"))),
        };
        HomSpec::new(kind)
    }

    pub fn kind(&self) -> HomKind {
        self.kind
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn kernel(&self) -> Option<&GroupSpec> {
        self.kernel.as_ref()
    }

    pub fn central(&self) -> bool {
        self.central
    }

    pub fn name(&self) -> String {
        match self.kind {
            HomKind::RtoT => "r-to-t".into(),
            HomKind::ZtoZmod(n) => format!("z-to-zmod:{n}"),
            HomKind::ZmodToZmod { n, m } => format!("zmod-to-zmod:{n}:{m}"),
            HomKind::GlDet(n) => format!("gl-det:{n}"),
        }
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        self.source.validate(g)?;
        Ok(match (self.kind, g) {
            (HomKind::RtoT, GroupElement::Real(x)) => GroupElement::Circle(circle_rep(*x)),
            (HomKind::ZtoZmod(n), GroupElement::Int(x)) => GroupElement::Residue(x.rem_euclid(n as i64) as u64),
            (HomKind::ZmodToZmod { m, .. }, GroupElement::Residue(x)) => GroupElement::Residue(x % m),
            (HomKind::GlDet(_), GroupElement::Matrix(a)) => {
                GroupElement::Matrix(nalgebra::DMatrix::from_element(1, 1, a.determinant()))
            }
            _ => unreachable!("validated against the source group"),
        })
    }

    /// Canonical preimage: `[0, 1)` for `T`, `0..n` for residues,
    /// `diag(d, 1, …, 1)` for determinants.
    pub fn preimage(&self, h: &GroupElement) -> Result<GroupElement> {
        self.target.validate(h)?;
        Ok(match (self.kind, h) {
            (HomKind::RtoT, GroupElement::Circle(x)) => GroupElement::Real(*x),
            (HomKind::ZtoZmod(_), GroupElement::Residue(x)) => GroupElement::Int(*x as i64),
            (HomKind::ZmodToZmod { .. }, GroupElement::Residue(x)) => GroupElement::Residue(*x),
            (HomKind::GlDet(n), GroupElement::Matrix(d)) => {
                let mut a = nalgebra::DMatrix::identity(n, n);
                a[(0, 0)] = d[(0, 0)];
                GroupElement::Matrix(a)
            }
            _ => unreachable!("validated against the target group"),
        })
    }

    fn require_central(&self) -> Result<&GroupSpec> {
        match self.kernel {
            Some(ref k) if self.central => Ok(k),
            _ => Err(Error::unsupported(format!("{} has a noncentral kernel", self.name()))),
        }
    }

    /// Source element of the abelian source, as a kernel coordinate.
    fn to_kernel(&self, g: &GroupElement) -> Result<GroupElement> {
        let eps = self.source.eps();
        match (self.kind, g) {
            (HomKind::RtoT, GroupElement::Real(x)) => {
                let k = x.round();
                if (x - k).abs() > eps {
                    return Err(Error::consistency(format!("{x} is not an integer within {eps}")));
                }
                Ok(GroupElement::Int(k as i64))
            }
            (HomKind::ZtoZmod(n), GroupElement::Int(x)) => {
                if x.rem_euclid(n as i64) != 0 {
                    return Err(Error::consistency(format!("{x} is not a multiple of {n}")));
                }
                Ok(GroupElement::Int(x / n as i64))
            }
            (HomKind::ZmodToZmod { m, .. }, GroupElement::Residue(x)) => {
                if x % m != 0 {
                    return Err(Error::consistency(format!("{x} is not a multiple of {m}")));
                }
                Ok(GroupElement::Residue(x / m))
            }
            _ => Err(Error::unsupported(format!("{} has a noncentral kernel", self.name()))),
        }
    }

    /// `r - ι(l)` for a kernel coordinate `l`.
    fn subtract_kernel(&self, r: &GroupElement, l: &GroupElement) -> Result<GroupElement> {
        Ok(match (self.kind, r, l) {
            (HomKind::RtoT, GroupElement::Real(x), GroupElement::Int(k)) => GroupElement::Real(x - *k as f64),
            (HomKind::ZtoZmod(n), GroupElement::Int(x), GroupElement::Int(k)) => GroupElement::Int(
                k.checked_mul(n as i64)
                    .and_then(|nk| x.checked_sub(nk))
                    .ok_or_else(|| Error::input("integer overflow while correcting a lift"))?,
            ),
            (HomKind::ZmodToZmod { n, m }, GroupElement::Residue(x), GroupElement::Residue(k)) => {
                GroupElement::Residue((x + n - (m * k) % n) % n)
            }
            _ => return Err(Error::unsupported(format!("{} has a noncentral kernel", self.name()))),
        })
    }
}

fn require_spec(expected: &GroupSpec, found: &GroupSpec) -> Result<()> {
    if expected.kind() == found.kind() {
        Ok(())
    } else {
        Err(Error::GroupMismatch { expected: expected.name(), found: found.name() })
    }
}

/// Edgewise canonical preimage on the stored orientation.
pub fn set_lift(rho: &Cochain1, hom: &HomSpec) -> Result<Cochain1> {
    require_spec(hom.target(), rho.spec())?;
    if let CocycleVerdict::Violation { triangle, value } = check_cocycle(rho, Convention::Abg)? {
        return Err(Error::input(format!("not a cocycle: triangle {triangle:?} has value {value}")));
    }
    rho.map(with_eps(hom.source(), rho.spec()), |h| hom.preimage(h))
}

/// Carries the caller's tolerance from target to source.
fn with_eps(source: &GroupSpec, target: &GroupSpec) -> GroupSpec {
    GroupSpec::with_eps(source.kind(), target.eps()).unwrap_or(*source)
}

/// `δ₁(lift)` in kernel coordinates, each entry checked to lie in the kernel.
pub fn obstruction(lift: &Cochain1, hom: &HomSpec) -> Result<Cochain2> {
    let kernel = *hom.require_central()?;
    require_spec(hom.source(), lift.spec())?;
    let v = delta1(lift, Convention::Abg)?;
    let values = v.values().iter().map(|g| hom.to_kernel(g)).collect::<Result<Vec<_>>>()?;
    Cochain2::new(lift.nerve().clone(), kernel, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftStatus {
    Strict,
    Obstructed,
    CorrectedStrict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftResult {
    pub status: LiftStatus,
    /// The corrected lift for `CorrectedStrict`, else the set-theoretic one.
    pub lift: Cochain1,
    pub obstruction: Option<Cochain2>,
    pub correction: Option<Cochain1>,
    /// Present for `Obstructed`: refutes `δ₁l = v`.
    pub certificate: Option<Certificate>,
}

impl LiftResult {
    pub fn to_json_value(&self) -> Value {
        let mut out = json!({
            "status": self.status,
            "lift": CochainFile::from_cochain1(&self.lift),
        });
        if let Some(v) = &self.obstruction {
            out["obstruction"] = serde_json::to_value(CochainFile::from_cochain2(v)).expect("serializes");
        }
        if let Some(l) = &self.correction {
            out["correction"] = serde_json::to_value(CochainFile::from_cochain1(l)).expect("serializes");
        }
        out
    }
}

fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::input(format!("correction entry {x} exceeds 64 bits")))
}

fn kernel_rhs(v: &Cochain2) -> Vec<i64> {
    v.values()
        .iter()
        .map(|g| match *g {
            GroupElement::Int(x) => x,
            GroupElement::Residue(x) => x as i64,
            _ => unreachable!("kernel groups are Z or Z/k"),
        })
        .collect()
}

fn triangle_edge_incidence(nerve: &Nerve) -> Result<IntegerMatrix> {
    Ok(crate::cochain::coboundary_matrices(nerve)?.1)
}

/// Solves `δ₁l = v` over the kernel and returns `lift - ι(l)` when possible.
pub fn correct_lift(lift: &Cochain1, v: &Cochain2, hom: &HomSpec) -> Result<LiftResult> {
    let kernel = *hom.require_central()?;
    require_spec(hom.source(), lift.spec())?;
    require_spec(&kernel, v.spec())?;
    if lift.nerve() != v.nerve() {
        return Err(Error::input("obstruction and lift live on different nerves"));
    }
    if v.is_identity() {
        return Ok(LiftResult {
            status: LiftStatus::Strict,
            lift: lift.clone(),
            obstruction: Some(v.clone()),
            correction: None,
            certificate: None,
        });
    }
    let a = triangle_edge_incidence(lift.nerve())?;
    let b = kernel_rhs(v);
    let solved = match kernel.kind() {
        GroupKind::Zmod(k) => solve_mod(&a, &b, k),
        _ => solve_integer(&a, &b),
    };
    let l = match solved {
        IntegerSolution::Solved(x) => x,
        IntegerSolution::Unsolvable(cert) => {
            return Ok(LiftResult {
                status: LiftStatus::Obstructed,
                lift: lift.clone(),
                obstruction: Some(v.clone()),
                correction: None,
                certificate: Some(cert),
            })
        }
    };
    let l_values = l
        .iter()
        .map(|x| {
            Ok(match kernel.kind() {
                GroupKind::Zmod(_) => GroupElement::Residue(big_to_i64(x)? as u64),
                _ => GroupElement::Int(big_to_i64(x)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let correction = Cochain1::new(lift.nerve().clone(), kernel, l_values)?;
    let corrected_values = lift
        .values()
        .iter()
        .zip(correction.values())
        .map(|(r, l)| hom.subtract_kernel(r, l))
        .collect::<Result<Vec<_>>>()?;
    let corrected = Cochain1::new(lift.nerve().clone(), *lift.spec(), corrected_values)?;
    if !check_cocycle(&corrected, Convention::Abg)?.is_ok() {
        return Err(Error::consistency("corrected lift is not a cocycle"));
    }
    Ok(LiftResult {
        status: LiftStatus::CorrectedStrict,
        lift: corrected,
        obstruction: Some(v.clone()),
        correction: Some(correction),
        certificate: None,
    })
}

/// The whole pipeline: preimage, obstruction, correction.
pub fn lift_cocycle(rho: &Cochain1, hom: &HomSpec) -> Result<LiftResult> {
    let raw = set_lift(rho, hom)?;
    let v = obstruction(&raw, hom)?;
    correct_lift(&raw, &v, hom)
}

/// Nearest real representative of a circle value, `(-1/2, 1/2]`.
fn nearest_lift(x: f64) -> f64 {
    if x <= 0.5 {
        x
    } else {
        x - 1.0
    }
}

/// Cycle sums of a real 1-cochain around every fundamental cycle.
pub fn winding_of_lift(lift: &Cochain1) -> Result<Vec<(Cycle, f64)>> {
    require_spec(&GroupSpec::r(), lift.spec())?;
    lift.nerve()
        .fundamental_cycles()
        .into_iter()
        .map(|c| {
            let sum = c.steps().map(|(a, b)| lift.get(a, b).map(|g| g.as_real().expect("real"))).sum::<Result<f64>>()?;
            Ok((c, sum))
        })
        .collect()
}

/// The real lift of a circle cochain by nearest representatives
/// (`+1/2` on the stored orientation).
pub fn nearest_real_lift(rho: &Cochain1) -> Result<Cochain1> {
    require_spec(&GroupSpec::t(), rho.spec())?;
    let spec = GroupSpec::with_eps(GroupKind::R, rho.spec().eps())?;
    rho.map(spec, |g| Ok(GroupElement::Real(nearest_lift(g.as_real().expect("circle")))))
}

/// Rounds each cycle sum after checking it is within `eps` of an integer.
pub fn winding_class_of_lift(lift: &Cochain1) -> Result<Vec<(Cycle, i64)>> {
    let eps = lift.spec().eps();
    winding_of_lift(lift)?
        .into_iter()
        .map(|(c, s)| {
            let k = s.round();
            if (s - k).abs() > eps {
                return Err(Error::consistency(format!(
                    "cycle {:?} has non-integral winding {s}",
                    c.vertices
                )));
            }
            Ok((c, k as i64))
        })
        .collect()
}

/// Integer winding of a circle-valued cochain around each fundamental
/// cycle, using [`nearest_real_lift`].
pub fn winding_class(rho: &Cochain1) -> Result<Vec<(Cycle, i64)>> {
    winding_class_of_lift(&nearest_real_lift(rho)?)
}
