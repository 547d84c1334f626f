//! Coefficient groups and their elements.
//!
//! The tag set is closed: integers, residues, reals, the circle `R/Z`,
//! signs, quaternions (unit or nonzero) and invertible real matrices.
//! Elements are plain values; all arithmetic goes through the
//! [`GroupSpec`] they belong to, which also fixes the equality tolerance
//! for the continuous groups.

mod norm;
mod quaternion;

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lift::HomSpec;

pub use norm::norm_p;
pub use quaternion::Quaternion;

/// Default equality tolerance for the continuous groups.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Matrices with `|det|` at or below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Z,
    Zmod(u64),
    R,
    T,
    Sign,
    UnitQuaternion,
    QuaternionNonzero,
    GL(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupSpec {
    kind: GroupKind,
    eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Int(i64),
    Residue(u64),
    Real(f64),
    /// Canonical representative in `[0, 1)`.
    Circle(f64),
    Sign(Sign),
    Quat(Quaternion),
    Matrix(DMatrix<f64>),
}

impl GroupElement {
    pub fn as_int(&self) -> Option<i64> {
        match *self {
            GroupElement::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match *self {
            GroupElement::Real(v) | GroupElement::Circle(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match *self {
            GroupElement::Residue(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_quat(&self) -> Option<Quaternion> {
        match *self {
            GroupElement::Quat(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            GroupElement::Int(_) => "integer",
            GroupElement::Residue(_) => "residue",
            GroupElement::Real(_) => "real",
            GroupElement::Circle(_) => "circle",
            GroupElement::Sign(_) => "sign",
            GroupElement::Quat(_) => "quaternion",
            GroupElement::Matrix(_) => "matrix",
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(v) => write!(f, "{v}"),
            GroupElement::Residue(v) => write!(f, "{v}"),
            GroupElement::Real(v) | GroupElement::Circle(v) => write!(f, "{v}"),
            GroupElement::Sign(s) => write!(f, "{:+}", s.value()),
            GroupElement::Quat(q) => write!(f, "{q}"),
            GroupElement::Matrix(m) => {
                let rows: Vec<String> = m
                    .row_iter()
                    .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
                    .collect();
                write!(f, "[[{}]]", rows.join("], ["))
            }
        }
    }
}

/// Reduces a real to its representative in `[0, 1)`.
pub fn circle_rep(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `min(|a - b|, 1 - |a - b|)` on representatives.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = circle_rep(a - b);
    d.min(1.0 - d)
}

impl GroupSpec {
    pub fn new(kind: GroupKind) -> Result<Self> {
        Self::with_eps(kind, DEFAULT_EPS)
    }

    pub fn with_eps(kind: GroupKind, eps: f64) -> Result<Self> {
        match kind {
            GroupKind::Zmod(n) if n < 2 => return Err(Error::input(format!("Z/n needs n >= 2, got {n}"))),
            GroupKind::GL(0) => return Err(Error::input("GL(n) needs n >= 1")),
            _ => {}
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::input(format!("tolerance must be positive, got {eps}")));
        }
        Ok(GroupSpec { kind, eps })
    }

    pub fn z() -> Self {
        GroupSpec { kind: GroupKind::Z, eps: DEFAULT_EPS }
    }

    pub fn zmod(n: u64) -> Result<Self> {
        Self::new(GroupKind::Zmod(n))
    }

    pub fn r() -> Self {
        GroupSpec { kind: GroupKind::R, eps: DEFAULT_EPS }
    }

    pub fn t() -> Self {
        GroupSpec { kind: GroupKind::T, eps: DEFAULT_EPS }
    }

    pub fn sign() -> Self {
        GroupSpec { kind: GroupKind::Sign, eps: DEFAULT_EPS }
    }

    pub fn unit_quaternion() -> Self {
        GroupSpec { kind: GroupKind::UnitQuaternion, eps: DEFAULT_EPS }
    }

    pub fn quaternion_nonzero() -> Self {
        GroupSpec { kind: GroupKind::QuaternionNonzero, eps: DEFAULT_EPS }
    }

    pub fn gl(n: usize) -> Result<Self> {
        Self::new(GroupKind::GL(n))
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn abelian(&self) -> bool {
        matches!(self.kind, GroupKind::Z | GroupKind::Zmod(_) | GroupKind::R | GroupKind::T | GroupKind::Sign)
    }

    /// Whether equality is exact (no tolerance involved).
    pub fn discrete(&self) -> bool {
        matches!(self.kind, GroupKind::Z | GroupKind::Zmod(_) | GroupKind::Sign)
    }

    pub fn name(&self) -> String {
        match self.kind {
            GroupKind::Z => "Z".into(),
            GroupKind::Zmod(n) => format!("Z/{n}"),
            GroupKind::R => "R".into(),
            GroupKind::T => "T".into(),
            GroupKind::Sign => "Sign".into(),
            GroupKind::UnitQuaternion => "UnitQuaternion".into(),
            GroupKind::QuaternionNonzero => "QuaternionNonzero".into(),
            GroupKind::GL(n) => format!("GL({n})"),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Z => GroupElement::Int(0),
            GroupKind::Zmod(_) => GroupElement::Residue(0),
            GroupKind::R => GroupElement::Real(0.0),
            GroupKind::T => GroupElement::Circle(0.0),
            GroupKind::Sign => GroupElement::Sign(Sign::Plus),
            GroupKind::UnitQuaternion | GroupKind::QuaternionNonzero => GroupElement::Quat(Quaternion::ONE),
            GroupKind::GL(n) => GroupElement::Matrix(DMatrix::identity(n, n)),
        }
    }

    fn mismatch(&self, g: &GroupElement) -> Error {
        Error::GroupMismatch { expected: self.name(), found: g.tag().into() }
    }

    /// Checks that `g` is a well-formed element of this group.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        match (self.kind, g) {
            (GroupKind::Z, GroupElement::Int(_)) | (GroupKind::Sign, GroupElement::Sign(_)) => Ok(()),
            (GroupKind::Zmod(n), GroupElement::Residue(r)) if *r < n => Ok(()),
            (GroupKind::R, GroupElement::Real(x)) if x.is_finite() => Ok(()),
            (GroupKind::T, GroupElement::Circle(x)) if (0.0..1.0).contains(x) => Ok(()),
            (GroupKind::UnitQuaternion, GroupElement::Quat(q)) => {
                if (q.modulus() - 1.0).abs() <= self.eps {
                    Ok(())
                } else {
                    Err(Error::input(format!("quaternion {q} is not of unit modulus")))
                }
            }
            (GroupKind::QuaternionNonzero, GroupElement::Quat(q)) => {
                if q.modulus() > self.eps {
                    Ok(())
                } else {
                    Err(Error::Singular(format!("quaternion {q} is zero")))
                }
            }
            (GroupKind::GL(n), GroupElement::Matrix(m)) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::input(format!("expected a {n}x{n} matrix, got {}x{}", m.nrows(), m.ncols())));
                }
                let det = m.determinant();
                if det.abs() > SINGULAR_DET {
                    Ok(())
                } else {
                    Err(Error::Singular(format!("matrix determinant {det} is not invertible")))
                }
            }
            _ => Err(self.mismatch(g)),
        }
    }

    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        use GroupElement as E;
        Ok(match (self.kind, a, b) {
            (GroupKind::Z, E::Int(x), E::Int(y)) => {
                E::Int(x.checked_add(*y).ok_or_else(|| Error::input("integer overflow"))?)
            }
            (GroupKind::Zmod(n), E::Residue(x), E::Residue(y)) => {
                E::Residue(((*x as u128 + *y as u128) % n as u128) as u64)
            }
            (GroupKind::R, E::Real(x), E::Real(y)) => E::Real(x + y),
            (GroupKind::T, E::Circle(x), E::Circle(y)) => E::Circle(circle_rep(x + y)),
            (GroupKind::Sign, E::Sign(x), E::Sign(y)) => E::Sign(x.mul(*y)),
            (GroupKind::UnitQuaternion | GroupKind::QuaternionNonzero, E::Quat(x), E::Quat(y)) => E::Quat(*x * *y),
            (GroupKind::GL(n), E::Matrix(x), E::Matrix(y)) if x.nrows() == n && y.nrows() == n => E::Matrix(x * y),
            _ => return Err(self.mismatch(if self.validate(a).is_err() { a } else { b })),
        })
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        use GroupElement as E;
        Ok(match (self.kind, a) {
            (GroupKind::Z, E::Int(x)) => E::Int(x.checked_neg().ok_or_else(|| Error::input("integer overflow"))?),
            (GroupKind::Zmod(n), E::Residue(x)) => E::Residue((n - x % n) % n),
            (GroupKind::R, E::Real(x)) => E::Real(-x),
            (GroupKind::T, E::Circle(x)) => E::Circle(circle_rep(-x)),
            (GroupKind::Sign, E::Sign(s)) => E::Sign(*s),
            (GroupKind::UnitQuaternion | GroupKind::QuaternionNonzero, E::Quat(q)) => {
                E::Quat(q.inverse().ok_or_else(|| Error::Singular("zero quaternion has no inverse".into()))?)
            }
            (GroupKind::GL(_), E::Matrix(m)) => {
                let lu = m.clone().lu();
                if lu.determinant().abs() <= SINGULAR_DET {
                    return Err(Error::Singular("matrix is not invertible".into()));
                }
                E::Matrix(lu.try_inverse().ok_or_else(|| Error::Singular("matrix is not invertible".into()))?)
            }
            _ => return Err(self.mismatch(a)),
        })
    }

    /// `a · b⁻¹`.
    pub fn op_inv(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.op(a, &self.inverse(b)?)
    }

    /// `a⁻¹ · b`.
    pub fn inv_op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.op(&self.inverse(a)?, b)
    }

    /// Distance used for tolerance checks: `0/1` on discrete groups, circle
    /// distance on `T`, max entry difference on quaternions and matrices.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> Result<f64> {
        use GroupElement as E;
        let exact = |same: bool| if same { 0.0 } else { 1.0 };
        Ok(match (a, b) {
            (E::Int(x), E::Int(y)) => exact(x == y),
            (E::Residue(x), E::Residue(y)) => exact(x == y),
            (E::Sign(x), E::Sign(y)) => exact(x == y),
            (E::Real(x), E::Real(y)) => (x - y).abs(),
            (E::Circle(x), E::Circle(y)) => circle_distance(*x, *y),
            (E::Quat(x), E::Quat(y)) => x.max_abs_diff(*y),
            (E::Matrix(x), E::Matrix(y)) if x.shape() == y.shape() => (x - y).amax(),
            _ => return Err(self.mismatch(if self.validate(a).is_err() { a } else { b })),
        })
    }

    pub fn approx_eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        match self.distance(a, b) {
            Ok(d) if self.discrete() => d == 0.0,
            Ok(d) => d <= self.eps,
            Err(_) => false,
        }
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        self.approx_eq(a, &self.identity())
    }

    /// Parses a JSON element: integers, reals, `±1`, 4-tuples, or
    /// row-major matrices (nested rows or one flat list).
    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        let bad = || Error::input(format!("{v} is not an element of {}", self.name()));
        let real = |v: &Value| v.as_f64().filter(|x| x.is_finite()).ok_or_else(bad);
        let elem = match self.kind {
            GroupKind::Z => GroupElement::Int(v.as_i64().ok_or_else(bad)?),
            GroupKind::Zmod(n) => {
                let x = v.as_i64().ok_or_else(bad)?;
                GroupElement::Residue(x.rem_euclid(n as i64) as u64)
            }
            GroupKind::R => GroupElement::Real(real(v)?),
            GroupKind::T => GroupElement::Circle(circle_rep(real(v)?)),
            GroupKind::Sign => match v.as_i64() {
                Some(1) => GroupElement::Sign(Sign::Plus),
                Some(-1) => GroupElement::Sign(Sign::Minus),
                _ => return Err(bad()),
            },
            GroupKind::UnitQuaternion | GroupKind::QuaternionNonzero => {
                let parts = v.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
                let mut q = [0.0; 4];
                for (slot, p) in q.iter_mut().zip(parts) {
                    *slot = real(p)?;
                }
                GroupElement::Quat(Quaternion::from_array(q))
            }
            GroupKind::GL(n) => {
                let outer = v.as_array().ok_or_else(bad)?;
                let flat: Vec<&Value> = if outer.len() == n && outer.iter().all(Value::is_array) {
                    let mut flat = Vec::with_capacity(n * n);
                    for row in outer {
                        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(bad)?;
                        flat.extend(row);
                    }
                    flat
                } else if outer.len() == n * n {
                    outer.iter().collect()
                } else {
                    return Err(bad());
                };
                let entries = flat.into_iter().map(real).collect::<Result<Vec<_>>>()?;
                GroupElement::Matrix(DMatrix::from_row_slice(n, n, &entries))
            }
        };
        self.validate(&elem)?;
        Ok(elem)
    }

    pub fn element_to_json(&self, g: &GroupElement) -> Value {
        match g {
            GroupElement::Int(v) => json!(v),
            GroupElement::Residue(v) => json!(v),
            GroupElement::Real(v) | GroupElement::Circle(v) => json!(v),
            GroupElement::Sign(s) => json!(s.value()),
            GroupElement::Quat(q) => json!(q.to_array()),
            GroupElement::Matrix(m) => {
                Value::Array(m.row_iter().map(|r| json!(r.iter().copied().collect::<Vec<f64>>())).collect())
            }
        }
    }

    /// A random element; continuous groups draw well-conditioned values.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self.kind {
            GroupKind::Z => GroupElement::Int(rng.random_range(-50..=50)),
            GroupKind::Zmod(n) => GroupElement::Residue(rng.random_range(0..n)),
            GroupKind::R => GroupElement::Real(rng.random_range(-10.0..10.0)),
            GroupKind::T => GroupElement::Circle(rng.random_range(0.0..1.0)),
            GroupKind::Sign => GroupElement::Sign(if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus }),
            GroupKind::UnitQuaternion => loop {
                let q = random_quaternion(rng);
                if let Some(u) = q.normalized().filter(|_| q.modulus() > 1e-3) {
                    break GroupElement::Quat(u);
                }
            },
            GroupKind::QuaternionNonzero => loop {
                let q = random_quaternion(rng);
                if q.modulus() > 0.1 {
                    break GroupElement::Quat(q);
                }
            },
            GroupKind::GL(n) => loop {
                // identity plus a small perturbation stays well conditioned
                let m = DMatrix::from_fn(n, n, |i, j| {
                    let base = if i == j { 1.0 } else { 0.0 };
                    base + rng.random_range(-0.45..0.45) / n as f64
                });
                if m.determinant().abs() > 0.1 {
                    break GroupElement::Matrix(m);
                }
            },
        }
    }
}

fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

/// Applies a homomorphism to an element of its source group.
pub fn hom_apply(hom: &HomSpec, g: &GroupElement) -> Result<GroupElement> {
    hom.apply(g)
}

#[derive(Serialize, Deserialize)]
struct GroupSpecFile {
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
}

impl GroupSpec {
    fn from_file(file: GroupSpecFile) -> Result<Self> {
        let need_n = || file.n.ok_or_else(|| Error::input(format!("group {} needs \"n\"", file.group)));
        let kind = match file.group.as_str() {
            "Z" => GroupKind::Z,
            "Zmod" => GroupKind::Zmod(need_n()?),
            "R" => GroupKind::R,
            "T" => GroupKind::T,
            "Sign" => GroupKind::Sign,
            "UnitQuaternion" => GroupKind::UnitQuaternion,
            "QuaternionNonzero" => GroupKind::QuaternionNonzero,
            "GL" => GroupKind::GL(need_n()? as usize),
            other => return Err(Error::input(format!("unknown group {other:?}"))),
        };
        GroupSpec::with_eps(kind, file.eps.unwrap_or(DEFAULT_EPS))
    }

    fn to_file(self) -> GroupSpecFile {
        let (group, n) = match self.kind {
            GroupKind::Z => ("Z", None),
            GroupKind::Zmod(n) => ("Zmod", Some(n)),
            GroupKind::R => ("R", None),
            GroupKind::T => ("T", None),
            GroupKind::Sign => ("Sign", None),
            GroupKind::UnitQuaternion => ("UnitQuaternion", None),
            GroupKind::QuaternionNonzero => ("QuaternionNonzero", None),
            GroupKind::GL(n) => ("GL", Some(n as u64)),
        };
        let eps = (!self.discrete()).then_some(self.eps);
        GroupSpecFile { group: group.into(), n, eps }
    }

    /// Parses the compact command-line form: `z`, `zmod:5`, `r`, `t`,
    /// `sign`, `unit-quaternion`, `quaternion`, `gl:3`.
    pub fn parse_short(text: &str) -> Result<Self> {
        let lower = text.to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (lower.as_str(), None),
        };
        let num = || {
            arg.and_then(|a| a.parse::<u64>().ok())
                .ok_or_else(|| Error::input(format!("group {text:?} needs a numeric argument")))
        };
        let kind = match head {
            "z" => GroupKind::Z,
            "zmod" | "z/n" => GroupKind::Zmod(num()?),
            "r" => GroupKind::R,
            "t" => GroupKind::T,
            "sign" => GroupKind::Sign,
            "unit-quaternion" | "unitquaternion" => GroupKind::UnitQuaternion,
            "quaternion" | "quaternionnonzero" => GroupKind::QuaternionNonzero,
            "gl" => GroupKind::GL(num()? as usize),
            _ => return Err(Error::input(format!("unknown group {text:?}"))),
        };
        GroupSpec::new(kind)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GroupSpec::from_file(GroupSpecFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
