use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `w + x i + y j + z k` with `i² = j² = k² = ijk = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `|x|² = x x*`.
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn modulus(self) -> f64 {
        // hypot chain keeps tiny and huge components from under/overflowing
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `x⁻¹ = x* / |x|²`, `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self.conj().scale(1.0 / n))
        }
    }

    pub fn normalized(self) -> Option<Self> {
        let m = self.modulus();
        (m > 0.0 && m.is_finite()).then(|| self.scale(1.0 / m))
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.w, self.x, self.y, self.z)
    }
}
