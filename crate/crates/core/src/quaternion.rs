//! Quaternion scalars over f64.
//!
//! A quaternion `q = w + x·i + y·j + z·k` follows the Hamilton rules
//! `i² = j² = k² = ijk = -1`, `ij = -ji = k`, `jk = -kj = i`,
//! `ki = -ik = j`. Multiplication is not commutative.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A quaternion scalar with double precision components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    /// Real part.
    pub w: f64,
    /// i coefficient.
    pub x: f64,
    /// j coefficient.
    pub y: f64,
    /// k coefficient.
    pub z: f64,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn one() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn i() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0)
    }

    pub const fn j() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0)
    }

    pub const fn k() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0)
    }

    /// Embed a real scalar.
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Pure quaternion `0 + x·i + y·j + z·k`.
    pub const fn pure(x: f64, y: f64, z: f64) -> Self {
        Self::new(0.0, x, y, z)
    }

    /// True when the real part is exactly zero.
    pub fn is_pure(&self) -> bool {
        self.w == 0.0
    }

    /// `q* = w - x·i - y·j - z·k`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Squared modulus `w² + x² + y² + z²`.
    pub fn modulus_sq(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus `|q| = sqrt(q q*)`.
    pub fn modulus(&self) -> f64 {
        self.modulus_sq().sqrt()
    }

    /// Multiplicative inverse `q* / |q|²`, or `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.modulus_sq();
        if n == 0.0 {
            return None;
        }
        let c = self.conjugate();
        Some(Self::new(c.w / n, c.x / n, c.y / n, c.z / n))
    }

    /// Scale all four components by a real factor.
    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        *self = *self - rhs;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product. The 16-term expansion keeps the left factor on the
/// left; `p * q != q * p` in general.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:+.6}{:+.6}i{:+.6}j{:+.6}k",
            self.w, self.x, self.y, self.z
        )
    }
}
