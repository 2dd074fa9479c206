//! Minimal Cl(2,0) kernel.
//!
//! Basis `{1, e1, e2, i = e1 e2}` with `e1² = e2² = 1` and `e1 e2 = -e2 e1`, so
//! `i² = -1`. The even subalgebra `{1, i}` is the complex plane ([`ComplexAmp`]),
//! and vectors are bridged to it through left multiplication by `e1`:
//! `v = e1 (x + i y) = x e1 + y e2`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// General element `s + x e1 + y e2 + b i`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Multivector {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub b: f64,
}

/// Scalar + bivector element, i.e. a complex number `re + im i`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexAmp {
    pub re: f64,
    pub im: f64,
}

/// Grade-1 element `x e1 + y e2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Multivector {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const I: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(s: f64, x: f64, y: f64, b: f64) -> Self {
        Self { s, x, y, b }
    }

    /// Geometric product `self * rhs`.
    #[inline]
    pub fn gp(self, rhs: Self) -> Self {
        let (a, c) = (self, rhs);
        Self {
            s: a.s * c.s + a.x * c.x + a.y * c.y - a.b * c.b,
            x: a.s * c.x + a.x * c.s - a.y * c.b + a.b * c.y,
            y: a.s * c.y + a.y * c.s + a.x * c.b - a.b * c.x,
            b: a.s * c.b + a.b * c.s + a.x * c.y - a.y * c.x,
        }
    }

    pub fn scalar_part(self) -> Self {
        Self::new(self.s, 0.0, 0.0, 0.0)
    }

    pub fn vector_part(self) -> Self {
        Self::new(0.0, self.x, self.y, 0.0)
    }

    pub fn bivector_part(self) -> Self {
        Self::new(0.0, 0.0, 0.0, self.b)
    }

    /// Grade projection for grades 0, 1, 2; anything else is zero.
    pub fn grade(self, k: u8) -> Self {
        match k {
            0 => self.scalar_part(),
            1 => self.vector_part(),
            2 => self.bivector_part(),
            _ => Self::default(),
        }
    }

    /// Reverse: flips the sign of the bivector part.
    pub fn reverse(self) -> Self {
        Self::new(self.s, self.x, self.y, -self.b)
    }

    /// The vector part, failing if any scalar or bivector component is set.
    pub fn as_vector(self) -> Result<Vec2> {
        if self.s != 0.0 || self.b != 0.0 {
            return Err(Error::GradeMismatch {
                expected: "vector",
                found: "scalar/bivector",
            });
        }
        Ok(Vec2::new(self.x, self.y))
    }

    /// The even part, failing if any vector component is set.
    pub fn as_even(self) -> Result<ComplexAmp> {
        if self.x != 0.0 || self.y != 0.0 {
            return Err(Error::GradeMismatch {
                expected: "scalar+bivector",
                found: "vector",
            });
        }
        Ok(ComplexAmp::new(self.s, self.b))
    }

    /// Inverse of a homogeneous element (pure vector or pure even element).
    /// Mixed odd/even elements are rejected rather than projected.
    pub fn inverse(self) -> Result<Self> {
        if let Ok(v) = self.as_vector() {
            return v.inverse().map(Self::from);
        }
        if let Ok(c) = self.as_even() {
            return c.inverse().map(Self::from);
        }
        Err(Error::GradeMismatch {
            expected: "vector or scalar+bivector",
            found: "mixed odd and even",
        })
    }

    pub fn is_finite(self) -> bool {
        self.s.is_finite() && self.x.is_finite() && self.y.is_finite() && self.b.is_finite()
    }
}

impl Add for Multivector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.s + rhs.s,
            self.x + rhs.x,
            self.y + rhs.y,
            self.b + rhs.b,
        )
    }
}

impl Sub for Multivector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.s - rhs.s,
            self.x - rhs.x,
            self.y - rhs.y,
            self.b - rhs.b,
        )
    }
}

impl Mul for Multivector {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.gp(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.s * k, self.x * k, self.y * k, self.b * k)
    }
}

impl From<Vec2> for Multivector {
    fn from(v: Vec2) -> Self {
        Self::new(0.0, v.x, v.y, 0.0)
    }
}

impl From<ComplexAmp> for Multivector {
    fn from(c: ComplexAmp) -> Self {
        Self::new(c.re, 0.0, 0.0, c.im)
    }
}

impl ComplexAmp {
    pub const ZERO: Self = Self::new(0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0);
    /// The unit bivector `i = e1 e2`.
    pub const I: Self = Self::new(0.0, 1.0);

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn from_polar(r: f64, phase: f64) -> Self {
        let (s, c) = phase.sin_cos();
        Self::new(r * c, r * s)
    }

    /// Conjugation acts on the bivector coefficient only.
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `c* c`, always a nonnegative scalar.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for ComplexAmp {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ComplexAmp {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for ComplexAmp {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ComplexAmp {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for ComplexAmp {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for ComplexAmp {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Mul<ComplexAmp> for f64 {
    type Output = ComplexAmp;
    #[inline]
    fn mul(self, c: ComplexAmp) -> ComplexAmp {
        c.scale(self)
    }
}

impl std::iter::Sum for ComplexAmp {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl Vec2 {
    pub const E1: Self = Self::new(1.0, 0.0);
    pub const E2: Self = Self::new(0.0, 1.0);

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// `v⁻¹ = v / |v|²`, so that `v v⁻¹ = 1`.
    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self::new(self.x / n, self.y / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Vec2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// Geometric product of two multivectors.
pub fn gp(a: Multivector, b: Multivector) -> Multivector {
    a.gp(b)
}

/// Scalar part of `ab`: `a1 b1 + a2 b2`.
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a.x * b.x + a.y * b.y
}

/// Bivector coefficient of `ab`: `a1 b2 - a2 b1`.
pub fn wedge(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// `e1 v`, the complex number whose e1-bridge is `v`.
pub fn complex_of(v: Vec2) -> ComplexAmp {
    ComplexAmp::new(v.x, v.y)
}

/// `e1 c`, the vector carried by the complex amplitude `c`.
pub fn vec_of(c: ComplexAmp) -> Vec2 {
    Vec2::new(c.re, c.im)
}

/// Euler rotor `e^{iφ}`.
pub fn rotor(phi: f64) -> ComplexAmp {
    let (s, c) = phi.sin_cos();
    ComplexAmp::new(c, s)
}

/// Counterclockwise rotation by `phi`: `e1 (e1 v) e^{iφ}`.
pub fn rotate(v: Vec2, phi: f64) -> Vec2 {
    vec_of(complex_of(v) * rotor(phi))
}
