//! Symmetric second-order tensors in three dimensions.
//!
//! Components are stored as true tensor components `(11, 22, 33, 12, 13, 23)`.
//! Voigt vectors use the same ordering; strains are converted with engineering
//! shear (`gamma_12 = 2 eps_12`) and stresses with plain components, so that
//! `stress_voigt = D * strain_voigt` holds for the 6x6 elastic operator.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

pub type Vec3<T> = [T; 3];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor<T> {
    pub xx: T,
    pub yy: T,
    pub zz: T,
    pub xy: T,
    pub xz: T,
    pub yz: T,
}

impl<T: Real> SymTensor<T> {
    pub fn new(xx: T, yy: T, zz: T, xy: T, xz: T, yz: T) -> Self {
        Self { xx, yy, zz, xy, xz, yz }
    }

    pub fn zero() -> Self {
        let z = T::zero();
        Self::new(z, z, z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self::new(a, b, c, z, z, z)
    }

    /// Builds from a full 3x3 matrix, using the upper triangle.
    pub fn from_matrix(m: &[[T; 3]; 3]) -> Self {
        Self::new(m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2])
    }

    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        [[self.xx, self.xy, self.xz], [self.xy, self.yy, self.yz], [self.xz, self.yz, self.zz]]
    }

    /// `n ⊗ n`.
    pub fn dyad(n: &Vec3<T>) -> Self {
        Self::new(n[0] * n[0], n[1] * n[1], n[2] * n[2], n[0] * n[1], n[0] * n[2], n[1] * n[2])
    }

    /// Component accessor by Voigt index `0..6`.
    pub fn component(&self, i: usize) -> T {
        self.as_array()[i]
    }

    pub fn as_array(&self) -> [T; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    pub fn from_array(a: [T; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    /// Voigt vector of a strain (engineering shear).
    pub fn to_strain_voigt(&self) -> [T; 6] {
        let two = T::lit(2.0);
        [self.xx, self.yy, self.zz, two * self.xy, two * self.xz, two * self.yz]
    }

    pub fn from_strain_voigt(v: &[T; 6]) -> Self {
        let half = T::lit(0.5);
        Self::new(v[0], v[1], v[2], half * v[3], half * v[4], half * v[5])
    }

    /// Voigt vector of a stress (plain components).
    pub fn to_stress_voigt(&self) -> [T; 6] {
        self.as_array()
    }

    pub fn from_stress_voigt(v: &[T; 6]) -> Self {
        Self::from_array(*v)
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy + self.zz
    }

    /// Double contraction `a : b`.
    pub fn contract(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        self.xx * other.xx
            + self.yy * other.yy
            + self.zz * other.zz
            + two * (self.xy * other.xy + self.xz * other.xz + self.yz * other.yz)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.contract(self).sqrt()
    }

    pub fn max_abs_component(&self) -> T {
        self.as_array().iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.as_array().iter().all(|c| *c == T::zero())
    }

    pub fn scale(&self, a: T) -> Self {
        Self::from_array(self.as_array().map(|c| c * a))
    }

    /// Mean (hydrostatic) part `tr(t) / 3`.
    pub fn mean(&self) -> T {
        self.trace() / T::lit(3.0)
    }

    /// Deviatoric part `t - tr(t)/3 I`.
    pub fn dev(&self) -> Self {
        self.vol_dev_split().1
    }

    /// Splits into the mean value `p = tr(t)/3` and the deviator `s = t - p I`.
    pub fn vol_dev_split(&self) -> (T, Self) {
        let p = self.mean();
        (p, Self::new(self.xx - p, self.yy - p, self.zz - p, self.xy, self.xz, self.yz))
    }

    /// `nᵀ t n` without checking that `n` is normalized.
    pub fn quad_form(&self, n: &Vec3<T>) -> T {
        let two = T::lit(2.0);
        self.xx * n[0] * n[0]
            + self.yy * n[1] * n[1]
            + self.zz * n[2] * n[2]
            + two * (self.xy * n[0] * n[1] + self.xz * n[0] * n[2] + self.yz * n[1] * n[2])
    }

    /// `nᵀ t n` for a unit vector `n`.
    pub fn normal_projection(&self, n: &Vec3<T>) -> Result<T> {
        let len = norm3(n);
        if !len.is_finite() || (len - T::one()).abs() > T::lit(1e-10).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::InvalidInput(format!("projection direction must be a unit vector (|n| = {})", len)));
        }
        Ok(self.quad_form(n))
    }

    pub fn invariants(&self) -> Invariants<T> {
        let (p, s) = self.vol_dev_split();
        let j2 = T::lit(0.5) * s.contract(&s);
        Invariants { i1: self.trace(), j2, p, q: (T::lit(3.0) * j2).sqrt() }
    }

    pub fn cast<U: Real>(&self) -> SymTensor<U> {
        SymTensor::from_array(self.as_array().map(|c| U::lit(c.to_f64_lossy())))
    }
}

/// Stress invariants: `I1`, `J2`, mean stress `p = I1/3` and von Mises stress `q = sqrt(3 J2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants<T> {
    pub i1: T,
    pub j2: T,
    pub p: T,
    pub q: T,
}

pub fn norm3<T: Real>(v: &Vec3<T>) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn dot3<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl<T: Real> Add for SymTensor<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.xx + o.xx, self.yy + o.yy, self.zz + o.zz, self.xy + o.xy, self.xz + o.xz, self.yz + o.yz)
    }
}

impl<T: Real> Sub for SymTensor<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.xx - o.xx, self.yy - o.yy, self.zz - o.zz, self.xy - o.xy, self.xz - o.xz, self.yz - o.yz)
    }
}

impl<T: Real> AddAssign for SymTensor<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for SymTensor<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for SymTensor<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for SymTensor<T> {
    type Output = Self;
    fn mul(self, a: T) -> Self {
        self.scale(a)
    }
}
