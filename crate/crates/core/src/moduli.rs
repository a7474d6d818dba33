//! Isotropic linear elasticity of the intact material.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::tensor::SymTensor;

pub type Mat6<T> = [[T; 6]; 6];
pub type Mat3<T> = [[T; 3]; 3];

pub fn mat6_zero<T: Real>() -> Mat6<T> {
    [[T::zero(); 6]; 6]
}

pub fn mat6_vec<T: Real>(m: &Mat6<T>, v: &[T; 6]) -> [T; 6] {
    let mut out = [T::zero(); 6];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| *a * *b).sum();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticModuli<T> {
    pub young: T,
    pub poisson: T,
    pub bulk: T,
    pub shear: T,
}

impl<T: Real> ElasticModuli<T> {
    pub fn new(young: T, poisson: T) -> Result<Self> {
        if !(young > T::zero()) || !young.is_finite() {
            return Err(Error::Parameter { field: "E", reason: format!("must be positive, got {young}") });
        }
        if !(poisson > -T::one() && poisson < T::lit(0.5)) {
            return Err(Error::Parameter { field: "nu", reason: format!("must lie in (-1, 0.5), got {poisson}") });
        }
        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        Ok(Self {
            young,
            poisson,
            bulk: young / (three * (one - two * poisson)),
            shear: young / (two * (one + poisson)),
        })
    }

    /// Lamé's first parameter.
    pub fn lambda(&self) -> T {
        self.bulk - T::lit(2.0) / T::lit(3.0) * self.shear
    }

    /// `D̃` in Voigt form acting on engineering-shear strain vectors.
    pub fn stiffness(&self) -> Mat6<T> {
        let (l, g) = (self.lambda(), self.shear);
        let mut d = mat6_zero();
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = l;
            }
            d[i][i] = l + T::lit(2.0) * g;
            d[i + 3][i + 3] = g;
        }
        d
    }

    /// `D̃₃₃`, the out-of-plane normal stiffness.
    pub fn d33(&self) -> T {
        self.lambda() + T::lit(2.0) * self.shear
    }

    /// `D̃ : ε`.
    pub fn stress(&self, strain: &SymTensor<T>) -> SymTensor<T> {
        let (p, e) = strain.vol_dev_split();
        SymTensor::identity().scale(T::lit(3.0) * self.bulk * p) + e.scale(T::lit(2.0) * self.shear)
    }

    /// `D̃⁻¹ : σ`.
    pub fn strain(&self, stress: &SymTensor<T>) -> SymTensor<T> {
        let (p, s) = stress.vol_dev_split();
        SymTensor::identity().scale(p / (T::lit(3.0) * self.bulk)) + s.scale(T::one() / (T::lit(2.0) * self.shear))
    }

    /// Plane-stress condensed stiffness acting on `[e11, e22, gamma12]`.
    pub fn plane_stress_stiffness(&self) -> Mat3<T> {
        let (e, nu) = (self.young, self.poisson);
        let f = e / (T::one() - nu * nu);
        let z = T::zero();
        [[f, f * nu, z], [f * nu, f, z], [z, z, self.shear]]
    }
}
