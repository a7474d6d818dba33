//! Material parameters and the per-point constants derived from the crack band width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::num::Real;

/// Units: MPa, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams<T> {
    /// Young's modulus `E`.
    pub young: T,
    /// Poisson's ratio `ν`.
    pub poisson: T,
    /// Tensile yield stress `σ_y`.
    pub yield_stress: T,
    /// Fracture energy `G_f` (MPa·mm).
    pub fracture_energy: T,
    /// Dilation constant `β` of the flow potential.
    pub dilation: T,
    /// Critical damage `d_c` at which the discontinuity strain is mobilized.
    pub critical_damage: T,
}

impl<T: Real> MaterialParams<T> {
    /// Concrete of the center-notched three-point bending beam.
    pub fn center_notched_beam() -> Self {
        Self::from_f64(54000.0, 0.2, 7.2, 0.075, 0.2, 0.35)
    }

    /// Concrete of the off center-notched (mixed-mode) beam.
    pub fn off_center_notched_beam() -> Self {
        Self::from_f64(34000.0, 0.2, 4.0, 0.09, 0.2, 0.4)
    }

    /// Concrete of the L-shaped panel.
    pub fn l_shaped_panel() -> Self {
        Self::from_f64(22500.0, 0.2, 2.3, 0.09, 0.2, 0.4)
    }

    pub fn from_f64(
        young: f64,
        poisson: f64,
        yield_stress: f64,
        fracture_energy: f64,
        dilation: f64,
        critical_damage: f64,
    ) -> Self {
        Self {
            young: T::lit(young),
            poisson: T::lit(poisson),
            yield_stress: T::lit(yield_stress),
            fracture_energy: T::lit(fracture_energy),
            dilation: T::lit(dilation),
            critical_damage: T::lit(critical_damage),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ElasticModuli::new(self.young, self.poisson)?;
        let positive = [("sigma_y", self.yield_stress), ("G_f", self.fracture_energy)];
        for (field, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Parameter { field, reason: format!("must be positive and finite, got {v}") });
            }
        }
        if !(self.dilation >= T::zero()) || !self.dilation.is_finite() {
            return Err(Error::Parameter {
                field: "beta",
                reason: format!("must be non-negative, got {}", self.dilation),
            });
        }
        if !(self.critical_damage > T::zero() && self.critical_damage < T::one()) {
            return Err(Error::Parameter {
                field: "d_c",
                reason: format!("must lie in (0, 1), got {}", self.critical_damage),
            });
        }
        Ok(())
    }

    pub fn moduli(&self) -> Result<ElasticModuli<T>> {
        ElasticModuli::new(self.young, self.poisson)
    }

    /// Upper bound `2 E G_f / σ_y²` on the characteristic length.
    pub fn length_bound(&self) -> T {
        T::lit(2.0) * self.young * self.fracture_energy / (self.yield_stress * self.yield_stress)
    }

    pub fn cast<U: Real>(&self) -> MaterialParams<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        MaterialParams {
            young: c(self.young),
            poisson: c(self.poisson),
            yield_stress: c(self.yield_stress),
            fracture_energy: c(self.fracture_energy),
            dilation: c(self.dilation),
            critical_damage: c(self.critical_damage),
        }
    }
}

/// Damage growth constant `α` making the 1D dissipation equal `G_f / ℓ`.
pub fn derive_alpha<T: Real>(params: &MaterialParams<T>, length: T) -> Result<T> {
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::InvalidInput(format!("length scale must be positive, got {length}")));
    }
    let (e, sy, gf) = (params.young, params.yield_stress, params.fracture_energy);
    let two = T::lit(2.0);
    let denominator = two * e * gf - length * sy * sy;
    if !(denominator > T::zero()) {
        return Err(Error::LengthScale { length: length.to_f64_lossy(), bound: params.length_bound().to_f64_lossy() });
    }
    Ok(two * e * length * sy / denominator)
}

/// Internal variable `k_c = -ln(1 - d_c) / α` at critical damage.
pub fn derive_kc<T: Real>(alpha: T, critical_damage: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(critical_damage > T::zero() && critical_damage < T::one()) {
        return Err(Error::InvalidInput(format!("critical damage must lie in (0, 1), got {critical_damage}")));
    }
    Ok(-(-critical_damage).ln_1p() / alpha)
}

/// Constants attached to one integration point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams<T> {
    /// Characteristic length `ℓ` (mm).
    pub length: T,
    pub alpha: T,
    pub k_crit: T,
}

impl<T: Real> DerivedParams<T> {
    pub fn new(params: &MaterialParams<T>, length: T) -> Result<Self> {
        let alpha = derive_alpha(params, length)?;
        let k_crit = derive_kc(alpha, params.critical_damage)?;
        Ok(Self { length, alpha, k_crit })
    }
}

/// `d = 1 - exp(-α k)`.
pub fn damage_from_k<T: Real>(k: T, alpha: T) -> T {
    -(-alpha * k).exp_m1()
}
