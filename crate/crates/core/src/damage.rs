//! Damage evolution helpers.

use crate::error::Result;
use crate::num::{macaulay, Real};
use crate::spectral::spectral_decompose;
use crate::tensor::SymTensor;

pub use crate::params::damage_from_k as damage_update;

/// Tension weight `Σ⟨σ̂ᵢ⟩ / Σ|σ̂ᵢ|` of the principal stresses.
///
/// Stresses smaller than `1e-12 σ_y` carry no sign information; the weight is then 1.
pub fn weight<T: Real>(stress: &SymTensor<T>, yield_stress: T) -> Result<T> {
    if stress.norm() < T::lit(1e-12) * yield_stress {
        return Ok(T::one());
    }
    let values = spectral_decompose(stress)?.values;
    let tension: T = values.iter().map(|v| macaulay(*v)).sum();
    let total: T = values.iter().map(|v| v.abs()).sum();
    if total == T::zero() {
        return Ok(T::one());
    }
    Ok(tension / total)
}
