//! Rankine yield surface with a non-associative Drucker–Prager flow potential.
//!
//! The potential `g = 3βp + q` keeps the returned deviator co-linear with the
//! trial deviator, so the maximum principal stress can be returned in closed
//! form. When the return would cross the hydrostatic axis the stress goes to
//! the apex `σ_y I`.

use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::num::Real;
use crate::spectral::spectral_decompose;
use crate::tensor::SymTensor;

/// Trial deviators with `q` below `APEX_Q_REL * σ_y` go straight to the apex.
const APEX_Q_REL: f64 = 1e-12;

/// `f = σ̂_max - σ_y`.
pub fn yield_value<T: Real>(stress: &SymTensor<T>, yield_stress: T) -> Result<T> {
    Ok(spectral_decompose(stress)?.max_value() - yield_stress)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnMapping<T> {
    /// Returned effective stress.
    pub stress: SymTensor<T>,
    /// Plastic strain increment (tensor components).
    pub plastic_increment: SymTensor<T>,
    /// Plastic multiplier increment `Δγ`.
    pub multiplier: T,
    pub apex: bool,
}

/// Closed-form return of an inadmissible trial stress.
pub fn return_map<T: Real>(
    trial: &SymTensor<T>,
    moduli: &ElasticModuli<T>,
    yield_stress: T,
    dilation: T,
) -> Result<ReturnMapping<T>> {
    let max_trial = spectral_decompose(trial)?.max_value();
    if !(max_trial - yield_stress > T::zero()) {
        return Err(Error::Contract("return mapping called with an admissible trial stress"));
    }
    let three = T::lit(3.0);
    let (k, g) = (moduli.bulk, moduli.shear);
    let (p_trial, s_trial) = trial.vol_dev_split();
    let q_trial = (T::lit(1.5) * s_trial.contract(&s_trial)).sqrt();

    let regular = if q_trial > T::lit(APEX_Q_REL) * yield_stress {
        let dg = (max_trial - yield_stress) / (three * k * dilation + three * g * (max_trial - p_trial) / q_trial);
        (dg <= q_trial / (three * g)).then_some(dg)
    } else {
        None
    };

    match regular {
        Some(dg) => {
            let p = p_trial - three * k * dg * dilation;
            let s = s_trial.scale(T::one() - three * g * dg / q_trial);
            let flow = SymTensor::identity().scale(dilation) + s_trial.scale(T::lit(1.5) / q_trial);
            Ok(ReturnMapping {
                stress: SymTensor::identity().scale(p) + s,
                plastic_increment: flow.scale(dg),
                multiplier: dg,
                apex: false,
            })
        }
        None => {
            if !(dilation > T::zero()) {
                return Err(Error::InvalidInput("apex return requires a positive dilation constant".into()));
            }
            let excess = p_trial - yield_stress;
            Ok(ReturnMapping {
                stress: SymTensor::identity().scale(yield_stress),
                plastic_increment: SymTensor::identity().scale(excess / (three * k))
                    + s_trial.scale(T::one() / (T::lit(2.0) * g)),
                multiplier: excess / (three * k * dilation),
                apex: true,
            })
        }
    }
}
