//! Scalar (one-dimensional) version of the material routine.
//!
//! In 1D the Rankine return is perfectly plastic at `σ_y`, the tension weight
//! is one and the crack opening strain is `ε^d` itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{ClosureAccounting, ModelOptions, StepEvents};
use crate::num::{macaulay, Real};
use crate::params::{damage_from_k, DerivedParams, MaterialParams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UniaxialState<T> {
    /// Effective stress.
    pub stress: T,
    pub plastic_strain: T,
    pub disc_strain: T,
    pub k: T,
    pub damage: T,
}

impl<T: Real> UniaxialState<T> {
    /// `(1 - d)⟨σ̃⟩ + (σ̃ - ⟨σ̃⟩)`.
    pub fn total_stress(&self) -> T {
        let tensile = macaulay(self.stress);
        (T::one() - self.damage) * tensile + (self.stress - tensile)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniaxialUpdate<T> {
    pub stress: T,
    pub state: UniaxialState<T>,
    pub events: StepEvents,
}

/// One committed step of a strain-driven path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniaxialRecord<T> {
    pub strain: T,
    /// Total stress.
    pub stress: T,
    pub state: UniaxialState<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniaxialMaterial<T> {
    pub young: T,
    pub yield_stress: T,
    pub derived: DerivedParams<T>,
    pub options: ModelOptions,
}

impl<T: Real> UniaxialMaterial<T> {
    pub fn new(params: &MaterialParams<T>, length: T, options: ModelOptions) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            young: params.young,
            yield_stress: params.yield_stress,
            derived: DerivedParams::new(params, length)?,
            options,
        })
    }

    /// Returns `(ε^d, k, closed, residual)` after absorbing `dstrain` into an open crack.
    pub fn check_crack_closure(&self, state: &UniaxialState<T>, dstrain: T) -> Result<(UniaxialState<T>, bool, T)> {
        if state.disc_strain == T::zero() {
            return Err(Error::Contract("crack closure check on a closed crack"));
        }
        let mut next = *state;
        let residual = state.disc_strain + dstrain;
        next.disc_strain = residual;
        if residual < T::zero() {
            next.disc_strain = T::zero();
            return Ok((next, true, residual));
        }
        next.k = next.k + macaulay(dstrain);
        Ok((next, false, residual))
    }

    /// `state.stress` holds the returned stress; `plastic` is `Δε^p`.
    pub fn check_crack_opening(&self, state: &UniaxialState<T>, dstrain: T, plastic: T) -> UniaxialState<T> {
        let mut next = *state;
        let critical = state.k + macaulay(plastic) > self.derived.k_crit;
        if self.options.discontinuity && critical && dstrain > T::zero() {
            next.disc_strain = dstrain;
            next.stress = state.stress - self.young * (dstrain - plastic);
            next.k = state.k + macaulay(dstrain);
        } else {
            next.plastic_strain = state.plastic_strain + plastic;
            next.k = state.k + macaulay(plastic);
        }
        next
    }

    pub fn integrate(&self, state: &UniaxialState<T>, dstrain: T) -> Result<UniaxialUpdate<T>> {
        if !dstrain.is_finite() {
            return Err(Error::InvalidInput("strain increment is not finite".into()));
        }
        let mut events = StepEvents::default();
        let mut next = *state;
        let mut increment = Some(dstrain);
        if state.disc_strain != T::zero() {
            let (s, closed, residual) = self.check_crack_closure(state, dstrain)?;
            next = s;
            events.closed = closed;
            increment = match self.options.closure {
                ClosureAccounting::Literal => Some(dstrain),
                ClosureAccounting::Strict if closed => Some(residual),
                ClosureAccounting::Strict => None,
            };
        }
        if let (true, Some(de)) = (next.disc_strain == T::zero(), increment) {
            let trial = next.stress + self.young * de;
            next.stress = trial;
            if trial > self.yield_stress {
                events.plastic = true;
                let plastic = (trial - self.yield_stress) / self.young;
                next.stress = self.yield_stress;
                next = self.check_crack_opening(&next, de, plastic);
                events.opened = next.disc_strain != T::zero();
            }
        }
        next.damage = damage_from_k(next.k, self.derived.alpha);
        Ok(UniaxialUpdate { stress: next.total_stress(), state: next, events })
    }

    /// Drives a virgin point through the piecewise-linear strain `targets`
    /// (starting from zero strain) in equal steps no larger than `max_step`.
    /// The first record is the unloaded initial state.
    pub fn drive(&self, targets: &[T], max_step: T) -> Result<Vec<UniaxialRecord<T>>> {
        if !(max_step > T::zero()) {
            return Err(Error::InvalidInput(format!("step size must be positive, got {max_step}")));
        }
        let mut state = UniaxialState::default();
        let mut strain = T::zero();
        let mut records = vec![UniaxialRecord { strain, stress: T::zero(), state }];
        for &target in targets {
            let span = target - strain;
            let steps = (span.abs() / max_step).ceil().to_usize().unwrap_or(0);
            let start = strain;
            let mut applied = start;
            for i in 1..=steps {
                let next = if i == steps {
                    target
                } else {
                    start + span * T::from_usize(i).unwrap() / T::from_usize(steps).unwrap()
                };
                let up = self.integrate(&state, next - applied)?;
                state = up.state;
                applied = next;
                records.push(UniaxialRecord { strain: next, stress: up.stress, state });
            }
            strain = target;
        }
        Ok(records)
    }
}
