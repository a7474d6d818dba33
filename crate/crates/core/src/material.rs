//! Integration-point routine of the plastic-damage model with discontinuity strain.
//!
//! The routine follows a user-material contract: a strain increment and the
//! committed history go in, the total stress, the updated history and (on
//! request) an algorithmic tangent come out. [`PointState`] is a plain value;
//! nothing is mutated in place, so tangent probes and Newton retries simply
//! reuse the committed state.
//!
//! Sequence of one increment:
//!
//! 1. while a crack is open (`ε^d ≠ 0`) the increment is absorbed by `ε^d`;
//!    a negative crack opening strain `nᵀε^d n` closes the crack,
//! 2. with a closed crack the elastic predictor is returned to the Rankine
//!    surface, after which the crack may open (`k` passing `k_c`),
//! 3. damage is refreshed from `k` and the total stress is assembled from the
//!    degraded tensile and the intact compressive part of `σ̃`.

use serde::{Deserialize, Serialize};

use crate::damage::weight;
use crate::error::{Error, Result};
use crate::moduli::{ElasticModuli, Mat3, Mat6};
use crate::num::{macaulay, Real};
use crate::params::{damage_from_k, DerivedParams, MaterialParams};
use crate::plasticity::{return_map, ReturnMapping};
use crate::spectral::{spectral_decompose, tension_compression_split};
use crate::tensor::{SymTensor, Vec3};

/// How the strain left over at a crack closure is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureAccounting {
    /// Only the part of the increment that overshoots the closed crack,
    /// `r = ε^d_old + Δε`, is accounted for: its normal part `(nᵀrn) n⊗n`
    /// reaches the effective stress and the remainder (the sliding and
    /// lateral strain the crack had stored) stays as plastic strain. Under
    /// plane stress the out-of-plane component also reaches the stress, since
    /// it is the unknown of the constraint. Keeps `ε = D̃⁻¹σ̃ + ε^p + ε^d`
    /// exact and the stress continuous across closure.
    #[default]
    Strict,
    /// The whole increment is applied to the effective stress once the crack
    /// has closed, as in the published routine. The opening strain that was
    /// stored before closure is lost from the bookkeeping.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    /// Mobilize the discontinuity strain at critical damage. Without it the
    /// model is a conventional plastic-damage model.
    pub discontinuity: bool,
    pub closure: ClosureAccounting,
    /// Exit tolerance of the plane-stress iteration relative to `σ_y`.
    pub plane_stress_tol: f64,
    pub plane_stress_max_iter: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            discontinuity: true,
            closure: ClosureAccounting::Strict,
            plane_stress_tol: 1e-8,
            plane_stress_max_iter: 50,
        }
    }
}

/// History of one integration point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointState<T> {
    /// Effective stress `σ̃`.
    pub stress: SymTensor<T>,
    pub plastic_strain: SymTensor<T>,
    pub disc_strain: SymTensor<T>,
    /// Damage internal variable `k`.
    pub k: T,
    pub damage: T,
    /// Crack normal, set once at the first opening.
    pub crack_normal: Option<Vec3<T>>,
}

impl<T: Real> Default for PointState<T> {
    fn default() -> Self {
        Self::virgin()
    }
}

impl<T: Real> PointState<T> {
    pub fn virgin() -> Self {
        Self {
            stress: SymTensor::zero(),
            plastic_strain: SymTensor::zero(),
            disc_strain: SymTensor::zero(),
            k: T::zero(),
            damage: T::zero(),
            crack_normal: None,
        }
    }

    pub fn crack_initiated(&self) -> bool {
        self.crack_normal.is_some()
    }

    pub fn crack_open(&self) -> bool {
        !self.disc_strain.is_zero()
    }

    /// Crack opening strain `nᵀε^d n`; zero before initiation.
    pub fn crack_opening(&self) -> T {
        self.crack_normal.map(|n| self.disc_strain.quad_form(&n)).unwrap_or_else(T::zero)
    }

    /// `σ = (1 - d) σ̃_t + σ̃_c`.
    pub fn total_stress(&self) -> Result<SymTensor<T>> {
        let (tensile, compressive) = tension_compression_split(&self.stress)?;
        Ok(tensile.scale(T::one() - self.damage) + compressive)
    }
}

/// What happened during one increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepEvents {
    pub plastic: bool,
    pub apex: bool,
    pub opened: bool,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Update<T> {
    /// Total stress.
    pub stress: SymTensor<T>,
    pub state: PointState<T>,
    pub events: StepEvents,
}

/// Update together with the 6x6 algorithmic tangent (Voigt, engineering shear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult<T> {
    pub stress: SymTensor<T>,
    pub tangent: Mat6<T>,
    pub state: PointState<T>,
}

/// In-plane strain increment `[ε11, ε22, γ12]` (engineering shear).
pub type PlaneVoigt<T> = [T; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneStressUpdate<T> {
    pub stress: SymTensor<T>,
    pub state: PointState<T>,
    /// Converged out-of-plane strain increment `Δε33`.
    pub strain_zz: T,
    pub iterations: usize,
    pub events: StepEvents,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneStressResult<T> {
    pub update: PlaneStressUpdate<T>,
    /// `∂[σ11, σ22, σ12] / ∂[ε11, ε22, γ12]`.
    pub tangent: Mat3<T>,
}

/// Outcome of [`Material::check_crack_closure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure<T> {
    pub state: PointState<T>,
    pub closed: bool,
    /// `ε^d_old + Δε`, the strain not absorbed by the closing crack.
    pub residual: SymTensor<T>,
}

/// Material routine bound to one characteristic length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub params: MaterialParams<T>,
    pub moduli: ElasticModuli<T>,
    pub derived: DerivedParams<T>,
    pub options: ModelOptions,
    stiffness: Mat6<T>,
}

impl<T: Real> Material<T> {
    pub fn new(params: MaterialParams<T>, length: T, options: ModelOptions) -> Result<Self> {
        params.validate()?;
        let moduli = params.moduli()?;
        let derived = DerivedParams::new(&params, length)?;
        Ok(Self { params, moduli, derived, options, stiffness: moduli.stiffness() })
    }

    pub fn stiffness(&self) -> &Mat6<T> {
        &self.stiffness
    }

    /// Absorbs `Δε` into an open crack, or closes it when `nᵀε^d n` turns negative.
    pub fn check_crack_closure(&self, state: &PointState<T>, dstrain: &SymTensor<T>) -> Result<Closure<T>> {
        if !state.crack_open() {
            return Err(Error::Contract("crack closure check on a closed crack"));
        }
        let n = state.crack_normal.ok_or(Error::Contract("open crack without a crack normal"))?;
        let mut next = *state;
        let residual = state.disc_strain + *dstrain;
        if residual.quad_form(&n) < T::zero() {
            next.disc_strain = SymTensor::zero();
            return Ok(Closure { state: next, closed: true, residual });
        }
        next.disc_strain = residual;
        next.k = next.k + macaulay(dstrain.quad_form(&n));
        Ok(Closure { state: next, closed: false, residual })
    }

    /// Decides after a plastic return whether the increment opens the crack.
    ///
    /// `state.stress` must already hold the returned stress. `trial` is the
    /// elastic predictor; it supplies the crack normal (before initiation) and
    /// the weight of the increment of `k`.
    pub fn check_crack_opening(
        &self,
        state: &PointState<T>,
        dstrain: &SymTensor<T>,
        ret: &ReturnMapping<T>,
        trial: &SymTensor<T>,
    ) -> Result<PointState<T>> {
        let mut next = *state;
        next.stress = ret.stress;
        // At the apex the returned stress is isotropic, so weight and
        // direction are taken from the trial stress there.
        let probe = if ret.apex { trial } else { &ret.stress };
        let w = weight(probe, self.params.yield_stress)?;
        let plastic_max = spectral_decompose(&ret.plastic_increment)?.max_value();
        let probe_spectral = spectral_decompose(probe)?;
        let normal = state.crack_normal.unwrap_or(probe_spectral.max_vector());

        let critical = state.k + w * plastic_max > self.derived.k_crit;
        if self.options.discontinuity && critical && dstrain.quad_form(&normal) > T::zero() {
            let elastic = self.moduli.stress(&(*dstrain - ret.plastic_increment));
            next.disc_strain = *dstrain;
            next.stress = ret.stress - elastic;
            let strain_max = spectral_decompose(dstrain)?.max_value();
            next.k = state.k + w * strain_max;
            if next.crack_normal.is_none() {
                next.crack_normal = Some(normal);
            }
        } else {
            next.plastic_strain = state.plastic_strain + ret.plastic_increment;
            next.k = state.k + w * plastic_max;
        }
        Ok(next)
    }

    /// One strain increment from the committed `state`.
    pub fn integrate(&self, state: &PointState<T>, dstrain: &SymTensor<T>) -> Result<Update<T>> {
        self.integrate_in(state, dstrain, false)
    }

    /// `plane_stress` marks `Δε33` as the unknown of the plane-stress
    /// constraint; at a crack closure it then reaches the effective stress.
    fn integrate_in(&self, state: &PointState<T>, dstrain: &SymTensor<T>, plane_stress: bool) -> Result<Update<T>> {
        if !dstrain.is_finite() {
            return Err(Error::InvalidInput("strain increment has non-finite components".into()));
        }
        let mut events = StepEvents::default();
        let mut next = *state;
        let mut stress_increment = Some(*dstrain);

        if state.crack_open() {
            let closure = self.check_crack_closure(state, dstrain)?;
            next = closure.state;
            events.closed = closure.closed;
            stress_increment = match self.options.closure {
                ClosureAccounting::Literal => Some(*dstrain),
                ClosureAccounting::Strict if closure.closed => {
                    let n = state.crack_normal.ok_or(Error::Contract("open crack without a crack normal"))?;
                    let mut kept = SymTensor::dyad(&n).scale(closure.residual.quad_form(&n));
                    if plane_stress {
                        kept.zz = kept.zz + closure.residual.zz;
                    }
                    next.plastic_strain += closure.residual - kept;
                    Some(kept)
                }
                ClosureAccounting::Strict => None,
            };
        }

        if let (false, Some(de)) = (next.crack_open(), stress_increment) {
            let trial = next.stress + self.moduli.stress(&de);
            next.stress = trial;
            if spectral_decompose(&trial)?.max_value() > self.params.yield_stress {
                let ret = return_map(&trial, &self.moduli, self.params.yield_stress, self.params.dilation)?;
                events.plastic = true;
                events.apex = ret.apex;
                next = self.check_crack_opening(&next, &de, &ret, &trial)?;
                events.opened = next.crack_open();
            }
        }

        next.damage = damage_from_k(next.k, self.derived.alpha);
        Ok(Update { stress: next.total_stress()?, state: next, events })
    }

    /// Finite-difference tangent `∂σ/∂Δε` (Voigt, engineering shear), probing
    /// from the same committed state in each direction.
    pub fn numerical_tangent(&self, state: &PointState<T>, dstrain: &SymTensor<T>) -> Result<Mat6<T>> {
        let base = self.integrate(state, dstrain)?;
        if self.elastic_shortcut(state, &base.state, base.events, dstrain) {
            return Ok(self.stiffness);
        }
        let h = self.probe_step(dstrain.norm(), &base.state.stress)?;
        let v0 = dstrain.to_strain_voigt();
        let s0 = base.stress.to_stress_voigt();
        let mut tangent = [[T::zero(); 6]; 6];
        for j in 0..6 {
            let eval = |sign: T| {
                let mut v = v0;
                v[j] = v[j] + sign * h;
                self.integrate(state, &SymTensor::from_strain_voigt(&v)).map(|u| u.stress.to_stress_voigt())
            };
            let column = difference_column(eval(T::one()), eval(-T::one()), &s0, h)
                .ok_or_else(|| Error::Tangent(format!("both probes failed for component {j}")))?;
            for i in 0..6 {
                tangent[i][j] = column[i];
            }
        }
        Ok(tangent)
    }

    pub fn integrate_with_tangent(&self, state: &PointState<T>, dstrain: &SymTensor<T>) -> Result<StepResult<T>> {
        let update = self.integrate(state, dstrain)?;
        let tangent = self.numerical_tangent(state, dstrain)?;
        Ok(StepResult { stress: update.stress, tangent, state: update.state })
    }

    /// Plane-stress update: the out-of-plane strain increment is corrected
    /// with `Δε33 -= σ̃33 / D̃33` until `|σ̃33|` is below tolerance.
    pub fn integrate_plane_stress(
        &self,
        state: &PointState<T>,
        in_plane: &PlaneVoigt<T>,
    ) -> Result<PlaneStressUpdate<T>> {
        let sy = self.params.yield_stress;
        let tol = T::lit(self.options.plane_stress_tol).max(T::lit(64.0) * T::epsilon()) * sy;
        // Iterate past the exit tolerance when cheap so that finite-difference
        // probes are not dominated by the iteration error.
        let polish = T::lit(1e-12).max(T::lit(64.0) * T::epsilon()) * sy;
        let d33 = self.moduli.d33();
        let half = T::lit(0.5);
        let mut strain_zz = T::zero();
        let mut best: Option<PlaneStressUpdate<T>> = None;
        let mut residual = T::infinity();
        for it in 1..=self.options.plane_stress_max_iter {
            let de = SymTensor::new(in_plane[0], in_plane[1], strain_zz, half * in_plane[2], T::zero(), T::zero());
            let up = self.integrate_in(state, &de, true)?;
            let s33 = up.state.stress.zz;
            let candidate =
                PlaneStressUpdate { stress: up.stress, state: up.state, strain_zz, iterations: it, events: up.events };
            if s33.abs() < residual {
                residual = s33.abs();
                if residual <= tol {
                    best = Some(candidate);
                }
            }
            if s33.abs() <= polish {
                return Ok(candidate);
            }
            strain_zz = strain_zz - s33 / d33;
        }
        best.ok_or(Error::PlaneStress {
            iterations: self.options.plane_stress_max_iter,
            residual: residual.to_f64_lossy(),
        })
    }

    /// Finite-difference tangent of the plane-stress update.
    pub fn plane_stress_tangent(
        &self,
        state: &PointState<T>,
        in_plane: &PlaneVoigt<T>,
    ) -> Result<PlaneStressResult<T>> {
        let update = self.integrate_plane_stress(state, in_plane)?;
        let full =
            SymTensor::new(in_plane[0], in_plane[1], update.strain_zz, T::lit(0.5) * in_plane[2], T::zero(), T::zero());
        if self.elastic_shortcut(state, &update.state, update.events, &full) {
            return Ok(PlaneStressResult { update, tangent: self.moduli.plane_stress_stiffness() });
        }
        let norm =
            (in_plane[0] * in_plane[0] + in_plane[1] * in_plane[1] + T::lit(0.5) * in_plane[2] * in_plane[2]).sqrt();
        let h = self.probe_step(norm, &update.state.stress)?;
        let s0 = plane_components(&update.stress);
        let mut tangent = [[T::zero(); 3]; 3];
        for j in 0..3 {
            let eval = |sign: T| {
                let mut v = *in_plane;
                v[j] = v[j] + sign * h;
                self.integrate_plane_stress(state, &v).map(|u| plane_components(&u.stress))
            };
            let column = difference_column(eval(T::one()), eval(-T::one()), &s0, h)
                .ok_or_else(|| Error::Tangent(format!("both plane-stress probes failed for component {j}")))?;
            for i in 0..3 {
                tangent[i][j] = column[i];
            }
        }
        Ok(PlaneStressResult { update, tangent })
    }

    /// Probe size `1e-3 ‖Δε‖` clamped to `[1e-11, 1e-8]` (`1e-8` at a zero
    /// increment). Points on the yield surface have a loading/unloading kink
    /// at `Δε = 0`, so the stencil must stay well inside the increment. It is
    /// further shrunk so that it does not straddle a sign change of a
    /// principal effective stress, where the tension/compression split and
    /// the weight have kinks. Principal values that are zero to rounding (the
    /// out-of-plane one under plane stress) carry no kink and are ignored.
    fn probe_step(&self, strain_norm: T, stress: &SymTensor<T>) -> Result<T> {
        let (lo, hi) = (T::lit(1e-11), T::lit(1e-8));
        let h = if strain_norm > T::zero() { (T::lit(1e-3) * strain_norm).max(lo).min(hi) } else { hi };
        let ignored = T::lit(1e-9) * self.params.yield_stress;
        let margin = spectral_decompose(stress)?
            .values
            .iter()
            .map(|v| v.abs())
            .filter(|v| *v > ignored)
            .fold(T::infinity(), |m, v| m.min(v / (T::lit(4.0) * self.params.young)));
        Ok(h.min(margin).max(lo))
    }

    /// Undamaged, crack-free point whose update stayed elastic: the response is
    /// exactly linear, so the tangent is `D̃`.
    fn elastic_shortcut(
        &self,
        state: &PointState<T>,
        updated: &PointState<T>,
        events: StepEvents,
        dstrain: &SymTensor<T>,
    ) -> bool {
        state.damage == T::zero()
            && !state.crack_open()
            && !events.plastic
            && updated.damage == T::zero()
            && self.elastic_margin(state, dstrain)
    }

    /// Trial stress stays below yield with room for the probe perturbation.
    fn elastic_margin(&self, state: &PointState<T>, dstrain: &SymTensor<T>) -> bool {
        let trial = state.stress + self.moduli.stress(dstrain);
        match spectral_decompose(&trial) {
            Ok(s) => {
                let room = T::lit(1e-3) * self.params.yield_stress;
                s.max_value() < self.params.yield_stress - room
            }
            Err(_) => false,
        }
    }
}

fn plane_components<T: Real>(s: &SymTensor<T>) -> [T; 3] {
    [s.xx, s.yy, s.xy]
}

/// Central difference when both probes succeed, one-sided from the base otherwise.
fn difference_column<T: Real, const N: usize>(
    plus: Result<[T; N]>,
    minus: Result<[T; N]>,
    base: &[T; N],
    h: T,
) -> Option<[T; N]> {
    let mut col = [T::zero(); N];
    match (plus, minus) {
        (Ok(p), Ok(m)) => {
            for i in 0..N {
                col[i] = (p[i] - m[i]) / (T::lit(2.0) * h);
            }
        }
        (Ok(p), Err(_)) => {
            for i in 0..N {
                col[i] = (p[i] - base[i]) / h;
            }
        }
        (Err(_), Ok(m)) => {
            for i in 0..N {
                col[i] = (base[i] - m[i]) / h;
            }
        }
        (Err(_), Err(_)) => return None,
    }
    Some(col)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center_notched(length: f64) -> Material<f64> {
        Material::new(MaterialParams::center_notched_beam(), length, ModelOptions::default()).unwrap()
    }

    #[test]
    fn null_increment_reproduces_state() {
        let m = center_notched(30.0);
        let mut s = PointState::virgin();
        s.stress = SymTensor::new(3.0, -1.0, 0.5, 0.2, 0.0, 0.1);
        s.k = 1e-5;
        s.damage = damage_from_k(s.k, m.derived.alpha);
        let before = s.total_stress().unwrap();
        let up = m.integrate(&s, &SymTensor::zero()).unwrap();
        assert_eq!(up.state, s);
        assert_eq!(up.stress, before);
    }

    #[test]
    fn closure_check_requires_open_crack() {
        let m = center_notched(30.0);
        let s = PointState::virgin();
        assert!(matches!(m.check_crack_closure(&s, &SymTensor::zero()), Err(Error::Contract(_))));
    }

    #[test]
    fn compressive_increment_on_open_crack_keeps_k() {
        let m = center_notched(30.0);
        let mut s = PointState::virgin();
        let n = [1.0, 0.0, 0.0];
        s.crack_normal = Some(n);
        s.disc_strain = SymTensor::diag(2e-4, 0.0, 0.0);
        s.k = 2e-4;
        let c = m.check_crack_closure(&s, &SymTensor::diag(-1e-4, 0.0, 0.0)).unwrap();
        assert!(!c.closed);
        assert_eq!(c.state.k, 2e-4);
        assert!((c.state.disc_strain.quad_form(&n) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn elastic_tangent_is_intact_stiffness() {
        let m = center_notched(30.0);
        let t = m.numerical_tangent(&PointState::virgin(), &SymTensor::diag(1e-5, 0.0, 0.0)).unwrap();
        assert_eq!(&t, m.stiffness());
    }

    #[test]
    fn plane_stress_elastic_step() {
        let m = center_notched(30.0);
        let de = [1e-5, -3e-6, 2e-6];
        let up = m.integrate_plane_stress(&PointState::virgin(), &de).unwrap();
        let nu = 0.2;
        assert!((up.strain_zz + nu / (1.0 - nu) * (de[0] + de[1])).abs() < 1e-20);
        assert!(up.iterations <= 2);
        assert!(up.state.stress.zz.abs() < 1e-13);
    }
}
