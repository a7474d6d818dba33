//! Global tangent against central differences of the internal force.

mod common;

use common::*;
use dsm_core::MaterialParams64;
use dsm_fem::{Hypothesis, Model, Solver, SolverConfig};
use rand::{RngExt, SeedableRng};

/// Relative mismatch between `K v` and `(f(u + h v) - f(u - h v)) / 2h` for
/// the increment `du` from the committed solution.
fn mismatch(model: &Model, solver: &Solver, du: &[f64], v: &[f64], h: f64) -> f64 {
    let eval = model.evaluate(&solver.states, du, true).unwrap();
    let k = model.global_tangent(&eval).unwrap();
    let kv = &k * &faer::Col::<f64>::from_fn(v.len(), |i| v[i]);
    let shifted = |s: f64| {
        let d: Vec<f64> = du.iter().zip(v).map(|(a, b)| a + s * h * b).collect();
        model.evaluate(&solver.states, &d, false).unwrap().internal
    };
    let (fp, fm) = (shifted(1.0), shifted(-1.0));
    let (mut num, mut den) = (0.0_f64, 0.0_f64);
    for i in 0..v.len() {
        let fd = (fp[i] - fm[i]) / (2.0 * h);
        num = num.max((kv[i] - fd).abs());
        den = den.max(kv[i].abs());
    }
    num / den
}

/// Moves the control to `to`, bisecting increments Newton cannot take in one go.
fn advance(solver: &mut Solver, from: f64, to: f64, depth: usize) {
    if solver.increment(to).is_ok() {
        return;
    }
    assert!(depth < 12, "no convergence between {from} and {to}");
    let mid = 0.5 * (from + to);
    advance(solver, from, mid, depth + 1);
    advance(solver, mid, to, depth + 1);
}

fn check_regimes(hypothesis: Hypothesis) {
    let params = MaterialParams64::off_center_notched_beam();
    let config = SolverConfig { hypothesis, ..Default::default() };
    let model = tension_bar(patch(5, 2, 50.0, 20.0, 0.3, false), params, config);
    assert_eq!(model.mesh.elements.len(), 10);
    let mut solver = Solver::new(&model);
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let eps_y = params.yield_stress / params.young;
    let (mut elastic, mut plastic, mut open) = (false, false, false);
    let mut u = 0.0;
    while !(elastic && plastic && open) && u < 50.0 * 40.0 * eps_y {
        advance(&mut solver, u, u + 0.1 * 50.0 * eps_y, 0);
        u += 0.1 * 50.0 * eps_y;
        // probe at the converged increment to a further stretch, where every
        // point sees the strain increment Newton linearizes about
        let mut ahead = solver.clone();
        if ahead.increment(u + 0.05 * 50.0 * eps_y).is_err() {
            continue;
        }
        let du: Vec<f64> = ahead.displacement.iter().zip(&solver.displacement).map(|(a, b)| a - b).collect();
        let v: Vec<f64> = (0..model.dof_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let trial = &ahead;
        let committed_open = solver.states.iter().any(|s| s.crack_open());
        let trial_open = trial.states.iter().any(|s| s.crack_open());
        let regime = if committed_open && trial_open {
            &mut open
        } else if trial_open {
            continue;
        } else if trial.states.iter().zip(&solver.states).any(|(t, c)| t.k > 0.0 && c.k == 0.0) {
            // yield onset inside the increment sits on the elastic-plastic kink
            continue;
        } else if trial.states.iter().zip(&solver.states).any(|(t, c)| t.k > c.k) {
            &mut plastic
        } else {
            &mut elastic
        };
        if *regime {
            continue;
        }
        // displacement steps giving strain perturbations of 1e-9 to 1e-8
        for h in [1e-8, 1e-7] {
            let m = mismatch(&model, &solver, &du, &v, h);
            assert!(m < 1e-5, "mismatch {m:e} at u = {u}");
        }
        *regime = true;
    }
    assert!(elastic && plastic && open, "regimes elastic {elastic}, plastic {plastic}, open {open}");
}

#[test]
fn plane_stress_tangent_matches_differences() {
    check_regimes(Hypothesis::PlaneStress);
}

#[test]
fn plane_strain_tangent_matches_differences() {
    check_regimes(Hypothesis::PlaneStrain);
}
