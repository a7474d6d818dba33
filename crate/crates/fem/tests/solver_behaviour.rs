mod common;

use common::*;
use dsm_core::MaterialParams64;
use dsm_fem::{
    run_program, FemError, LoadProgram, MeshSizing, Model, NotchedBeam, SnapshotPolicy, Solver, SolverConfig,
};

#[test]
fn elastic_step_converges_in_one_iteration() {
    let params = MaterialParams64::center_notched_beam();
    let model = tension_bar(patch(4, 2, 40.0, 20.0, 0.3, false), params, SolverConfig::default());
    let mut solver = Solver::new(&model);
    let inc = solver.increment(1e-3).unwrap();
    assert_eq!(inc.iterations, 1);
    // plane stress bar: F = E A ε
    let expected = params.young * 20.0 * 1e-3 / 40.0;
    assert!((model.reaction(&inc.internal) / expected - 1.0).abs() < 1e-9);
}

#[test]
fn elastic_ramp_is_linear() {
    let params = MaterialParams64::l_shaped_panel();
    let model = tension_bar(patch(4, 2, 40.0, 20.0, 0.3, true), params, SolverConfig::default());
    let program = LoadProgram::from_targets(&[1e-3, -5e-4], 0.25);
    let h = run_program(&model, &program, SnapshotPolicy::Final).unwrap();
    assert_eq!(h.records.len(), 9);
    let stiffness = params.young * 20.0 / 40.0;
    for r in &h.records[1..] {
        assert!((r.reaction - stiffness * r.u_control).abs() <= 1e-9 * stiffness * 1e-3, "{r:?}");
        assert_eq!(r.iterations, 1);
    }
    assert_eq!(h.total_iterations, 8);
    assert_eq!(h.snapshots.len(), 1);
}

#[test]
fn zero_amplitude_program_stays_flat() {
    let model =
        tension_bar(patch(3, 2, 30.0, 20.0, 0.0, false), MaterialParams64::center_notched_beam(), Default::default());
    let program = LoadProgram::from_targets(&[0.0, 0.0], 0.5);
    let h = run_program(&model, &program, SnapshotPolicy::Breakpoints).unwrap();
    assert!(h.records.iter().all(|r| r.reaction == 0.0 && r.u_control == 0.0 && r.iterations == 0));
    assert_eq!(h.total_iterations, 0);
    assert_eq!(h.snapshots.len(), 2);
}

fn small_beam(config: SolverConfig) -> Model {
    let beam =
        NotchedBeam { length: 220.0, span: 200.0, height: 50.0, notch_depth: 10.0, notch_offset: 0.0, load_pad: 5.0 };
    let sizing = MeshSizing { band_size: 5.0, band_width: 10.0, max_size: 20.0, growth: 1.3, triangles: false };
    let p = beam.build(&sizing).unwrap();
    Model::new(p.mesh, MaterialParams64::center_notched_beam(), p.boundary, config).unwrap()
}

#[test]
fn failed_attempts_are_cut_back_and_counted() {
    let config = SolverConfig { max_iterations: 4, ..Default::default() };
    let model = small_beam(config);
    // a single increment straight past the peak load
    let program = LoadProgram {
        schedule: vec![[0.0, 0.0], [1.0, 0.06]],
        initial_increment: 1.0,
        min_increment: 1e-6,
        cutback: 0.5,
        max_retries: 30,
    };
    let h = run_program(&model, &program, SnapshotPolicy::Final).unwrap();
    assert!(h.total_cutbacks > 0);
    let converged: usize = h.records.iter().map(|r| r.residuals.len().saturating_sub(1)).sum();
    assert!(h.total_iterations > converged);
    assert_eq!(h.records.last().unwrap().newton_iters_cum, h.total_iterations);
    let spent: usize = h.records.iter().map(|r| r.iterations).sum();
    assert_eq!(spent, h.total_iterations);
    assert!(h.records.windows(2).all(|w| w[1].time > w[0].time && w[1].newton_iters_cum >= w[0].newton_iters_cum));
}

#[test]
fn increment_below_minimum_aborts_with_history() {
    let params = MaterialParams64::off_center_notched_beam();
    let config = SolverConfig { max_iterations: 1, tolerance: 1e-14, ..Default::default() };
    let model = tension_bar(patch(5, 2, 50.0, 20.0, 0.3, false), params, config);
    let eps_y = params.yield_stress / params.young;
    let program = LoadProgram {
        schedule: vec![[0.0, 0.0], [1.0, 50.0 * 0.5 * eps_y], [2.0, 50.0 * 30.0 * eps_y]],
        initial_increment: 1.0,
        min_increment: 0.1,
        cutback: 0.5,
        max_retries: 10,
    };
    let failure = run_program(&model, &program, SnapshotPolicy::Final).unwrap_err();
    assert!(matches!(failure.error, FemError::IncrementTooSmall { .. }), "{}", failure.error);
    assert!(failure.history.records.len() >= 2);
    assert!(!failure.history.snapshots.is_empty());
}

#[test]
fn length_bound_violation_lists_elements() {
    let params = MaterialParams64::center_notched_beam();
    // 200 mm elements exceed the 156.25 mm bound
    let mesh = patch(2, 1, 400.0, 200.0, 0.0, false);
    let err = Model::new(mesh, params, bar_boundary(), SolverConfig::default()).unwrap_err();
    match &err {
        FemError::LengthBound { elements, bound, .. } => {
            assert_eq!(elements, &vec![0, 1]);
            assert!((bound - 156.25).abs() < 1e-12);
        }
        other => panic!("unexpected {other}"),
    }
    assert!(err.to_string().contains("0, 1"));

    // A global override is checked the same way.
    let config = SolverConfig { length_override: Some(160.0), ..Default::default() };
    let small = patch(2, 1, 20.0, 10.0, 0.0, false);
    assert!(matches!(Model::new(small, params, bar_boundary(), config), Err(FemError::LengthBound { .. })));
}

#[test]
fn identical_runs_are_bit_identical() {
    let model = small_beam(SolverConfig::default());
    let program = LoadProgram::from_targets(&[0.03], 0.1);
    let a = run_program(&model, &program, SnapshotPolicy::Final).unwrap();
    let b = run_program(&model, &program, SnapshotPolicy::Final).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.snapshots, b.snapshots);
    assert!(a.peak_reaction() > 0.0);
    assert!(a.records.iter().all(|r| r.cmod.is_some()));
}
