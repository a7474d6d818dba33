//! Displacement-controlled incremental-iterative solution with adaptive
//! cut-back.

use dsm_core::{spectral_decompose, PointState64};
use faer::prelude::*;
use faer::Col;
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::model::{Evaluation, Hypothesis, Model};

/// Piecewise-linear control displacement over pseudo-time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProgram {
    /// `[time, control displacement (mm)]` pairs starting at `[0, 0]`.
    pub schedule: Vec<[f64; 2]>,
    /// Pseudo-time increment tried first and never exceeded.
    pub initial_increment: f64,
    pub min_increment: f64,
    /// Factor applied to the increment after a failed attempt.
    #[serde(default = "default_cutback")]
    pub cutback: f64,
    /// Failed attempts tolerated for one increment before the run aborts.
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_cutback() -> f64 {
    0.5
}

fn default_retries() -> usize {
    8
}

impl LoadProgram {
    /// Cycles through `peaks` (mm) and back to `valleys`, one time unit per leg.
    pub fn from_targets(targets: &[f64], increment: f64) -> Self {
        let mut schedule = vec![[0.0, 0.0]];
        schedule.extend(targets.iter().enumerate().map(|(i, &v)| [(i + 1) as f64, v]));
        Self {
            schedule,
            initial_increment: increment,
            min_increment: increment * 1e-4,
            cutback: default_cutback(),
            max_retries: default_retries(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FemError::Setup(format!("load program: {msg}")));
        match self.schedule.first() {
            Some(p) if *p == [0.0, 0.0] => {}
            _ => return bad("schedule must start at [0, 0]".into()),
        }
        if self.schedule.len() < 2 {
            return bad("schedule needs at least two points".into());
        }
        for w in self.schedule.windows(2) {
            if !(w[1][0] > w[0][0]) || !w[1][1].is_finite() {
                return bad(format!("times must increase and values be finite at {:?}", w[1]));
            }
        }
        if !(self.initial_increment > 0.0) {
            return bad("initial increment must be positive".into());
        }
        if !(self.min_increment > 0.0 && self.min_increment <= self.initial_increment) {
            return bad("minimum increment must lie in (0, initial increment]".into());
        }
        if !(self.cutback > 0.0 && self.cutback < 1.0) {
            return bad("cut-back factor must lie in (0, 1)".into());
        }
        if self.max_retries == 0 {
            return bad("at least one retry is required".into());
        }
        Ok(())
    }

    pub fn end_time(&self) -> f64 {
        self.schedule.last().map_or(0.0, |p| p[0])
    }

    /// Control displacement at pseudo-time `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let s = &self.schedule;
        if t <= s[0][0] {
            return s[0][1];
        }
        for w in s.windows(2) {
            if t <= w[1][0] {
                let f = (t - w[0][0]) / (w[1][0] - w[0][0]);
                return if f >= 1.0 { w[1][1] } else { w[0][1] + f * (w[1][1] - w[0][1]) };
            }
        }
        s[s.len() - 1][1]
    }
}

/// When field snapshots are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotPolicy {
    /// At every schedule point (the cycle extrema) and at the end.
    #[default]
    Breakpoints,
    /// Every `n` committed increments and at the end.
    Every(usize),
    /// Only the final state.
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// Control displacement (mm).
    pub u_control: f64,
    /// Force along the control direction (N per unit thickness).
    pub reaction: f64,
    /// Crack mouth opening displacement (mm).
    pub cmod: Option<f64>,
    /// Newton iterations spent on this increment, failed attempts included.
    pub iterations: usize,
    pub newton_iters_cum: usize,
    pub cutbacks: usize,
    /// Relative residual after each iteration of the converged attempt.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub element: usize,
    pub position: [f64; 2],
    pub damage: f64,
    pub k: f64,
    /// `nᵀε^d n`.
    pub crack_opening: f64,
    /// Largest principal plastic strain.
    pub plastic_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub step: usize,
    pub time: f64,
    /// Nodal displacements, interleaved x, y (mm).
    pub displacement: Vec<f64>,
    pub points: Vec<PointSample>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionHistory {
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<FieldSnapshot>,
    pub total_iterations: usize,
    pub total_cutbacks: usize,
    /// Largest `|σ̃33|` over every committed point of a plane-stress run (MPa).
    pub max_out_of_plane_stress: f64,
    #[serde(skip)]
    pub final_states: Vec<PointState64>,
    #[serde(skip)]
    pub final_displacement: Vec<f64>,
}

impl SolutionHistory {
    pub fn peak_reaction(&self) -> f64 {
        self.records.iter().map(|r| r.reaction).fold(0.0, f64::max)
    }
}

/// A run that stopped early, with everything committed before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub history: SolutionHistory,
    pub error: FemError,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} committed increments)", self.error, self.history.records.len().saturating_sub(1))
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Outcome of one converged increment.
#[derive(Debug, Clone)]
pub struct Increment {
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub internal: Vec<f64>,
}

/// An increment attempt that did not converge.
#[derive(Debug)]
pub struct FailedAttempt {
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub error: FemError,
}

/// Step halvings tried before the smallest-residual step is accepted.
const LINE_SEARCH_HALVINGS: usize = 4;

/// Committed solution state of a model.
#[derive(Debug, Clone)]
pub struct Solver<'a> {
    pub model: &'a Model,
    pub states: Vec<PointState64>,
    pub displacement: Vec<f64>,
    pub internal: Vec<f64>,
}

impl<'a> Solver<'a> {
    pub fn new(model: &'a Model) -> Self {
        Self {
            model,
            states: model.virgin_states(),
            displacement: vec![0.0; model.dof_count()],
            internal: vec![0.0; model.dof_count()],
        }
    }

    /// Newton iteration towards the control displacement `target`; the
    /// solution is committed only on convergence.
    ///
    /// The first iteration linearizes about the committed solution, so the
    /// jump of the driven DOFs is spread over the free DOFs before any point
    /// is evaluated away from equilibrium.
    pub fn increment(&mut self, target: f64) -> std::result::Result<Increment, FailedAttempt> {
        let model = self.model;
        let mut u = self.displacement.clone();
        model.apply_control(&mut u, target);
        let jump: Vec<f64> = u.iter().zip(&self.displacement).map(|(a, b)| a - b).collect();
        let mut iterations = 0;
        let mut residuals = Vec::new();
        let fail = |iterations: usize, residuals: &Vec<f64>, error: FemError| FailedAttempt {
            iterations,
            residuals: residuals.clone(),
            error,
        };
        if jump.iter().any(|v| *v != 0.0) {
            iterations = 1;
            let delta = self.predictor(&jump).map_err(|e| fail(iterations, &residuals, e))?;
            model.add_free(&mut u, &delta);
        }
        let mut eval = self.evaluate(&u, false).map_err(|e| fail(iterations, &residuals, e))?;
        loop {
            let (free, _) = model.residual_norms(&eval.internal);
            let rel = free / model.reference_force(&eval.internal);
            residuals.push(rel);
            if rel <= model.config.tolerance {
                self.displacement = u;
                self.states = eval.states;
                self.internal = eval.internal.clone();
                return Ok(Increment { iterations, residuals, internal: eval.internal });
            }
            if iterations >= model.config.max_iterations || !rel.is_finite() {
                return Err(fail(iterations, &residuals, FemError::NotConverged { iterations, residual: rel }));
            }
            iterations += 1;
            let eval_t = self.evaluate(&u, true).map_err(|e| fail(iterations, &residuals, e))?;
            let r = model.restrict(&eval_t.internal);
            let delta = self.solve(&eval_t, &r).map_err(|e| fail(iterations, &residuals, e))?;
            (u, eval) = self.line_search(&u, &delta, rel).map_err(|e| fail(iterations, &residuals, e))?;
        }
    }

    /// Backtracks along `delta` while the residual does not drop below
    /// `current`; the step with the smallest residual is kept. Breaks the
    /// two-cycles Newton falls into when points switch between loading and
    /// unloading from one iterate to the next.
    fn line_search(&self, u: &[f64], delta: &[f64], current: f64) -> Result<(Vec<f64>, Evaluation)> {
        let model = self.model;
        let mut best: Option<(f64, Vec<f64>, Evaluation)> = None;
        let mut factor = 1.0;
        for _ in 0..=LINE_SEARCH_HALVINGS {
            let mut trial = u.to_vec();
            let scaled: Vec<f64> = delta.iter().map(|d| d * factor).collect();
            model.add_free(&mut trial, &scaled);
            let eval = self.evaluate(&trial, false)?;
            let (free, _) = model.residual_norms(&eval.internal);
            let rel = free / model.reference_force(&eval.internal);
            let improved = rel < current;
            if best.as_ref().is_none_or(|(r, _, _)| rel < *r) {
                best = Some((rel, trial, eval));
            }
            if improved {
                break;
            }
            factor *= 0.5;
        }
        let (_, u, eval) = best.expect("at least one trial step");
        Ok((u, eval))
    }

    fn evaluate(&self, u: &[f64], with_tangent: bool) -> Result<Evaluation> {
        let du: Vec<f64> = u.iter().zip(&self.displacement).map(|(a, b)| a - b).collect();
        self.model.evaluate(&self.states, &du, with_tangent)
    }

    /// Free-DOF correction for the driven jump, from the tangent at the committed solution.
    fn predictor(&self, jump: &[f64]) -> Result<Vec<f64>> {
        let eval = self.evaluate(&self.displacement, true)?;
        let k = self.model.global_tangent(&eval)?;
        let kj = &k * &Col::<f64>::from_fn(jump.len(), |i| jump[i]);
        let linearized: Vec<f64> = (0..jump.len()).map(|i| eval.internal[i] + kj[i]).collect();
        self.solve(&eval, &self.model.restrict(&linearized))
    }

    /// Solves `K_ff δ = -r`.
    fn solve(&self, eval: &Evaluation, r: &[f64]) -> Result<Vec<f64>> {
        let k = self.model.free_tangent(eval)?;
        let lu = k.sp_lu().map_err(|e| FemError::Linear(format!("{e:?}")))?;
        let rhs = Col::<f64>::from_fn(r.len(), |i| -r[i]);
        let x = lu.solve(&rhs);
        let delta: Vec<f64> = (0..r.len()).map(|i| x[i]).collect();
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(FemError::Linear("singular tangent".into()));
        }
        Ok(delta)
    }

    pub fn snapshot(&self, step: usize, time: f64) -> FieldSnapshot {
        let model = self.model;
        let mut points = Vec::with_capacity(self.states.len());
        for e in 0..model.mesh.elements.len() {
            for p in model.element_points(e) {
                let s = &self.states[p];
                let plastic_max = spectral_decompose(&s.plastic_strain).map_or(f64::NAN, |sp| sp.max_value());
                points.push(PointSample {
                    element: e,
                    position: model.point_geometry(p).position,
                    damage: s.damage,
                    k: s.k,
                    crack_opening: s.crack_opening(),
                    plastic_max,
                });
            }
        }
        FieldSnapshot { step, time, displacement: self.displacement.clone(), points }
    }
}

/// Runs `program` on `model` from the unloaded state.
pub fn run_program(
    model: &Model,
    program: &LoadProgram,
    policy: SnapshotPolicy,
) -> std::result::Result<SolutionHistory, Box<RunFailure>> {
    let mut history = SolutionHistory::default();
    let mut solver = Solver::new(model);
    let outcome = drive(&mut solver, program, policy, &mut history);
    history.final_states = solver.states.clone();
    history.final_displacement = solver.displacement.clone();
    match outcome {
        Ok(()) => Ok(history),
        Err(error) => {
            let last = history.records.last().map_or(0, |r| r.step);
            if history.snapshots.last().map(|s| s.step) != Some(last) {
                let time = history.records.last().map_or(0.0, |r| r.time);
                history.snapshots.push(solver.snapshot(last, time));
            }
            Err(Box::new(RunFailure { history, error }))
        }
    }
}

fn drive(
    solver: &mut Solver,
    program: &LoadProgram,
    policy: SnapshotPolicy,
    history: &mut SolutionHistory,
) -> Result<()> {
    program.validate()?;
    let model = solver.model;
    history.records.push(StepRecord {
        step: 0,
        time: 0.0,
        u_control: 0.0,
        reaction: 0.0,
        cmod: model.cmod(&solver.displacement),
        iterations: 0,
        newton_iters_cum: 0,
        cutbacks: 0,
        residuals: Vec::new(),
    });
    let end = program.end_time();
    let eps = 1e-12 * end;
    let breakpoints: Vec<f64> = program.schedule.iter().skip(1).map(|p| p[0]).collect();
    let mut time = 0.0;
    let mut dt = program.initial_increment;
    let mut step = 0;
    while time < end - eps {
        let next_break = breakpoints.iter().copied().find(|&b| b > time + eps).unwrap_or(end);
        let mut spent = 0;
        let mut cutbacks = 0;
        let (target_time, increment) = loop {
            let candidate = if time + dt * (1.0 + 1e-6) >= next_break { next_break } else { time + dt };
            match solver.increment(program.value_at(candidate)) {
                Ok(inc) => {
                    spent += inc.iterations;
                    break (candidate, inc);
                }
                Err(failed) => {
                    spent += failed.iterations;
                    history.total_iterations += failed.iterations;
                    cutbacks += 1;
                    history.total_cutbacks += 1;
                    dt *= program.cutback;
                    if dt < program.min_increment || cutbacks > program.max_retries {
                        return Err(FemError::IncrementTooSmall {
                            time,
                            min_increment: program.min_increment,
                            attempts: cutbacks,
                            last: failed.error.to_string(),
                        });
                    }
                }
            }
        };
        step += 1;
        history.total_iterations += increment.iterations;
        if cutbacks == 0 && increment.iterations <= model.config.max_iterations / 4 {
            dt = (dt / program.cutback).min(program.initial_increment);
        }
        time = target_time;
        if model.config.hypothesis == Hypothesis::PlaneStress {
            let worst = solver.states.iter().map(|s| s.stress.zz.abs()).fold(0.0, f64::max);
            history.max_out_of_plane_stress = history.max_out_of_plane_stress.max(worst);
        }
        history.records.push(StepRecord {
            step,
            time,
            u_control: program.value_at(time),
            reaction: model.reaction(&increment.internal),
            cmod: model.cmod(&solver.displacement),
            iterations: spent,
            newton_iters_cum: history.total_iterations,
            cutbacks,
            residuals: increment.residuals,
        });
        let at_break = (time - next_break).abs() <= eps;
        let last = time >= end - eps;
        let wanted = match policy {
            SnapshotPolicy::Breakpoints => at_break,
            SnapshotPolicy::Every(n) => n > 0 && step % n == 0,
            SnapshotPolicy::Final => false,
        };
        if wanted || last {
            history.snapshots.push(solver.snapshot(step, time));
        }
    }
    Ok(())
}
