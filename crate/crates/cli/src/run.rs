//! Running one case configuration and writing its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dsm_fem::{run_program, Model, SolutionHistory};
use serde::{Deserialize, Serialize};

use crate::config::CaseConfig;
use crate::error::{CliError, ErrorRecord};
use crate::output::{self, CURVE_FILE, ERROR_FILE, META_FILE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub elements: usize,
    pub quadrature_points: usize,
    /// Smallest and largest characteristic length used by the elements (mm).
    pub length_range: [f64; 2],
    /// Upper bound `2 E G_f / σ_y²` on the characteristic length (mm).
    pub length_bound: f64,
    /// Smallest and largest softening constant `α` over the elements.
    pub alpha_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub step: usize,
    pub time: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub increments: usize,
    /// Newton iterations including those of failed attempts.
    pub newton_iterations: usize,
    pub cutbacks: usize,
    pub peak_reaction: f64,
    /// Largest `|σ̃₃₃|` over all committed plane-stress states (MPa).
    pub max_out_of_plane_stress: f64,
}

/// Content of `run_meta.json`: the resolved configuration, mesh statistics,
/// iteration totals and wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool_version: String,
    pub status: RunStatus,
    pub config: CaseConfig,
    pub mesh: MeshSummary,
    pub totals: RunTotals,
    pub snapshots: Vec<SnapshotEntry>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

/// Result of a run whose artifacts were written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub meta: RunMeta,
    pub history: SolutionHistory,
}

pub fn mesh_summary(model: &Model) -> MeshSummary {
    MeshSummary {
        nodes: model.mesh.nodes.len(),
        elements: model.mesh.elements.len(),
        quadrature_points: model.point_count(),
        length_range: model.length_range(),
        length_bound: model.params.length_bound(),
        alpha_range: model.alpha_range(),
    }
}

fn totals(history: &SolutionHistory) -> RunTotals {
    RunTotals {
        increments: history.records.len().saturating_sub(1),
        newton_iterations: history.total_iterations,
        cutbacks: history.total_cutbacks,
        peak_reaction: history.peak_reaction(),
        max_out_of_plane_stress: history.max_out_of_plane_stress,
    }
}

/// Validates `config`, runs it and writes the artifacts into `dir`.
///
/// A solver failure still writes the partial curve, the last state's fields,
/// `run_meta.json` and `error.json` before returning [`CliError::Solver`].
pub fn run_case_in(config: &CaseConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let model = config.model()?;
    output::create_dir(dir)?;
    for stale in [CURVE_FILE, META_FILE, ERROR_FILE] {
        let _ = std::fs::remove_file(dir.join(stale));
    }
    let start = Instant::now();
    let (history, failure) = match run_program(&model, &config.program, config.output.fields) {
        Ok(h) => (h, None),
        Err(f) => (f.history, Some(f.error)),
    };
    let wall_time_s = start.elapsed().as_secs_f64();

    output::write_curve(dir, &history.records)?;
    let mut snapshots = Vec::with_capacity(history.snapshots.len());
    for s in &history.snapshots {
        let path = output::write_fields(dir, &model.mesh, s)?;
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        snapshots.push(SnapshotEntry { step: s.step, time: s.time, file });
    }
    let error = failure.map(CliError::Solver);
    let meta = RunMeta {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        status: if error.is_some() { RunStatus::Failed } else { RunStatus::Completed },
        config: config.clone(),
        mesh: mesh_summary(&model),
        totals: totals(&history),
        snapshots,
        wall_time_s,
        error: error.as_ref().map(CliError::record),
    };
    output::write_json(&dir.join(META_FILE), &meta)?;
    match error {
        Some(e) => {
            output::write_json(&dir.join(ERROR_FILE), &e.record())?;
            Err(e)
        }
        None => Ok(RunOutcome { dir: dir.to_path_buf(), meta, history }),
    }
}

/// Runs `config` into its resolved output directory.
pub fn run_case(config: &CaseConfig) -> Result<RunOutcome, CliError> {
    run_case_in(config, &config.output_dir())
}

/// Writes `error.json` for a failure that happened before the run started,
/// when the output directory is known.
pub fn record_setup_failure(dir: &Path, error: &CliError) -> Result<(), CliError> {
    output::create_dir(dir)?;
    output::write_json(&dir.join(ERROR_FILE), &error.record())
}
