//! One-dimensional two-cycle demonstration.
//!
//! The first cycle stays below the critical damage; the second drives the
//! point past failure, unloads it into compression and so passes the crack
//! closure.

use std::path::{Path, PathBuf};

use dsm_core::{ModelOptions, UniaxialMaterial, UniaxialRecord};
use serde::{Deserialize, Serialize};

use crate::config::OUTPUT_DIR_ENV;
use crate::error::CliError;
use crate::output;

/// Strain targets of the two cycles.
pub const DEMO_TARGETS: [f64; 4] = [2e-4, 0.0, 1e-3, -1e-4];
pub const DEMO_STEP: f64 = 1e-6;
pub const DEMO_LENGTH: f64 = 30.0;
pub const DEMO_FILE: &str = "demo1d.csv";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub step: usize,
    pub strain: f64,
    pub stress: f64,
    pub effective_stress: f64,
    pub plastic_strain: f64,
    pub disc_strain: f64,
    pub k: f64,
    pub damage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoMeta {
    pub tool_version: String,
    pub discontinuity: bool,
    pub length: f64,
    pub params: dsm_core::MaterialParams<f64>,
    pub alpha: f64,
    pub k_crit: f64,
    pub targets: Vec<f64>,
    pub step: f64,
    /// Strain at which the total stress first reaches zero after the second peak.
    pub residual_strain: Option<f64>,
}

pub fn demo_material(discontinuity: bool, length: f64) -> Result<UniaxialMaterial<f64>, CliError> {
    let options = ModelOptions { discontinuity, ..Default::default() };
    UniaxialMaterial::new(&dsm_core::MaterialParams::center_notched_beam(), length, options).map_err(|e| match e {
        dsm_core::Error::Parameter { field, reason } => CliError::Invalid { field: field.to_string(), reason },
        other => CliError::Invalid { field: "ell".into(), reason: other.to_string() },
    })
}

pub fn demo_path(discontinuity: bool, length: f64) -> Result<Vec<UniaxialRecord<f64>>, CliError> {
    demo_material(discontinuity, length)?
        .drive(&DEMO_TARGETS, DEMO_STEP)
        .map_err(|e| CliError::Invalid { field: "ell".into(), reason: e.to_string() })
}

/// Linear interpolation of the strain where the stress first drops to zero
/// after the largest strain of the path.
pub fn residual_strain(path: &[UniaxialRecord<f64>]) -> Option<f64> {
    let top = path.iter().enumerate().max_by(|a, b| a.1.strain.total_cmp(&b.1.strain))?.0;
    path[top..].windows(2).find(|w| w[0].stress > 0.0 && w[1].stress <= 0.0).map(|w| {
        let f = w[0].stress / (w[0].stress - w[1].stress);
        w[0].strain + f * (w[1].strain - w[0].strain)
    })
}

pub fn default_demo_dir(discontinuity: bool) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    Path::new("out").join(if discontinuity { "demo1d" } else { "demo1d_no_discontinuity" })
}

/// Writes `demo1d.csv` and `run_meta.json` into `dir`.
pub fn run_demo(discontinuity: bool, length: f64, dir: &Path) -> Result<DemoMeta, CliError> {
    let material = demo_material(discontinuity, length)?;
    let path = demo_path(discontinuity, length)?;
    output::create_dir(dir)?;
    let rows = path.iter().enumerate().map(|(step, r)| DemoRow {
        step,
        strain: r.strain,
        stress: r.stress,
        effective_stress: r.state.stress,
        plastic_strain: r.state.plastic_strain,
        disc_strain: r.state.disc_strain,
        k: r.state.k,
        damage: r.state.damage,
    });
    output::write_csv(&dir.join(DEMO_FILE), rows)?;
    let meta = DemoMeta {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        discontinuity,
        length,
        params: dsm_core::MaterialParams::center_notched_beam(),
        alpha: material.derived.alpha,
        k_crit: material.derived.k_crit,
        targets: DEMO_TARGETS.to_vec(),
        step: DEMO_STEP,
        residual_strain: residual_strain(&path),
    };
    output::write_json(&dir.join(output::META_FILE), &meta)?;
    Ok(meta)
}
