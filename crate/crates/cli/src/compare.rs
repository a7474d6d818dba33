//! Comparison of two completed runs of the same load program.

use std::fmt;
use std::path::Path;

use dsm_fem::LoadProgram;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{read_curve, read_json, CurveRow, META_FILE};
use crate::run::RunMeta;

/// Peak-load differences above this fraction are reported as mesh dependent.
pub const MESH_DEPENDENCE_THRESHOLD: f64 = 0.15;

/// Slope of one unloading leg of the program, `ΔF / Δu` between its end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnloadSlope {
    /// Index of the unloading leg (1 for the first).
    pub cycle: usize,
    pub slope_a: f64,
    pub slope_b: f64,
    /// `slope_b / slope_a`; absent when `slope_a` is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub run_a: String,
    pub run_b: String,
    pub peak_a: f64,
    pub peak_b: f64,
    /// `|peak_a - peak_b| / max(|peak_a|, |peak_b|)`.
    pub peak_rel_diff: f64,
    /// Abscissa of the energy integral: `cmod` when both runs have a gauge, else `control`.
    pub energy_measure: String,
    pub energy_a: f64,
    pub energy_b: f64,
    pub energy_rel_diff: f64,
    pub unload_slopes: Vec<UnloadSlope>,
    pub mesh_dependent: bool,
}

pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn peak(rows: &[CurveRow]) -> f64 {
    rows.iter().map(|r| r.f_reaction).fold(0.0, f64::max)
}

/// Trapezoidal `∫F dx` over the envelope: the rows where the control
/// displacement reaches a new maximum. `x` is the CMOD when `use_cmod`,
/// otherwise the control displacement.
pub fn envelope_energy(rows: &[CurveRow], use_cmod: bool) -> f64 {
    let mut energy = 0.0;
    let mut reach = f64::NEG_INFINITY;
    let mut last: Option<(f64, f64)> = None;
    for r in rows {
        if r.u_control_mm < reach {
            continue;
        }
        reach = r.u_control_mm;
        let x = if use_cmod { r.cmod_mm.unwrap_or(0.0) } else { r.u_control_mm };
        if let Some((f0, x0)) = last {
            energy += 0.5 * (f0 + r.f_reaction) * (x - x0);
        }
        last = Some((r.f_reaction, x));
    }
    energy
}

fn row_at(rows: &[CurveRow], time: f64) -> Option<&CurveRow> {
    rows.iter().find(|r| (r.time - time).abs() <= 1e-9 * time.abs().max(1.0))
}

/// Secant slopes `ΔF / Δu` of the unloading legs of `program`.
pub fn unload_slopes(program: &LoadProgram, rows: &[CurveRow]) -> Vec<f64> {
    program
        .schedule
        .windows(2)
        .filter(|w| w[1][1] < w[0][1])
        .filter_map(|w| {
            let (a, b) = (row_at(rows, w[0][0])?, row_at(rows, w[1][0])?);
            Some((a.f_reaction - b.f_reaction) / (a.u_control_mm - b.u_control_mm))
        })
        .collect()
}

pub fn compare_rows(program: &LoadProgram, a: &[CurveRow], b: &[CurveRow]) -> CompareReport {
    let use_cmod = a.iter().chain(b).all(|r| r.cmod_mm.is_some());
    let (peak_a, peak_b) = (peak(a), peak(b));
    let (energy_a, energy_b) = (envelope_energy(a, use_cmod), envelope_energy(b, use_cmod));
    let unload_slopes = unload_slopes(program, a)
        .into_iter()
        .zip(unload_slopes(program, b))
        .enumerate()
        .map(|(i, (slope_a, slope_b))| UnloadSlope {
            cycle: i + 1,
            slope_a,
            slope_b,
            ratio: (slope_a != 0.0).then(|| slope_b / slope_a),
        })
        .collect();
    let peak_rel_diff = relative_difference(peak_a, peak_b);
    CompareReport {
        run_a: String::new(),
        run_b: String::new(),
        peak_a,
        peak_b,
        peak_rel_diff,
        energy_measure: if use_cmod { "cmod" } else { "control" }.to_string(),
        energy_a,
        energy_b,
        energy_rel_diff: relative_difference(energy_a, energy_b),
        unload_slopes,
        mesh_dependent: peak_rel_diff > MESH_DEPENDENCE_THRESHOLD,
    }
}

/// Compares the runs stored in `dir_a` and `dir_b`; both must have run the same load program.
pub fn compare_runs(dir_a: &Path, dir_b: &Path) -> Result<CompareReport, CliError> {
    let meta_a: RunMeta = read_json(&dir_a.join(META_FILE))?;
    let meta_b: RunMeta = read_json(&dir_b.join(META_FILE))?;
    if meta_a.config.program != meta_b.config.program {
        return Err(CliError::Compare(format!(
            "load programs differ ({} vs {})",
            meta_a.config.name, meta_b.config.name
        )));
    }
    let (a, b) = (read_curve(dir_a)?, read_curve(dir_b)?);
    let mut report = compare_rows(&meta_a.config.program, &a, &b);
    report.run_a = dir_a.display().to_string();
    report.run_b = dir_b.display().to_string();
    Ok(report)
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A: {}", self.run_a)?;
        writeln!(f, "B: {}", self.run_b)?;
        writeln!(
            f,
            "peak load        A {:.4}  B {:.4}  rel. diff {:.4}",
            self.peak_a, self.peak_b, self.peak_rel_diff
        )?;
        writeln!(
            f,
            "envelope energy  A {:.6}  B {:.6}  rel. diff {:.4}  (over {})",
            self.energy_a, self.energy_b, self.energy_rel_diff, self.energy_measure
        )?;
        for s in &self.unload_slopes {
            let ratio = s.ratio.map_or("n/a".to_string(), |r| format!("{r:.4}"));
            writeln!(f, "unload {}  slope A {:.4}  B {:.4}  ratio {}", s.cycle, s.slope_a, s.slope_b, ratio)?;
        }
        if self.mesh_dependent {
            write!(f, "MESH-DEPENDENT: peak loads differ by more than {:.0}%", 100.0 * MESH_DEPENDENCE_THRESHOLD)
        } else {
            write!(f, "peak loads agree within {:.0}%", 100.0 * MESH_DEPENDENCE_THRESHOLD)
        }
    }
}
