//! Case configuration files: TOML, or JSON when the file ends in `.json`.

use std::path::{Path, PathBuf};

use dsm_core::{Error as CoreError, MaterialParams64};
use dsm_fem::{
    Boundary, LPanel, LoadProgram, Mesh, MeshSizing, Model, NotchedBeam, Problem, SnapshotPolicy, SolverConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "DSM_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    pub mesh: MeshConfig,
    pub material: MaterialParams64,
    pub program: LoadProgram,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    #[default]
    Coarse,
    Fine,
}

/// Where the mesh comes from. Generated meshes use the sizing of the
/// selected refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshSource {
    NotchedBeam(NotchedBeam),
    LPanel(LPanel),
    /// JSON file with `mesh` and `boundary` objects, relative to the config file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    #[serde(flatten)]
    pub source: MeshSource,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub coarse: Option<MeshSizing>,
    #[serde(default)]
    pub fine: Option<MeshSizing>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; `out/<name>` when absent.
    pub dir: Option<PathBuf>,
    /// Field snapshot cadence (`breakpoints` = cycle extrema, `final`, or `{ every = n }`).
    pub fields: SnapshotPolicy,
}

/// Mesh plus boundary conditions as stored in a mesh file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub mesh: Mesh,
    pub boundary: Boundary,
}

impl CaseConfig {
    /// Reads a configuration; relative mesh file paths are resolved against
    /// the directory of `path`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config: CaseConfig = if json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?
        };
        if let MeshSource::File(file) = &mut config.mesh.source {
            if file.is_relative() {
                *file = path.parent().unwrap_or(Path::new(".")).join(&*file);
            }
        }
        Ok(config)
    }

    /// Checks every field that can be checked without building the mesh.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty".into()));
        }
        self.material.validate().map_err(material_error)?;
        self.program.validate().map_err(|e| invalid("program", strip_prefix(&e.to_string())))?;
        self.solver.validate().map_err(|e| invalid("solver", strip_prefix(&e.to_string())))?;
        match &self.mesh.source {
            MeshSource::File(path) => {
                if !path.is_file() {
                    return Err(invalid("mesh.file", format!("{} does not exist", path.display())));
                }
            }
            _ => {
                let (field, sizing) = self.sizing_entry();
                let sizing =
                    sizing.ok_or_else(|| invalid(field, "is required by the selected refinement level".into()))?;
                sizing.validate().map_err(|e| invalid(field, strip_prefix(&e.to_string())))?;
            }
        }
        Ok(())
    }

    fn sizing_entry(&self) -> (&'static str, Option<&MeshSizing>) {
        match self.mesh.refinement {
            Refinement::Coarse => ("mesh.coarse", self.mesh.coarse.as_ref()),
            Refinement::Fine => ("mesh.fine", self.mesh.fine.as_ref()),
        }
    }

    /// Generates or reads the mesh and its boundary conditions.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let sizing = || self.sizing_entry().1.ok_or_else(|| invalid(self.sizing_entry().0, "is missing".into()));
        match &self.mesh.source {
            MeshSource::NotchedBeam(beam) => beam.build(sizing()?).map_err(CliError::Setup),
            MeshSource::LPanel(panel) => panel.build(sizing()?).map_err(CliError::Setup),
            MeshSource::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
                let file: MeshFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Parse { path: path.clone(), message: e.to_string() })?;
                file.mesh.validate().map_err(CliError::Setup)?;
                Ok(Problem { mesh: file.mesh, boundary: file.boundary })
            }
        }
    }

    /// Validates the configuration and sets up the discretized model,
    /// including the bound on the characteristic length of every element.
    pub fn model(&self) -> Result<Model, CliError> {
        self.validate()?;
        let problem = self.problem()?;
        Model::new(problem.mesh, self.material, problem.boundary, self.solver.clone()).map_err(CliError::Setup)
    }

    /// `DSM_OUTPUT_DIR`, else `output.dir`, else `out/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(dir);
        }
        self.output.dir.clone().unwrap_or_else(|| Path::new("out").join(&self.name))
    }
}

fn invalid(field: &str, reason: String) -> CliError {
    CliError::Invalid { field: field.to_string(), reason }
}

fn strip_prefix(message: &str) -> String {
    message.strip_prefix("invalid setup: ").unwrap_or(message).to_string()
}

/// Names the offending field by its configuration key.
fn material_error(e: CoreError) -> CliError {
    match e {
        CoreError::Parameter { field, reason } => {
            let key = match field {
                "E" => "young",
                "nu" => "poisson",
                "sigma_y" => "yield_stress",
                "G_f" => "fracture_energy",
                "beta" => "dilation",
                "d_c" => "critical_damage",
                other => other,
            };
            invalid(&format!("material.{key}"), reason)
        }
        other => invalid("material", other.to_string()),
    }
}
