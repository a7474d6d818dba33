//! Run artifacts: `curve.csv`, `fields_<step>.vtk`, `run_meta.json` and `error.json`.

use std::path::{Path, PathBuf};

use dsm_fem::{ElementKind, FieldSnapshot, Mesh, StepRecord};
use serde::{Deserialize, Serialize};
use vtkio::model::{
    Attribute, Attributes, ByteOrder, CellType, Cells, DataSet, ElementType, UnstructuredGridPiece, Version,
    VertexNumbers,
};
use vtkio::Vtk;

use crate::error::CliError;

pub const CURVE_FILE: &str = "curve.csv";
pub const META_FILE: &str = "run_meta.json";
pub const ERROR_FILE: &str = "error.json";
pub const CURVE_HEADER: [&str; 6] = ["step", "time", "u_control_mm", "F_reaction", "CMOD_mm", "newton_iters_cum"];

/// One row of `curve.csv`. `CMOD_mm` is empty for specimens without a gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub step: usize,
    pub time: f64,
    pub u_control_mm: f64,
    #[serde(rename = "F_reaction")]
    pub f_reaction: f64,
    #[serde(rename = "CMOD_mm")]
    pub cmod_mm: Option<f64>,
    pub newton_iters_cum: usize,
}

impl From<&StepRecord> for CurveRow {
    fn from(r: &StepRecord) -> Self {
        Self {
            step: r.step,
            time: r.time,
            u_control_mm: r.u_control,
            f_reaction: r.reaction,
            cmod_mm: r.cmod,
            newton_iters_cum: r.newton_iters_cum,
        }
    }
}

pub(crate) fn write_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Write { path: path.to_path_buf(), message: e.to_string() }
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| write_error(dir, e))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| write_error(path, e))?;
    }
    w.flush().map_err(|e| write_error(path, e))
}

pub fn write_curve(dir: &Path, records: &[StepRecord]) -> Result<PathBuf, CliError> {
    let path = dir.join(CURVE_FILE);
    write_csv(&path, records.iter().map(CurveRow::from))?;
    Ok(path)
}

pub fn read_curve(dir: &Path) -> Result<Vec<CurveRow>, CliError> {
    let path = dir.join(CURVE_FILE);
    let parse = |e: csv::Error| CliError::Parse { path: path.clone(), message: e.to_string() };
    let mut reader = csv::Reader::from_path(&path).map_err(parse)?;
    let header: Vec<String> = reader.headers().map_err(parse)?.iter().map(str::to_string).collect();
    if header != CURVE_HEADER {
        return Err(CliError::Parse { path: path.clone(), message: format!("unexpected header {header:?}") });
    }
    reader.deserialize().collect::<Result<Vec<CurveRow>, _>>().map_err(parse)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| write_error(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| write_error(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn field_file_name(step: usize) -> String {
    format!("fields_{step:06}.vtk")
}

/// Element averages of the quadrature point fields of a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFields {
    pub damage: Vec<f64>,
    pub k: Vec<f64>,
    pub crack_opening: Vec<f64>,
    pub plastic_max: Vec<f64>,
}

impl CellFields {
    pub fn average(element_count: usize, snapshot: &FieldSnapshot) -> Self {
        let mut sums = vec![[0.0; 4]; element_count];
        let mut counts = vec![0usize; element_count];
        for p in &snapshot.points {
            let s = &mut sums[p.element];
            s[0] += p.damage;
            s[1] += p.k;
            s[2] += p.crack_opening;
            s[3] += p.plastic_max;
            counts[p.element] += 1;
        }
        let column = |i: usize| -> Vec<f64> {
            sums.iter().zip(&counts).map(|(s, &n)| if n == 0 { 0.0 } else { s[i] / n as f64 }).collect()
        };
        Self { damage: column(0), k: column(1), crack_opening: column(2), plastic_max: column(3) }
    }
}

/// Legacy ASCII VTK (version 3.0) unstructured grid with the displacement as
/// point data and element averages of damage, `k`, crack opening and the
/// largest principal plastic strain as cell data.
pub fn write_fields(dir: &Path, mesh: &Mesh, snapshot: &FieldSnapshot) -> Result<PathBuf, CliError> {
    let path = dir.join(field_file_name(snapshot.step));
    let cells = CellFields::average(mesh.elements.len(), snapshot);
    let points: Vec<f64> = mesh.nodes.iter().flat_map(|p| [p[0], p[1], 0.0]).collect();
    let displacement: Vec<f64> = snapshot.displacement.chunks(2).flat_map(|u| [u[0], u[1], 0.0]).collect();
    let mut vertices = Vec::new();
    let mut types = Vec::with_capacity(mesh.elements.len());
    for e in &mesh.elements {
        vertices.push(e.nodes.len() as u32);
        vertices.extend(e.nodes.iter().map(|&n| n as u32));
        types.push(match e.kind {
            ElementKind::Tri3 => CellType::Triangle,
            ElementKind::Quad4 => CellType::Quad,
        });
    }
    let scalar = |name: &str, data: Vec<f64>| Attribute::scalars(name, 1).with_data(data);
    let vtk = Vtk {
        version: Version::new((3, 0)),
        byte_order: ByteOrder::BigEndian,
        title: format!("step {} time {}", snapshot.step, snapshot.time),
        file_path: None,
        data: DataSet::inline(UnstructuredGridPiece {
            points: points.into(),
            cells: Cells {
                cell_verts: VertexNumbers::Legacy { num_cells: mesh.elements.len() as u32, vertices },
                types,
            },
            data: Attributes {
                point: vec![Attribute::DataArray(vtkio::model::DataArray {
                    name: "displacement".into(),
                    elem: ElementType::Vectors,
                    data: displacement.into(),
                })],
                cell: vec![
                    scalar("damage", cells.damage),
                    scalar("k", cells.k),
                    scalar("crack_opening", cells.crack_opening),
                    scalar("plastic_max", cells.plastic_max),
                ],
            },
        }),
    };
    vtk.export_ascii(&path).map_err(|e| write_error(&path, e))?;
    Ok(path)
}
