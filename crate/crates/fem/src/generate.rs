//! Structured, graded meshes of the benchmark specimens.
//!
//! Each specimen mesh has a zone of square elements of edge `band_size`
//! along the expected crack path; element edges grow geometrically away from
//! it up to `max_size`. Dimensions are inputs; the defaults used by the case
//! files are documented there.

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::mesh::{Element, Mesh};
use crate::model::{Boundary, Control, Fixity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSizing {
    /// Edge of the square elements along the expected crack path (mm).
    pub band_size: f64,
    /// Width of the uniformly refined zone (mm); rounded up to whole elements.
    pub band_width: f64,
    /// Largest element edge away from the crack path (mm).
    pub max_size: f64,
    /// Ratio of neighboring element edges in the graded zones.
    pub growth: f64,
    /// Split every quadrilateral into two triangles.
    #[serde(default)]
    pub triangles: bool,
}

impl MeshSizing {
    pub fn validate(&self) -> Result<()> {
        let ok = self.band_size > 0.0
            && self.band_width >= 0.0
            && self.max_size >= self.band_size
            && self.growth >= 1.0
            && [self.band_size, self.band_width, self.max_size, self.growth].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(FemError::Setup(format!(
                "mesh sizing needs band_size > 0, max_size >= band_size and growth >= 1, got {self:?}"
            )))
        }
    }
}

/// A generated specimen: mesh plus supports, driven set and gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub mesh: Mesh,
    pub boundary: Boundary,
}

/// Element edges covering `length`, starting at `start` and growing by
/// `growth` up to `max`, scaled to fit exactly.
pub fn graded_sizes(length: f64, start: f64, max: f64, growth: f64) -> Vec<f64> {
    let mut sizes = Vec::new();
    let mut sum = 0.0;
    let mut s = start;
    while sum + 0.5 * s.min(max) < length {
        let e = s.min(max);
        sizes.push(e);
        sum += e;
        s *= growth;
    }
    if sizes.is_empty() {
        return vec![length];
    }
    let scale = length / sum;
    sizes.iter().map(|e| e * scale).collect()
}

/// Monotone list of grid lines along one axis.
#[derive(Debug, Clone)]
struct Axis(Vec<f64>);

impl Axis {
    fn start(x: f64) -> Self {
        Self(vec![x])
    }

    fn end(&self) -> f64 {
        *self.0.last().unwrap()
    }

    fn uniform(mut self, to: f64, size: f64) -> Self {
        let from = self.end();
        let n = ((to - from) / size).round().max(1.0) as usize;
        for i in 1..n {
            self.0.push(from + (to - from) * i as f64 / n as f64);
        }
        self.0.push(to);
        self
    }

    /// Edges grow away from the current end.
    fn coarsen(mut self, to: f64, s: &MeshSizing) -> Self {
        let from = self.end();
        let mut x = from;
        let sizes = graded_sizes(to - from, s.band_size, s.max_size, s.growth);
        for (i, e) in sizes.iter().enumerate() {
            x += e;
            self.0.push(if i + 1 == sizes.len() { to } else { x });
        }
        self
    }

    /// Edges shrink towards `to`.
    fn refine(mut self, to: f64, s: &MeshSizing) -> Self {
        let from = self.end();
        let sizes = graded_sizes(to - from, s.band_size, s.max_size, s.growth);
        let mut x = from;
        for (i, e) in sizes.iter().rev().enumerate() {
            x += e;
            self.0.push(if i + 1 == sizes.len() { to } else { x });
        }
        self
    }
}

/// Quadrilaterals on the tensor grid `xs × ys`, keeping cells whose center
/// satisfies `keep`. Only nodes used by kept cells are created.
fn block_mesh(xs: &[f64], ys: &[f64], keep: impl Fn([f64; 2]) -> bool, triangles: bool) -> Result<Mesh> {
    let (nx, ny) = (xs.len(), ys.len());
    let mut used = vec![false; nx * ny];
    let mut cells = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let center = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
            if keep(center) {
                let ids = [j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i];
                for id in ids {
                    used[id] = true;
                }
                cells.push(ids);
            }
        }
    }
    let mut index = vec![usize::MAX; nx * ny];
    let mut nodes = Vec::new();
    for (id, u) in used.iter().enumerate() {
        if *u {
            index[id] = nodes.len();
            nodes.push([xs[id % nx], ys[id / nx]]);
        }
    }
    let mut elements = Vec::new();
    for c in cells {
        let q = c.map(|id| index[id]);
        if triangles {
            elements.push(Element::tri3([q[0], q[1], q[2]]));
            elements.push(Element::tri3([q[0], q[2], q[3]]));
        } else {
            elements.push(Element::quad4(q));
        }
    }
    Mesh::new(nodes, elements)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Three-point bending beam with a notch of one band element width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchedBeam {
    pub length: f64,
    pub span: f64,
    pub height: f64,
    pub notch_depth: f64,
    /// Horizontal position of the notch relative to midspan (mm).
    #[serde(default)]
    pub notch_offset: f64,
    /// Width of the rigid loading pad at the top of midspan (mm).
    pub load_pad: f64,
}

impl NotchedBeam {
    /// Beam spanning `x ∈ [-length/2, length/2]`, `y ∈ [0, height]`, supported
    /// at the bottom at `±span/2` and loaded downwards at the top of midspan.
    pub fn build(&self, s: &MeshSizing) -> Result<Problem> {
        s.validate()?;
        let h = s.band_size;
        let (half_l, half_s) = (0.5 * self.length, 0.5 * self.span);
        if !(self.span > 0.0 && self.length >= self.span && self.height > self.notch_depth && self.notch_depth >= 0.0) {
            return Err(FemError::Setup(format!("inconsistent beam dimensions {self:?}")));
        }
        let c = self.notch_offset;
        let lo = c.min(0.0) - 0.5 * s.band_width;
        let hi = c.max(0.0) + 0.5 * s.band_width;
        let n_left = ((c - 0.5 * h - lo) / h).ceil().max(0.0);
        let n_right = ((hi - c - 0.5 * h) / h).ceil().max(0.0);
        let z0 = c - 0.5 * h - n_left * h;
        let z1 = c + 0.5 * h + n_right * h;
        if !(z0 > -half_s && z1 < half_s) {
            return Err(FemError::Setup("refined zone reaches the supports".into()));
        }
        let mut x = Axis::start(-half_l);
        if half_l > half_s {
            x = x.uniform(-half_s, s.max_size);
        }
        x = x.refine(z0, s).uniform(z1, h).coarsen(half_s, s);
        if half_l > half_s {
            x = x.uniform(half_l, s.max_size);
        }
        let mut y = Axis::start(0.0);
        if self.notch_depth > 0.0 {
            y = y.uniform(self.notch_depth, h);
        }
        y = y.uniform(self.height, h);

        let a = self.notch_depth;
        let keep = |p: [f64; 2]| !(p[1] < a && (p[0] - c).abs() < 0.5 * h);
        let mut mesh = block_mesh(&x.0, &y.0, keep, s.triangles)?;
        let support_left = mesh.nodes_where(|p| close(p[0], -half_s) && close(p[1], 0.0));
        let support_right = mesh.nodes_where(|p| close(p[0], half_s) && close(p[1], 0.0));
        let mut load = mesh.nodes_where(|p| close(p[1], self.height) && p[0].abs() <= 0.5 * self.load_pad + 1e-9);
        if load.is_empty() {
            let top = mesh.nodes_where(|p| close(p[1], self.height));
            let nearest = top
                .into_iter()
                .min_by(|&i, &j| mesh.nodes[i][0].abs().total_cmp(&mesh.nodes[j][0].abs()))
                .ok_or_else(|| FemError::Setup("beam has no top nodes".into()))?;
            load.push(nearest);
        }
        let mut gauge = mesh.nodes_where(|p| close(p[1], 0.0) && close((p[0] - c).abs(), 0.5 * h));
        gauge.sort_by(|&i, &j| mesh.nodes[i][0].total_cmp(&mesh.nodes[j][0]));
        mesh.add_node_set("support_left", support_left)?;
        mesh.add_node_set("support_right", support_right)?;
        mesh.add_node_set("load", load)?;
        let has_gauge = a > 0.0 && gauge.len() == 2;
        if has_gauge {
            mesh.add_node_set("gauge", gauge)?;
        }
        let band: Vec<usize> =
            (0..mesh.elements.len()).filter(|&e| (mesh.element_centroid(e)[0] - c).abs() < 0.5 * h).collect();
        mesh.add_element_set("notch_column", band)?;
        Ok(Problem {
            mesh,
            boundary: Boundary {
                fixed: vec![
                    Fixity { node_set: "support_left".into(), x: true, y: true },
                    Fixity { node_set: "support_right".into(), x: false, y: true },
                ],
                control: Control { node_set: "load".into(), direction: [0.0, -1.0] },
                gauge: has_gauge.then(|| "gauge".into()),
            },
        })
    }
}

/// L-shaped panel: the square `[0, size]²` without its lower right corner
/// `[size - cutout, size] × [0, cutout]`, clamped at the bottom and driven
/// vertically near the tip of the arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LPanel {
    pub size: f64,
    pub cutout: f64,
    /// Distance of the load from the right edge (mm).
    pub load_offset: f64,
    pub load_pad: f64,
}

impl LPanel {
    pub fn build(&self, s: &MeshSizing) -> Result<Problem> {
        s.validate()?;
        let h = s.band_size;
        let (xc, yc) = (self.size - self.cutout, self.cutout);
        let xl = self.size - self.load_offset;
        if !(self.cutout > 0.0 && self.cutout < self.size && self.load_offset > 0.0 && self.load_offset < self.cutout) {
            return Err(FemError::Setup(format!("inconsistent panel dimensions {self:?}")));
        }
        let n_band = (0.5 * s.band_width / h).ceil().max(1.0);
        let (y0, y1) = (yc - n_band * h, yc + n_band * h);
        if !(y0 > 0.0 && y1 < self.size) {
            return Err(FemError::Setup("refined zone leaves the panel".into()));
        }
        let x = Axis::start(0.0).uniform(xc, h).coarsen(xl, s).uniform(self.size, s.max_size.min(self.load_offset));
        let y = Axis::start(0.0).refine(y0, s).uniform(y1, h).coarsen(self.size, s);

        let keep = |p: [f64; 2]| !(p[0] > xc && p[1] < yc);
        let mut mesh = block_mesh(&x.0, &y.0, keep, s.triangles)?;
        let bottom = mesh.nodes_where(|p| close(p[1], 0.0));
        let mut load =
            mesh.nodes_where(|p| close(p[1], yc) && p[0] > xc && (p[0] - xl).abs() <= 0.5 * self.load_pad + 1e-9);
        if load.is_empty() {
            load = mesh.nodes_where(|p| close(p[1], yc) && close(p[0], xl));
        }
        mesh.add_node_set("bottom", bottom)?;
        mesh.add_node_set("load", load)?;
        let band: Vec<usize> = (0..mesh.elements.len())
            .filter(|&e| {
                let c = mesh.element_centroid(e);
                c[0] < xc && c[1] > yc && c[1] < yc + h
            })
            .collect();
        mesh.add_element_set("corner_row", band)?;
        Ok(Problem {
            mesh,
            boundary: Boundary {
                fixed: vec![Fixity { node_set: "bottom".into(), x: true, y: true }],
                control: Control { node_set: "load".into(), direction: [0.0, 1.0] },
                gauge: None,
            },
        })
    }
}
