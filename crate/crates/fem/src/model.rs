//! Discretized boundary value problem: per-element materials, degrees of
//! freedom, and the assembly of internal forces and the algorithmic tangent.

use dsm_core::{ClosureAccounting, Material64, MaterialParams64, ModelOptions, PointState64, SymTensor64};
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::element::PointGeometry;
use crate::error::{FemError, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    #[default]
    PlaneStress,
    PlaneStrain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Free-DOF residual norm relative to the reaction norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub hypothesis: Hypothesis,
    /// Mobilize the discontinuity strain at critical damage.
    pub discontinuity: bool,
    pub closure: ClosureAccounting,
    /// Uses one characteristic length (mm) for every element instead of the
    /// element size. This breaks mesh objectivity on purpose and exists only
    /// to demonstrate that effect.
    pub length_override: Option<f64>,
    /// Exit tolerance of the plane-stress iteration relative to `σ_y`.
    pub plane_stress_tol: f64,
    pub plane_stress_max_iter: usize,
    /// Floor of the reference force as a multiple of `E` times the mesh diameter.
    pub force_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let point = ModelOptions::default();
        Self {
            tolerance: 1e-6,
            max_iterations: 20,
            hypothesis: Hypothesis::PlaneStress,
            discontinuity: true,
            closure: point.closure,
            length_override: None,
            plane_stress_tol: point.plane_stress_tol,
            plane_stress_max_iter: point.plane_stress_max_iter,
            force_floor: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tolerance", self.tolerance),
            ("plane_stress_tol", self.plane_stress_tol),
            ("force_floor", self.force_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FemError::Setup(format!("solver {name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 || self.plane_stress_max_iter == 0 {
            return Err(FemError::Setup("iteration limits must be at least 1".into()));
        }
        if let Some(l) = self.length_override {
            if !(l > 0.0 && l.is_finite()) {
                return Err(FemError::Setup(format!("length override must be positive, got {l}")));
            }
        }
        Ok(())
    }

    pub fn point_options(&self) -> ModelOptions {
        ModelOptions {
            discontinuity: self.discontinuity,
            closure: self.closure,
            plane_stress_tol: self.plane_stress_tol,
            plane_stress_max_iter: self.plane_stress_max_iter,
        }
    }
}

/// Homogeneous Dirichlet conditions on a node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixity {
    pub node_set: String,
    #[serde(default)]
    pub x: bool,
    #[serde(default)]
    pub y: bool,
}

/// Driven node set: every node moves by `value * direction`. Zero
/// components of `direction` leave that displacement component free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    pub node_set: String,
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub fixed: Vec<Fixity>,
    pub control: Control,
    /// Node set holding the two crack-mouth gauge nodes.
    #[serde(default)]
    pub gauge: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dof {
    Free(usize),
    Fixed,
    Driven,
}

/// Internal forces, updated point states and (optionally) element tangents
/// for one trial displacement field.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub internal: Vec<f64>,
    pub states: Vec<PointState64>,
    element_tangents: Option<Vec<Vec<f64>>>,
}

struct ElementResult {
    forces: Vec<f64>,
    states: Vec<PointState64>,
    tangent: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub mesh: Mesh,
    pub params: MaterialParams64,
    pub boundary: Boundary,
    pub config: SolverConfig,
    materials: Vec<Material64>,
    geometry: Vec<PointGeometry>,
    offsets: Vec<usize>,
    dofs: Vec<Dof>,
    free_count: usize,
    driven: Vec<(usize, f64)>,
    gauge: Option<([usize; 2], [f64; 2])>,
    reference_force: f64,
}

impl Model {
    pub fn new(mesh: Mesh, params: MaterialParams64, boundary: Boundary, config: SolverConfig) -> Result<Self> {
        mesh.validate()?;
        config.validate()?;
        params.validate().map_err(|e| FemError::Setup(format!("material parameters: {e}")))?;

        let bound = params.length_bound();
        let lengths: Vec<f64> =
            (0..mesh.elements.len()).map(|e| config.length_override.unwrap_or_else(|| mesh.char_length(e))).collect();
        let offending: Vec<usize> = (0..lengths.len()).filter(|&e| !(lengths[e] < bound)).collect();
        if !offending.is_empty() {
            let largest = offending.iter().map(|&e| lengths[e]).fold(0.0, f64::max);
            return Err(FemError::LengthBound { elements: offending, bound, largest });
        }
        let options = config.point_options();
        let materials = lengths
            .iter()
            .map(|&l| Material64::new(params, l, options))
            .collect::<dsm_core::Result<Vec<_>>>()
            .map_err(|e| FemError::Setup(e.to_string()))?;

        let mut geometry = Vec::new();
        let mut offsets = Vec::with_capacity(mesh.elements.len() + 1);
        for e in 0..mesh.elements.len() {
            offsets.push(geometry.len());
            geometry.extend(mesh.point_geometry(e));
        }
        offsets.push(geometry.len());

        let mut dofs = vec![Dof::Free(0); mesh.dof_count()];
        for fix in &boundary.fixed {
            for &n in mesh.node_set(&fix.node_set)? {
                if fix.x {
                    dofs[2 * n] = Dof::Fixed;
                }
                if fix.y {
                    dofs[2 * n + 1] = Dof::Fixed;
                }
            }
        }
        let dir = boundary.control.direction;
        if !(dir[0].is_finite() && dir[1].is_finite()) || (dir[0] == 0.0 && dir[1] == 0.0) {
            return Err(FemError::Setup("control direction must be a finite non-zero vector".into()));
        }
        let mut driven = Vec::new();
        for &n in mesh.node_set(&boundary.control.node_set)? {
            for c in 0..2 {
                if dir[c] != 0.0 {
                    if dofs[2 * n + c] == Dof::Fixed {
                        return Err(FemError::Setup(format!("node {n} is both fixed and driven")));
                    }
                    if dofs[2 * n + c] != Dof::Driven {
                        dofs[2 * n + c] = Dof::Driven;
                        driven.push((2 * n + c, dir[c]));
                    }
                }
            }
        }
        if driven.is_empty() {
            return Err(FemError::Setup("control node set is empty".into()));
        }
        let mut free_count = 0;
        for d in dofs.iter_mut() {
            if let Dof::Free(i) = d {
                *i = free_count;
                free_count += 1;
            }
        }

        let gauge = match &boundary.gauge {
            Some(name) => {
                let set = mesh.node_set(name)?;
                if set.len() != 2 {
                    return Err(FemError::Setup(format!(
                        "gauge set '{name}' must hold exactly two nodes, found {}",
                        set.len()
                    )));
                }
                let (a, b) = (mesh.nodes[set[0]], mesh.nodes[set[1]]);
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let axis = if len > 0.0 { [d[0] / len, d[1] / len] } else { [1.0, 0.0] };
                Some(([set[0], set[1]], axis))
            }
            None => None,
        };

        let reference_force = config.force_floor * params.young * mesh.diameter();
        Ok(Self {
            mesh,
            params,
            boundary,
            config,
            materials,
            geometry,
            offsets,
            dofs,
            free_count,
            driven,
            gauge,
            reference_force,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.dofs.len()
    }

    pub fn free_dof_count(&self) -> usize {
        self.free_count
    }

    pub fn point_count(&self) -> usize {
        self.geometry.len()
    }

    /// Range of quadrature point indices of element `e`.
    pub fn element_points(&self, e: usize) -> std::ops::Range<usize> {
        self.offsets[e]..self.offsets[e + 1]
    }

    pub fn point_geometry(&self, p: usize) -> &PointGeometry {
        &self.geometry[p]
    }

    pub fn material(&self, e: usize) -> &Material64 {
        &self.materials[e]
    }

    /// Smallest and largest damage growth constant over the elements.
    pub fn alpha_range(&self) -> [f64; 2] {
        self.materials
            .iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |r, m| [r[0].min(m.derived.alpha), r[1].max(m.derived.alpha)])
    }

    pub fn length_range(&self) -> [f64; 2] {
        self.materials
            .iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |r, m| [r[0].min(m.derived.length), r[1].max(m.derived.length)])
    }

    pub fn virgin_states(&self) -> Vec<PointState64> {
        vec![PointState64::virgin(); self.point_count()]
    }

    /// Free-DOF index of global DOF `dof`, if it is free.
    pub fn free_index(&self, dof: usize) -> Option<usize> {
        match self.dofs[dof] {
            Dof::Free(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        !matches!(self.dofs[dof], Dof::Free(_))
    }

    /// Sets the driven DOFs of `u` to the control displacement `value` (mm).
    pub fn apply_control(&self, u: &mut [f64], value: f64) {
        for &(dof, dir) in &self.driven {
            u[dof] = value * dir;
        }
    }

    /// Force along the control direction summed over the driven nodes.
    pub fn reaction(&self, internal: &[f64]) -> f64 {
        self.driven.iter().map(|&(dof, dir)| internal[dof] * dir).sum()
    }

    /// Crack mouth opening displacement (mm) of the gauge pair.
    pub fn cmod(&self, u: &[f64]) -> Option<f64> {
        self.gauge.map(|([a, b], axis)| (u[2 * b] - u[2 * a]) * axis[0] + (u[2 * b + 1] - u[2 * a + 1]) * axis[1])
    }

    /// Norm of the free part of `internal` and of the constrained part.
    pub fn residual_norms(&self, internal: &[f64]) -> (f64, f64) {
        let (mut free, mut fixed) = (0.0, 0.0);
        for (dof, f) in internal.iter().enumerate() {
            if self.is_constrained(dof) {
                fixed += f * f;
            } else {
                free += f * f;
            }
        }
        (free.sqrt(), fixed.sqrt())
    }

    /// Force scale against which the residual is measured.
    pub fn reference_force(&self, internal: &[f64]) -> f64 {
        self.residual_norms(internal).1.max(self.reference_force)
    }

    /// Updates every quadrature point from `committed` by the strain of the
    /// displacement increment `du` and assembles the internal forces. Element
    /// tangents are computed when `with_tangent` is set.
    pub fn evaluate(&self, committed: &[PointState64], du: &[f64], with_tangent: bool) -> Result<Evaluation> {
        if committed.len() != self.point_count() || du.len() != self.dof_count() {
            return Err(FemError::Setup("state or displacement vector has the wrong length".into()));
        }
        let results = (0..self.mesh.elements.len())
            .into_par_iter()
            .map(|e| self.evaluate_element(e, committed, du, with_tangent))
            .collect::<Result<Vec<_>>>()?;

        let mut internal = vec![0.0; self.dof_count()];
        let mut states = Vec::with_capacity(self.point_count());
        let mut tangents = with_tangent.then(|| Vec::with_capacity(results.len()));
        for (e, r) in results.into_iter().enumerate() {
            for (i, &node) in self.mesh.elements[e].nodes.iter().enumerate() {
                internal[2 * node] += r.forces[2 * i];
                internal[2 * node + 1] += r.forces[2 * i + 1];
            }
            states.extend(r.states);
            if let (Some(all), Some(k)) = (tangents.as_mut(), r.tangent) {
                all.push(k);
            }
        }
        Ok(Evaluation { internal, states, element_tangents: tangents })
    }

    fn evaluate_element(
        &self,
        e: usize,
        committed: &[PointState64],
        du: &[f64],
        with_tangent: bool,
    ) -> Result<ElementResult> {
        let nodes = &self.mesh.elements[e].nodes;
        let n = 2 * nodes.len();
        let ue: Vec<f64> = nodes.iter().flat_map(|&a| [du[2 * a], du[2 * a + 1]]).collect();
        let mut forces = vec![0.0; n];
        let mut tangent = with_tangent.then(|| vec![0.0; n * n]);
        let mut states = Vec::with_capacity(self.offsets[e + 1] - self.offsets[e]);
        for (q, p) in self.element_points(e).enumerate() {
            let geo = &self.geometry[p];
            let de = geo.strain(&ue);
            let (stress, c, state) = self
                .update_point(&self.materials[e], &committed[p], de, with_tangent)
                .map_err(|source| FemError::Material { element: e, point: q, source })?;
            states.push(state);
            for i in 0..n {
                let b = geo.b_column(i / 2, i % 2);
                forces[i] += geo.weight * (b[0] * stress[0] + b[1] * stress[1] + b[2] * stress[2]);
            }
            if let (Some(k), Some(c)) = (tangent.as_mut(), c) {
                let bs: Vec<[f64; 3]> = (0..n).map(|i| geo.b_column(i / 2, i % 2)).collect();
                for j in 0..n {
                    // C B_j
                    let cb: [f64; 3] = std::array::from_fn(|r| (0..3).map(|s| c[r][s] * bs[j][s]).sum());
                    for i in 0..n {
                        k[i * n + j] += geo.weight * (bs[i][0] * cb[0] + bs[i][1] * cb[1] + bs[i][2] * cb[2]);
                    }
                }
            }
        }
        Ok(ElementResult { forces, states, tangent })
    }

    /// In-plane stress `[σ11, σ22, σ12]`, optional 3x3 tangent and updated state.
    #[allow(clippy::type_complexity)]
    fn update_point(
        &self,
        material: &Material64,
        state: &PointState64,
        de: [f64; 3],
        with_tangent: bool,
    ) -> dsm_core::Result<([f64; 3], Option<[[f64; 3]; 3]>, PointState64)> {
        let plane = |s: &SymTensor64| [s.xx, s.yy, s.xy];
        match self.config.hypothesis {
            Hypothesis::PlaneStress => {
                if with_tangent {
                    let r = material.plane_stress_tangent(state, &de)?;
                    Ok((plane(&r.update.stress), Some(r.tangent), r.update.state))
                } else {
                    let up = material.integrate_plane_stress(state, &de)?;
                    Ok((plane(&up.stress), None, up.state))
                }
            }
            Hypothesis::PlaneStrain => {
                let full = SymTensor64::new(de[0], de[1], 0.0, 0.5 * de[2], 0.0, 0.0);
                if with_tangent {
                    let r = material.integrate_with_tangent(state, &full)?;
                    const IDX: [usize; 3] = [0, 1, 3];
                    let c = std::array::from_fn(|i| std::array::from_fn(|j| r.tangent[IDX[i]][IDX[j]]));
                    Ok((plane(&r.stress), Some(c), r.state))
                } else {
                    let up = material.integrate(state, &full)?;
                    Ok((plane(&up.stress), None, up.state))
                }
            }
        }
    }

    fn tangent_triplets(
        &self,
        eval: &Evaluation,
        map: impl Fn(usize) -> Option<usize>,
    ) -> Vec<Triplet<usize, usize, f64>> {
        let Some(tangents) = &eval.element_tangents else {
            return Vec::new();
        };
        let mut triplets = Vec::new();
        for (e, k) in tangents.iter().enumerate() {
            let dofs: Vec<Option<usize>> =
                self.mesh.elements[e].nodes.iter().flat_map(|&a| [map(2 * a), map(2 * a + 1)]).collect();
            let n = dofs.len();
            for (i, ri) in dofs.iter().enumerate() {
                let Some(r) = ri else { continue };
                for (j, cj) in dofs.iter().enumerate() {
                    if let Some(c) = cj {
                        triplets.push(Triplet::new(*r, *c, k[i * n + j]));
                    }
                }
            }
        }
        triplets
    }

    /// Tangent over all DOFs.
    pub fn global_tangent(&self, eval: &Evaluation) -> Result<SparseColMat<usize, f64>> {
        let n = self.dof_count();
        SparseColMat::try_new_from_triplets(n, n, &self.tangent_triplets(eval, Some))
            .map_err(|e| FemError::Linear(format!("{e:?}")))
    }

    /// Tangent restricted to the free DOFs.
    pub fn free_tangent(&self, eval: &Evaluation) -> Result<SparseColMat<usize, f64>> {
        let n = self.free_count;
        SparseColMat::try_new_from_triplets(n, n, &self.tangent_triplets(eval, |d| self.free_index(d)))
            .map_err(|e| FemError::Linear(format!("{e:?}")))
    }

    /// Free part of a global vector.
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.free_count];
        for (dof, x) in v.iter().enumerate() {
            if let Dof::Free(i) = self.dofs[dof] {
                out[i] = *x;
            }
        }
        out
    }

    /// Adds the free-DOF vector `delta` to the global vector `u`.
    pub fn add_free(&self, u: &mut [f64], delta: &[f64]) {
        for (dof, x) in u.iter_mut().enumerate() {
            if let Dof::Free(i) = self.dofs[dof] {
                *x += delta[i];
            }
        }
    }
}
