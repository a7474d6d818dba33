//! Plane meshes of 3-node triangles and 4-node quadrilaterals with named node
//! and element sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::element::{ElementKind, PointGeometry};
use crate::error::{FemError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    /// Node indices, counter-clockwise.
    pub nodes: Vec<usize>,
}

impl Element {
    pub fn tri3(nodes: [usize; 3]) -> Self {
        Self { kind: ElementKind::Tri3, nodes: nodes.to_vec() }
    }

    pub fn quad4(nodes: [usize; 4]) -> Self {
        Self { kind: ElementKind::Quad4, nodes: nodes.to_vec() }
    }
}

/// Units: mm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    #[serde(default)]
    pub node_sets: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub element_sets: BTreeMap<String, Vec<usize>>,
}

impl Mesh {
    /// Builds and validates a mesh.
    pub fn new(nodes: Vec<[f64; 2]>, elements: Vec<Element>) -> Result<Self> {
        let mesh = Self { nodes, elements, ..Default::default() };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn dof_count(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn add_node_set(&mut self, name: &str, nodes: Vec<usize>) -> Result<()> {
        if let Some(bad) = nodes.iter().find(|&&n| n >= self.nodes.len()) {
            return Err(FemError::Mesh(format!("node set '{name}' references missing node {bad}")));
        }
        self.node_sets.insert(name.to_string(), nodes);
        Ok(())
    }

    pub fn add_element_set(&mut self, name: &str, elements: Vec<usize>) -> Result<()> {
        if let Some(bad) = elements.iter().find(|&&e| e >= self.elements.len()) {
            return Err(FemError::Mesh(format!("element set '{name}' references missing element {bad}")));
        }
        self.element_sets.insert(name.to_string(), elements);
        Ok(())
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize]> {
        self.node_sets.get(name).map(Vec::as_slice).ok_or_else(|| FemError::Mesh(format!("unknown node set '{name}'")))
    }

    /// Nodes whose coordinates satisfy `pred`, in index order.
    pub fn nodes_where(&self, pred: impl Fn([f64; 2]) -> bool) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| pred(self.nodes[i])).collect()
    }

    pub fn element_coords(&self, e: usize) -> Vec<[f64; 2]> {
        self.elements[e].nodes.iter().map(|&n| self.nodes[n]).collect()
    }

    /// Quadrature point geometry of element `e`.
    pub fn point_geometry(&self, e: usize) -> Vec<PointGeometry> {
        let kind = self.elements[e].kind;
        let coords = self.element_coords(e);
        kind.quadrature().iter().map(|qp| PointGeometry::new(kind, &coords, qp)).collect()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        self.point_geometry(e).iter().map(|g| g.weight).sum()
    }

    /// Crack band width `√A` of element `e`.
    pub fn char_length(&self, e: usize) -> f64 {
        self.element_area(e).sqrt()
    }

    pub fn element_centroid(&self, e: usize) -> [f64; 2] {
        let c = self.element_coords(e);
        let n = c.len() as f64;
        c.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0] / n, acc[1] + p[1] / n])
    }

    /// Smallest box containing all nodes: `[[xmin, ymin], [xmax, ymax]]`.
    pub fn bounding_box(&self) -> [[f64; 2]; 2] {
        let mut b = [[f64::INFINITY; 2], [f64::NEG_INFINITY; 2]];
        for p in &self.nodes {
            for i in 0..2 {
                b[0][i] = b[0][i].min(p[i]);
                b[1][i] = b[1][i].max(p[i]);
            }
        }
        b
    }

    pub fn diameter(&self) -> f64 {
        let b = self.bounding_box();
        ((b[1][0] - b[0][0]).powi(2) + (b[1][1] - b[0][1]).powi(2)).sqrt()
    }

    /// Checks connectivity, set references and positive Jacobians at every quadrature point.
    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(FemError::Mesh("mesh has no elements".into()));
        }
        if let Some(i) = self.nodes.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(FemError::Mesh(format!("node {i} has non-finite coordinates")));
        }
        for (e, el) in self.elements.iter().enumerate() {
            if el.nodes.len() != el.kind.node_count() {
                return Err(FemError::Mesh(format!(
                    "element {e} has {} nodes, {:?} needs {}",
                    el.nodes.len(),
                    el.kind,
                    el.kind.node_count()
                )));
            }
            if let Some(n) = el.nodes.iter().find(|&&n| n >= self.nodes.len()) {
                return Err(FemError::Mesh(format!("element {e} references missing node {n}")));
            }
            for (i, a) in el.nodes.iter().enumerate() {
                if el.nodes[i + 1..].contains(a) {
                    return Err(FemError::Mesh(format!("element {e} repeats node {a}")));
                }
            }
            for (q, g) in self.point_geometry(e).iter().enumerate() {
                if !(g.det_jacobian > 0.0) {
                    return Err(FemError::Mesh(format!(
                        "element {e} has a non-positive Jacobian ({:e}) at quadrature point {q}",
                        g.det_jacobian
                    )));
                }
            }
        }
        for (name, set) in &self.node_sets {
            if let Some(bad) = set.iter().find(|&&n| n >= self.nodes.len()) {
                return Err(FemError::Mesh(format!("node set '{name}' references missing node {bad}")));
            }
        }
        for (name, set) in &self.element_sets {
            if let Some(bad) = set.iter().find(|&&e| e >= self.elements.len()) {
                return Err(FemError::Mesh(format!("element set '{name}' references missing element {bad}")));
            }
        }
        Ok(())
    }
}
