//! Shape functions, quadrature and strain-displacement operators of the
//! 3-node triangle and the 4-node quadrilateral.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Tri3,
    Quad4,
}

/// Largest node count of the supported elements.
pub const MAX_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub xi: [f64; 2],
    pub weight: f64,
}

const GAUSS: f64 = 0.577_350_269_189_625_8;

const TRI3_RULE: [QuadPoint; 1] = [QuadPoint { xi: [1.0 / 3.0, 1.0 / 3.0], weight: 0.5 }];

const QUAD4_RULE: [QuadPoint; 4] = [
    QuadPoint { xi: [-GAUSS, -GAUSS], weight: 1.0 },
    QuadPoint { xi: [GAUSS, -GAUSS], weight: 1.0 },
    QuadPoint { xi: [GAUSS, GAUSS], weight: 1.0 },
    QuadPoint { xi: [-GAUSS, GAUSS], weight: 1.0 },
];

const QUAD4_CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Tri3 => 3,
            ElementKind::Quad4 => 4,
        }
    }

    /// One point for the triangle, 2x2 Gauss for the quadrilateral.
    pub fn quadrature(self) -> &'static [QuadPoint] {
        match self {
            ElementKind::Tri3 => &TRI3_RULE,
            ElementKind::Quad4 => &QUAD4_RULE,
        }
    }

    /// Shape function values and parametric derivatives at `xi`.
    pub fn shape(self, xi: [f64; 2]) -> ([f64; MAX_NODES], [[f64; 2]; MAX_NODES]) {
        let mut n = [0.0; MAX_NODES];
        let mut dn = [[0.0; 2]; MAX_NODES];
        match self {
            ElementKind::Tri3 => {
                n[..3].copy_from_slice(&[1.0 - xi[0] - xi[1], xi[0], xi[1]]);
                dn[..3].copy_from_slice(&[[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
            }
            ElementKind::Quad4 => {
                for (a, c) in QUAD4_CORNERS.iter().enumerate() {
                    n[a] = 0.25 * (1.0 + c[0] * xi[0]) * (1.0 + c[1] * xi[1]);
                    dn[a] = [0.25 * c[0] * (1.0 + c[1] * xi[1]), 0.25 * c[1] * (1.0 + c[0] * xi[0])];
                }
            }
        }
        (n, dn)
    }
}

/// Geometry of one quadrature point in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    /// Physical coordinates (mm).
    pub position: [f64; 2],
    /// Shape function gradients `∂N_a/∂x`.
    pub gradients: [[f64; 2]; MAX_NODES],
    pub det_jacobian: f64,
    /// Quadrature weight times `det J` (mm² per unit thickness).
    pub weight: f64,
}

impl PointGeometry {
    /// Evaluates an element with node coordinates `coords` at `qp`.
    pub fn new(kind: ElementKind, coords: &[[f64; 2]], qp: &QuadPoint) -> Self {
        let (n, dn) = kind.shape(qp.xi);
        let mut jac = [[0.0; 2]; 2];
        let mut position = [0.0; 2];
        for (a, x) in coords.iter().enumerate() {
            for i in 0..2 {
                position[i] += n[a] * x[i];
                for j in 0..2 {
                    jac[i][j] += x[i] * dn[a][j];
                }
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        let mut gradients = [[0.0; 2]; MAX_NODES];
        for a in 0..coords.len() {
            // ∂N/∂x_i = Σ_j ∂N/∂ξ_j ∂ξ_j/∂x_i
            for i in 0..2 {
                gradients[a][i] = dn[a][0] * inv[0][i] + dn[a][1] * inv[1][i];
            }
        }
        Self { position, gradients, det_jacobian: det, weight: qp.weight * det }
    }

    /// In-plane strain `[ε11, ε22, γ12]` of the nodal displacements `u` (interleaved x, y).
    pub fn strain(&self, u: &[f64]) -> [f64; 3] {
        let mut e = [0.0; 3];
        for (a, g) in self.gradients.iter().enumerate().take(u.len() / 2) {
            let (ux, uy) = (u[2 * a], u[2 * a + 1]);
            e[0] += g[0] * ux;
            e[1] += g[1] * uy;
            e[2] += g[1] * ux + g[0] * uy;
        }
        e
    }

    /// Column `2a + c` of the strain-displacement matrix.
    pub fn b_column(&self, a: usize, c: usize) -> [f64; 3] {
        let g = self.gradients[a];
        if c == 0 {
            [g[0], 0.0, g[1]]
        } else {
            [0.0, g[1], g[0]]
        }
    }
}
