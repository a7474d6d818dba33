#![allow(dead_code)]

use dsm_core::MaterialParams64;
use dsm_fem::{Boundary, Control, Element, Fixity, Mesh, Model, SolverConfig};

/// `nx × ny` quadrilaterals on `[0, w] × [0, h]`, interior nodes shifted by
/// `distortion` times the cell size.
pub fn patch(nx: usize, ny: usize, w: f64, h: f64, distortion: f64, triangles: bool) -> Mesh {
    let mut nodes = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let mut x = w * i as f64 / nx as f64;
            let mut y = h * j as f64 / ny as f64;
            if i > 0 && i < nx && j > 0 && j < ny {
                let s = ((i * 7 + j * 3) % 5) as f64 / 4.0 - 0.5;
                x += distortion * s * w / nx as f64;
                y -= distortion * s * h / ny as f64;
            }
            nodes.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            if triangles {
                elements.push(Element::tri3([q[0], q[1], q[2]]));
                elements.push(Element::tri3([q[0], q[2], q[3]]));
            } else {
                elements.push(Element::quad4(q));
            }
        }
    }
    let mut mesh = Mesh::new(nodes, elements).unwrap();
    let left = mesh.nodes_where(|p| p[0] == 0.0);
    let right = mesh.nodes_where(|p| p[0] == w);
    let origin = mesh.nodes_where(|p| p == [0.0, 0.0]);
    mesh.add_node_set("left", left).unwrap();
    mesh.add_node_set("right", right).unwrap();
    let bottom = mesh.nodes_where(|p| p[1] == 0.0);
    let top = mesh.nodes_where(|p| p[1] == h);
    mesh.add_node_set("origin", origin).unwrap();
    mesh.add_node_set("bottom", bottom).unwrap();
    mesh.add_node_set("top", top).unwrap();
    mesh
}

/// Left edge on rollers, origin pinned, right edge pulled along x.
pub fn bar_boundary() -> Boundary {
    Boundary {
        fixed: vec![
            Fixity { node_set: "left".into(), x: true, y: false },
            Fixity { node_set: "origin".into(), x: true, y: true },
        ],
        control: Control { node_set: "right".into(), direction: [1.0, 0.0] },
        gauge: None,
    }
}

pub fn tension_bar(mesh: Mesh, params: MaterialParams64, config: SolverConfig) -> Model {
    Model::new(mesh, params, bar_boundary(), config).unwrap()
}

/// Like [`bar_boundary`] with the top and bottom edges on rollers, so the
/// lateral stress stays compressive-free and away from zero.
pub fn confined_boundary() -> Boundary {
    Boundary {
        fixed: vec![
            Fixity { node_set: "left".into(), x: true, y: false },
            Fixity { node_set: "bottom".into(), x: false, y: true },
            Fixity { node_set: "top".into(), x: false, y: true },
        ],
        control: Control { node_set: "right".into(), direction: [1.0, 0.0] },
        gauge: None,
    }
}
