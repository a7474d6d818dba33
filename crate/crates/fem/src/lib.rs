//! Plane finite element solver for the discontinuous strain damage model.
//!
//! Linear triangles (one quadrature point) and bilinear quadrilaterals (2x2
//! Gauss points) carry one [`dsm_core::PointState`] per quadrature point. The
//! crack band width of an element is the square root of its area. The
//! solution is displacement controlled: a driven node set follows a
//! piecewise-linear schedule and each increment is solved by Newton's method
//! with the finite-difference material tangent, cutting the increment back
//! when an attempt fails.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod element;
pub mod error;
pub mod generate;
pub mod mesh;
pub mod model;
pub mod solver;

pub use element::{ElementKind, PointGeometry};
pub use error::{FemError, Result};
pub use generate::{LPanel, MeshSizing, NotchedBeam, Problem};
pub use mesh::{Element, Mesh};
pub use model::{Boundary, Control, Evaluation, Fixity, Hypothesis, Model, SolverConfig};
pub use solver::{
    run_program, FieldSnapshot, LoadProgram, PointSample, RunFailure, SnapshotPolicy, SolutionHistory, Solver,
    StepRecord,
};
