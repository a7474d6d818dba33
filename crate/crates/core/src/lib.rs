//! Constitutive kernel of the discontinuous strain method: a Rankine /
//! Drucker–Prager plastic-damage model whose post-failure deformation is
//! carried by a reversible discontinuity strain, so that cracks can close and
//! reopen under cyclic loading.
//!
//! Everything is generic over [`Real`] (`f32`, `f64`); the `*64` aliases at the
//! crate root fix the scalar to `f64`, which is what the finite element layer uses.

// `!(x > 0)` deliberately rejects NaN; index loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod damage;
pub mod error;
pub mod material;
pub mod moduli;
pub mod num;
pub mod params;
pub mod plasticity;
pub mod spectral;
pub mod tensor;
pub mod uniaxial;

pub use error::{Error, Result};
pub use material::{
    ClosureAccounting, Material, ModelOptions, PlaneStressResult, PlaneStressUpdate, PlaneVoigt, PointState,
    StepEvents, StepResult, Update,
};
pub use moduli::{ElasticModuli, Mat3, Mat6};
pub use num::{heaviside, macaulay, Real};
pub use params::{derive_alpha, derive_kc, DerivedParams, MaterialParams};
pub use spectral::{spectral_decompose, tensile_part, tension_compression_split, Spectral};
pub use tensor::{Invariants, SymTensor, Vec3};
pub use uniaxial::{UniaxialMaterial, UniaxialRecord, UniaxialState, UniaxialUpdate};

pub type SymTensor64 = SymTensor<f64>;
pub type SymTensor32 = SymTensor<f32>;
pub type Spectral64 = Spectral<f64>;
pub type MaterialParams64 = MaterialParams<f64>;
pub type DerivedParams64 = DerivedParams<f64>;
pub type ElasticModuli64 = ElasticModuli<f64>;
pub type PointState64 = PointState<f64>;
pub type PointState32 = PointState<f32>;
pub type Material64 = Material<f64>;
pub type Material32 = Material<f32>;
pub type UniaxialMaterial64 = UniaxialMaterial<f64>;
