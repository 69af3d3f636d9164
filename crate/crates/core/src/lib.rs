//! Two-level systems in a common squeezed vacuum bath: the collective
//! Lindblad operator, its decoherence-free subspace, master-equation
//! dynamics, closed-form stationary states and entanglement diagnostics.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! at the crate root fix the scalar to `f64`, which is what the CLI and the
//! acceptance suite use.

pub mod couplings;
pub mod dfs;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod random;
pub mod scalar;
pub mod scenario;
pub mod state;
pub mod stationary;

pub use error::{Error, Result};
pub use scalar::{CMatrix, CVector, Cx, Real};

pub type SqueezeParams64 = operators::SqueezeParams<f64>;
pub type KetState64 = state::KetState<f64>;
pub type DensityMatrix64 = state::DensityMatrix<f64>;
pub type DfsBasis64 = dfs::DfsBasis<f64>;
pub type OperatorMatrix64 = CMatrix<f64>;

pub type SqueezeParams32 = operators::SqueezeParams<f32>;
pub type KetState32 = state::KetState<f32>;
pub type DensityMatrix32 = state::DensityMatrix<f32>;
