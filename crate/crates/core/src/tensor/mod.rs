//! States, density matrices and the dense linear algebra underneath them.

mod bloch;
mod density;
pub mod linalg;
mod rng;
mod signature;
mod state;

pub use bloch::{gell_mann_basis, BlochTable};
pub use density::{embed_local, partial_trace_matrix, DensityMatrix};
pub use linalg::{hermitian_eigen, rank_and_nullspace, CMatrix, CVector, HermitianEigen, RankInfo, TolPolicy};
pub use rng::SeededRng;
pub use signature::PartySignature;
pub use state::AmplitudeTensor;

use thiserror::Error;

/// Identities that hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Eigen/SVD reconstructions.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Rank decisions on generic random inputs.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("party signature must list at least one party")]
    EmptySignature,
    #[error("local dimension {0} is below 2")]
    InvalidDimension(usize),
    #[error("total Hilbert-space dimension overflows")]
    DimensionOverflow,
    #[error("party subset is empty")]
    EmptySubset,
    #[error("party index {index} out of range for {parties} parties")]
    PartyOutOfRange { index: usize, parties: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),
    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("Bloch decomposition needs equal local dimensions, got {0:?}")]
    MixedDimensions(Vec<usize>),
}
