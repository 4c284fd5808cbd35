//! Uniqueness among all density matrices, decided numerically.
//!
//! The states matching a set of marginals form the intersection of an affine subspace
//! of Hermitian matrices with the PSD cone. Dykstra's alternating projections find
//! points of that intersection; starting from the original pure state pushed along the
//! kernel of the marginal map, a second marginal-consistent state shows up whenever one
//! exists near those directions.

mod constraints;
mod dykstra;
mod probe;

pub use constraints::{
    constraint_nullspace, project_affine, support_face, AffineProjector, HermitianCoords, MarginalConstraintSet,
};
pub use dykstra::{dykstra_solve, polish_on_face, project_psd, DykstraResult};
pub use probe::{
    genericity_survey, uniqueness_probe, FeasibilityVerdict, OracleVerdict, RunSummary, SurveyStats, TrialRecord,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::TensorError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("invalid projection config: {0}")]
    InvalidConfig(String),
    #[error("marginal constraints are inconsistent (least-squares residual {residual:e})")]
    Inconsistent { residual: f64 },
    #[error("target on parties {subset:?} has dims {found:?}, expected {expected:?}")]
    TargetMismatch {
        subset: Vec<usize>,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("matrix side {found} does not match signature dimension {expected}")]
    SideMismatch { expected: usize, found: usize },
    #[error("a survey needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub max_iterations: usize,
    /// Trace-norm step size below which Dykstra stops.
    pub convergence_tol: f64,
    /// Trace distance beyond which two states count as different.
    pub distinctness_tol: f64,
    pub restarts: usize,
    pub perturbation_scale: f64,
    pub seed: u64,
    /// Answer UNIQUE without restarts when the support face (see [`support_face`]) is
    /// one-dimensional, which pins the state exactly.
    pub face_certificate: bool,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            convergence_tol: 1e-9,
            distinctness_tol: 1e-4,
            restarts: 8,
            perturbation_scale: 0.1,
            seed: 0,
            face_certificate: true,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        let bad = |msg: &str| Err(FeasibilityError::InvalidConfig(msg.to_owned()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if !(self.convergence_tol > 0.0 && self.distinctness_tol > 0.0 && self.perturbation_scale > 0.0) {
            return bad("tolerances and perturbation scale must be positive");
        }
        if self.convergence_tol >= self.distinctness_tol {
            return bad("convergence_tol must be below distinctness_tol");
        }
        Ok(())
    }
}
