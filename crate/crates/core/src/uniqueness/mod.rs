//! Linear uniqueness test for tripartite pure states.
//!
//! A purification consistent with the `AB` marginal has the form
//! `Σ a_{ijl} |ijk>|e_{lk}>` and one consistent with `AC` has the form
//! `Σ a_{irk} |ijk>|f_{rj}>`. Equating the two gives a homogeneous linear system in
//! the environment vectors, one equation per basis product `|ijk>`. Its kernel always
//! contains the identity pattern `e_{lk} = δ_{lk}`, `f_{rj} = δ_{rj}`; when that is the
//! whole kernel, the only purification is the original state times an environment
//! state, so the `AB` and `AC` marginals fix the state.

mod consistency;
mod elimination;
mod split;
mod survey;

pub use consistency::{
    build_consistency_matrix, check_linear_uniqueness, identity_pattern_vector, ConsistencyMatrix, LinearVerdict,
    TripartiteShape, UniquenessVerdict, Unknown, DEFAULT_RANK_POLICY, PATTERN_MATCH_TOL,
};
pub use elimination::{sequential_elimination_trace, EliminationOutcome, EliminationStep, EliminationTrace};
pub use split::{party_split, party_split_with_cap, PartySplit, MAX_TOTAL_DIM};
pub use survey::{grouped_marginal_subsets, linear_survey, tripartite_grouping, LinearSurveyStats, LinearTrialRecord};

use thiserror::Error;

use crate::tensor::TensorError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UniquenessError {
    #[error("expected a tripartite state, got {0} parties")]
    NotTripartite(usize),
    #[error("shape {0} violates M >= N + P - 1")]
    BelowBound(TripartiteShape),
    #[error("party split needs m >= 1 and d >= 2 (got m = {m}, d = {d})")]
    InvalidSplit { m: usize, d: usize },
    #[error("total dimension {d}^{parties} exceeds cap {cap}")]
    DimensionCap { d: usize, parties: usize, cap: usize },
    #[error("a survey needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
