pub mod bounds;
pub mod classical;
pub mod cli;
pub mod feasibility;
pub mod tensor;
pub mod uniqueness;
