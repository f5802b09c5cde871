//! Pluggable MILP backends.

use crate::bnb::{solve_milp, MilpSolution, SolveOptions};
use crate::error::SolverError;
use crate::model::MilpModel;

/// Environment variable naming the default backend.
pub const BACKEND_ENV: &str = "MICRORAMP_BACKEND";

/// Name of the built-in branch-and-bound backend.
pub const BUILTIN: &str = "bnb";

/// Anything able to solve a [`MilpModel`] can stand in for the built-in engine.
pub trait MilpBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<MilpSolution, SolverError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound;

impl MilpBackend for BranchAndBound {
    fn name(&self) -> &str {
        BUILTIN
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<MilpSolution, SolverError> {
        solve_milp(model, options)
    }
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn MilpBackend>, SolverError> {
    match name.trim().to_ascii_lowercase().as_str() {
        BUILTIN | "builtin" | "branch-and-bound" => Ok(Box::new(BranchAndBound)),
        other => Err(SolverError::UnknownBackend(other.to_string())),
    }
}

/// Backend named by [`BACKEND_ENV`], or the built-in one when unset.
pub fn default_backend() -> Result<Box<dyn MilpBackend>, SolverError> {
    match std::env::var(BACKEND_ENV) {
        Ok(name) if !name.trim().is_empty() => backend_by_name(&name),
        _ => Ok(Box::new(BranchAndBound)),
    }
}
