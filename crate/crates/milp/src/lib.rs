//! Mixed-integer linear programming for small scheduling models.
//!
//! The crate provides a solver-agnostic model ([`MilpModel`]), a bounded
//! variable dual simplex for LP relaxations ([`solve_lp`]) and a
//! branch-and-bound driver ([`solve_milp`]) behind the [`MilpBackend`]
//! trait so other engines can be plugged in.

pub mod backend;
pub mod bnb;
pub mod error;
pub mod lp;
pub mod lp_format;
pub mod model;
pub mod reference;

pub use backend::{backend_by_name, default_backend, BranchAndBound, MilpBackend, BACKEND_ENV};
pub use bnb::{solve_milp, Branching, MilpSolution, MilpStatus, SolveOptions};
pub use error::{ModelError, SolverError};
pub use lp::{solve_lp, LpOptions, LpSolution, LpStatus};
pub use lp_format::write_lp;
pub use model::{Constraint, MilpModel, ObjSense, Objective, RowSense, VarId, VarKind, Variable};
