//! Ramping capability, ramp-constrained scheduling and parameter sweeps.

mod capability;
mod check;
mod schedule;
mod sweep;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use microramp_milp::{Branching, BranchAndBound, MilpBackend, MilpModel, MilpStatus, SolveOptions, SolverError};
use thiserror::Error;

use crate::formulation::{BandDiagnosis, FormulationError, FormulationOptions, RampDirection};
use crate::validate::ValidationReport;

pub use capability::{ramping_capability, CapabilityResult, PeriodCapability};
pub use check::{check_schedule, Violation};
pub use schedule::{
    compute_ramp_bounds, decode_schedule, optimal_schedule, unconstrained_schedule, utility_ramp_profile,
    CostBreakdown, LoadSchedule, Schedule, ScheduleOutcome, StorageSchedule, UnitSchedule, UtilityProfile,
};
pub use sweep::{
    capability_vs_line_capacity, cost_vs_ramp_limit, LineCapacitySweep, PointStatus, SweepCurve, SweepPoint,
};

/// Solver settings shared by every analysis.
#[derive(Clone)]
pub struct AnalysisConfig {
    pub solve: SolveOptions,
    /// Independent MILPs (capability periods, sweep points) solved at once.
    pub workers: usize,
    pub formulation: FormulationOptions,
    pub backend: Arc<dyn MilpBackend>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            solve: SolveOptions {
                branching: Branching::Reliability,
                ..SolveOptions::default()
            },
            workers: 1,
            formulation: FormulationOptions::default(),
            backend: Arc::new(BranchAndBound),
        }
    }
}

impl fmt::Debug for AnalysisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalysisConfig")
            .field("solve", &self.solve)
            .field("workers", &self.workers)
            .field("formulation", &self.formulation)
            .field("backend", &self.backend.name())
            .finish()
    }
}

/// What made a schedule infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleCause {
    /// The microgrid cannot meet its own balance and limits at all.
    Balance,
    /// Each band is non-empty but together they cannot be followed.
    RampBands,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid input:\n{0}")]
    InvalidInput(ValidationReport),
    #[error(transparent)]
    Formulation(FormulationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{context}: infeasible ({cause:?})")]
    Infeasible { context: String, cause: InfeasibleCause },
    #[error("empty ramp band at {0}")]
    EmptyBand(BandDiagnosis),
    #[error("{context}: solver stopped with status {status:?}")]
    SolverLimit { context: String, status: MilpStatus },
    #[error("the horizon has no period transition to evaluate")]
    NoTransitions,
    #[error("sweep parameters must be non-negative and strictly increasing")]
    InvalidSweep,
    #[error("schedule failed certification: {0}")]
    Certification(String),
}

impl AnalysisError {
    /// True for the model-infeasible outcomes, as opposed to bad input or
    /// solver trouble.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, AnalysisError::Infeasible { .. } | AnalysisError::EmptyBand(_))
    }
}

impl From<FormulationError> for AnalysisError {
    fn from(e: FormulationError) -> Self {
        match e {
            FormulationError::InvalidInstance(report) => AnalysisError::InvalidInput(report),
            FormulationError::EmptyBand(d) => AnalysisError::EmptyBand(d),
            other => AnalysisError::Formulation(other),
        }
    }
}

/// Statistics of one MILP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub period: Option<usize>,
    pub direction: Option<RampDirection>,
    pub status: MilpStatus,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub gap: f64,
    pub wall_time: Duration,
}

/// An optimal solve; everything else becomes an error.
struct Solved {
    values: Vec<f64>,
    objective: f64,
    diagnostics: SolveDiagnostics,
}

enum SolveOutcome {
    Solved(Solved),
    Infeasible,
}

fn solve(
    config: &AnalysisConfig,
    model: &MilpModel,
    context: &str,
    period: Option<usize>,
    direction: Option<RampDirection>,
) -> Result<SolveOutcome, AnalysisError> {
    let sol = config.backend.solve(model, &config.solve)?;
    let diagnostics = SolveDiagnostics {
        period,
        direction,
        status: sol.status,
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        gap: sol.gap,
        wall_time: sol.wall_time,
    };
    log::debug!(
        "{context}: {:?} after {} nodes in {:?}",
        sol.status,
        sol.nodes,
        sol.wall_time
    );
    match (sol.status, sol.values, sol.objective) {
        (MilpStatus::Optimal, Some(values), Some(objective)) => Ok(SolveOutcome::Solved(Solved {
            values,
            objective,
            diagnostics,
        })),
        (MilpStatus::Infeasible, _, _) => Ok(SolveOutcome::Infeasible),
        (status, _, _) => Err(AnalysisError::SolverLimit {
            context: context.to_string(),
            status,
        }),
    }
}

/// Runs `job(0..count)` on up to `workers` threads; results keep job order.
fn run_indexed<T: Send>(count: usize, workers: usize, job: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                let value = job(i);
                results.lock().unwrap()[i] = Some(value);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every job ran")).collect()
}
