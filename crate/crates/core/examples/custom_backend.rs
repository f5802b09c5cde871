//! Plug a different MILP engine into the analyses. This one wraps the
//! built-in solver and tallies the work it does.
//!
//!     cargo run --release --example custom_backend

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use microramp::{bundled, ramping_capability, AnalysisConfig};
use microramp_milp::{BranchAndBound, MilpBackend, MilpModel, MilpSolution, SolveOptions, SolverError};

#[derive(Default)]
struct Counting {
    solves: AtomicUsize,
    nodes: AtomicUsize,
}

impl MilpBackend for Counting {
    fn name(&self) -> &str {
        "counting"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<MilpSolution, SolverError> {
        let sol = BranchAndBound.solve(model, options)?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        self.nodes.fetch_add(sol.nodes, Ordering::Relaxed);
        Ok(sol)
    }
}

fn main() -> anyhow::Result<()> {
    let backend = Arc::new(Counting::default());
    let config = AnalysisConfig {
        backend: backend.clone(),
        ..AnalysisConfig::default()
    };
    let r = ramping_capability(&bundled::instance(), &config)?;
    println!(
        "R = {:.3} MW after {} solves and {} nodes",
        r.capability,
        backend.solves.load(Ordering::Relaxed),
        backend.nodes.load(Ordering::Relaxed)
    );
    Ok(())
}
