use crate::instance::{FeederContext, MicrogridInstance};

use super::capability::ramping_capability;
use super::schedule::{optimal_schedule, unconstrained_schedule};
use super::{run_indexed, AnalysisConfig, AnalysisError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Optimal,
    Infeasible,
    SolverLimit,
}

impl PointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointStatus::Optimal => "optimal",
            PointStatus::Infeasible => "infeasible",
            PointStatus::SolverLimit => "solver_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: f64,
    /// Present only when the status is `Optimal`.
    pub value: Option<f64>,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Capability and unconstrained operating cost at each line capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCapacitySweep {
    pub capability: SweepCurve,
    pub cost: SweepCurve,
}

fn check_parameters(parameters: &[f64]) -> Result<(), AnalysisError> {
    let ordered = parameters.windows(2).all(|w| w[0] < w[1]);
    let valid = parameters.iter().all(|p| p.is_finite() && *p >= 0.0);
    if ordered && valid {
        Ok(())
    } else {
        Err(AnalysisError::InvalidSweep)
    }
}

fn point(parameter: f64, result: Result<f64, AnalysisError>) -> Result<SweepPoint, AnalysisError> {
    let (value, status) = match result {
        Ok(v) => (Some(v), PointStatus::Optimal),
        Err(e) if e.is_infeasible() => (None, PointStatus::Infeasible),
        Err(AnalysisError::SolverLimit { .. }) => (None, PointStatus::SolverLimit),
        Err(e) => return Err(e),
    };
    Ok(SweepPoint {
        parameter,
        value,
        status,
    })
}

/// Runs the capability and cost analyses once per transfer limit. Points run
/// one after another; each analysis uses the configured workers itself.
pub fn capability_vs_line_capacity(
    instance: &MicrogridInstance,
    limits: &[f64],
    config: &AnalysisConfig,
) -> Result<LineCapacitySweep, AnalysisError> {
    check_parameters(limits)?;
    let report_only = FeederContext::empty(instance.periods(), f64::INFINITY);
    let mut sweep = LineCapacitySweep {
        capability: SweepCurve::default(),
        cost: SweepCurve::default(),
    };
    for &limit in limits {
        let inst = instance.with_transfer_limit(limit);
        let capability = ramping_capability(&inst, config).map(|r| r.capability);
        sweep.capability.points.push(point(limit, capability)?);
        let cost = unconstrained_schedule(&inst, &report_only, config).map(|s| s.cost);
        sweep.cost.points.push(point(limit, cost)?);
        log::info!("transfer limit {limit}: done");
    }
    Ok(sweep)
}

/// Minimum operating cost for each uniform utility ramp target.
pub fn cost_vs_ramp_limit(
    instance: &MicrogridInstance,
    feeder: &FeederContext,
    capability: f64,
    targets: &[f64],
    config: &AnalysisConfig,
) -> Result<SweepCurve, AnalysisError> {
    check_parameters(targets)?;
    // Points are independent; spread them over the workers and solve each
    // point's MILP single-threaded.
    let inner = AnalysisConfig {
        workers: 1,
        ..config.clone()
    };
    let results = run_indexed(targets.len(), config.workers, |i| {
        optimal_schedule(instance, &feeder.with_ramp_target(targets[i]), capability, &inner).map(|s| s.cost)
    });
    let points = targets
        .iter()
        .zip(results)
        .map(|(&p, r)| point(p, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepCurve { points })
}
