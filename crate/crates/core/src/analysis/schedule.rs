use crate::formulation::{base_formulation, RampBounds, VariableMap};
use crate::instance::{FeederContext, MicrogridInstance};
use crate::validate::validate_feeder;

use super::check::check_schedule;
use super::{solve, AnalysisConfig, AnalysisError, InfeasibleCause, SolveDiagnostics, SolveOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct UnitSchedule {
    pub id: String,
    pub power: Vec<f64>,
    pub committed: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageSchedule {
    pub id: String,
    pub discharge: Vec<f64>,
    pub charge: Vec<f64>,
    pub discharging: Vec<bool>,
    pub charging: Vec<bool>,
    /// Stored energy at the end of each period.
    pub energy: Vec<f64>,
}

impl StorageSchedule {
    /// Net injection (discharge minus charge) per period.
    pub fn net_power(&self) -> Vec<f64> {
        self.discharge.iter().zip(&self.charge).map(|(d, c)| d - c).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadSchedule {
    pub id: String,
    pub power: Vec<f64>,
    pub on: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    /// Unit energy and no-load cost.
    pub generation: f64,
    pub startup_shutdown: f64,
    /// Energy bought from the utility, net of sales.
    pub energy_purchase: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.generation + self.startup_shutdown + self.energy_purchase
    }
}

/// Decoded dispatch over the horizon. Per-period vectors are indexed by
/// `period - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub units: Vec<UnitSchedule>,
    pub storage: Vec<StorageSchedule>,
    pub loads: Vec<LoadSchedule>,
    /// Import (+) or export (-) per period.
    pub exchange: Vec<f64>,
    pub cost: CostBreakdown,
}

impl Schedule {
    pub fn periods(&self) -> usize {
        self.exchange.len()
    }
}

/// Feeder net load seen by the utility and its period-to-period changes.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityProfile {
    pub net_load: Vec<f64>,
    /// `ramps[k]` is the change from period `k + 1` into period `k + 2`.
    pub ramps: Vec<f64>,
}

impl UtilityProfile {
    pub fn max_abs_ramp(&self) -> f64 {
        self.ramps.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome {
    pub schedule: Schedule,
    /// Objective reported by the solver.
    pub cost: f64,
    pub utility: UtilityProfile,
    pub diagnostics: SolveDiagnostics,
}

/// Limits on the microgrid's exchange change that keep the feeder's ramp
/// within its target: the change must offset the other customers' change
/// to within `±target`. Defined from period 2 on; period 1 is unlimited.
pub fn compute_ramp_bounds(feeder: &FeederContext) -> RampBounds {
    let load = &feeder.customer_net_load;
    let mut bounds = RampBounds::unlimited(load.len());
    for t in 2..=load.len() {
        let target = feeder.ramp_target.at(t);
        let change = load[t - 1] - load[t - 2];
        bounds.lower[t - 1] = -target - change;
        bounds.upper[t - 1] = target - change;
    }
    bounds
}

pub fn utility_ramp_profile(schedule: &Schedule, feeder: &FeederContext) -> UtilityProfile {
    let net_load: Vec<f64> = schedule
        .exchange
        .iter()
        .zip(&feeder.customer_net_load)
        .map(|(m, c)| m + c)
        .collect();
    let ramps = net_load.windows(2).map(|w| w[1] - w[0]).collect();
    UtilityProfile { net_load, ramps }
}

/// Reads a solution vector back into a schedule. Costs are recomputed from
/// the decoded dispatch rather than taken from auxiliary variables.
pub fn decode_schedule(instance: &MicrogridInstance, vars: &VariableMap, values: &[f64]) -> Schedule {
    let get = |ids: &[microramp_milp::VarId]| ids.iter().map(|v| values[v.0]).collect::<Vec<f64>>();
    let flag = |ids: &[microramp_milp::VarId]| ids.iter().map(|v| values[v.0] > 0.5).collect::<Vec<bool>>();
    let tau = instance.step();
    let mut cost = CostBreakdown::default();

    let units: Vec<UnitSchedule> = instance
        .dispatchable_units
        .iter()
        .zip(&vars.units)
        .map(|(unit, v)| {
            let power = get(&v.power);
            let committed = flag(&v.on);
            let mut previous = unit.initial_committed;
            for (p, &on) in power.iter().zip(&committed) {
                cost.generation += unit.marginal_cost * p * tau;
                if on {
                    cost.generation += unit.no_load_cost * tau;
                }
                if on && !previous {
                    cost.startup_shutdown += unit.startup_cost;
                }
                if !on && previous {
                    cost.startup_shutdown += unit.shutdown_cost;
                }
                previous = on;
            }
            UnitSchedule {
                id: unit.id.clone(),
                power,
                committed,
            }
        })
        .collect();

    let storage = instance
        .storage_units
        .iter()
        .zip(&vars.storage)
        .map(|(s, v)| StorageSchedule {
            id: s.id.clone(),
            discharge: get(&v.discharge),
            charge: get(&v.charge),
            discharging: flag(&v.discharging),
            charging: flag(&v.charging),
            energy: get(&v.energy),
        })
        .collect();

    let loads = instance
        .adjustable_loads
        .iter()
        .zip(&vars.loads)
        .map(|(d, v)| LoadSchedule {
            id: d.id.clone(),
            power: get(&v.power),
            on: flag(&v.on),
        })
        .collect();

    let exchange = get(&vars.exchange);
    for (m, price) in exchange.iter().zip(&instance.grid_link.market_price) {
        cost.energy_purchase += price * m * tau;
    }
    Schedule {
        units,
        storage,
        loads,
        exchange,
        cost,
    }
}

fn solve_schedule(
    instance: &MicrogridInstance,
    band: Option<(&RampBounds, f64)>,
    feeder: &FeederContext,
    config: &AnalysisConfig,
) -> Result<ScheduleOutcome, AnalysisError> {
    let report = validate_feeder(feeder, instance.periods());
    if !report.is_valid() {
        return Err(AnalysisError::InvalidInput(report));
    }
    let base = base_formulation(instance, &config.formulation)?;
    let mut f = base.clone();
    if let Some((bounds, capability)) = band {
        f.add_ramp_band(bounds, capability)?;
    }
    f.set_cost_objective(instance);
    let solved = match solve(config, f.model(), "schedule", None, None)? {
        SolveOutcome::Solved(s) => s,
        SolveOutcome::Infeasible => {
            // Tell apart a microgrid that cannot operate at all from one that
            // cannot follow the bands.
            let mut plain = base;
            plain.set_cost_objective(instance);
            let cause = match (band, solve(config, plain.model(), "schedule without ramp bands", None, None)?) {
                (Some(_), SolveOutcome::Solved(_)) => InfeasibleCause::RampBands,
                _ => InfeasibleCause::Balance,
            };
            return Err(AnalysisError::Infeasible {
                context: "schedule".into(),
                cause,
            });
        }
    };
    let schedule = decode_schedule(instance, f.vars(), &solved.values);
    let violations = check_schedule(instance, &config.formulation, &schedule);
    if let Some(v) = violations.first() {
        return Err(AnalysisError::Certification(format!("{} violations, first: {v}", violations.len())));
    }
    let total = schedule.cost.total();
    if (total - solved.objective).abs() > 1e-6 * solved.objective.abs().max(1.0) {
        return Err(AnalysisError::Certification(format!(
            "cost components sum to {total} but the objective is {}",
            solved.objective
        )));
    }
    let utility = utility_ramp_profile(&schedule, feeder);
    if let Some((bounds, capability)) = band {
        for t in 2..=schedule.periods() {
            let target = feeder.ramp_target.at(t);
            let ramp = utility.ramps[t - 2];
            let change = schedule.exchange[t - 1] - schedule.exchange[t - 2];
            let tol = 1e-6;
            if ramp.abs() > target + tol
                || change < bounds.lower[t - 1] - tol
                || change > bounds.upper[t - 1] + tol
                || change.abs() > capability + tol
            {
                return Err(AnalysisError::Certification(format!(
                    "utility ramp {ramp} into period {t} exceeds the target {target}"
                )));
            }
        }
    }
    Ok(ScheduleOutcome {
        schedule,
        cost: solved.objective,
        utility,
        diagnostics: solved.diagnostics,
    })
}

/// Cheapest schedule whose exchange keeps the feeder ramp within the
/// feeder's target and never changes by more than `capability` per period.
pub fn optimal_schedule(
    instance: &MicrogridInstance,
    feeder: &FeederContext,
    capability: f64,
    config: &AnalysisConfig,
) -> Result<ScheduleOutcome, AnalysisError> {
    let report = validate_feeder(feeder, instance.periods());
    if !report.is_valid() {
        return Err(AnalysisError::InvalidInput(report));
    }
    let bounds = compute_ramp_bounds(feeder);
    solve_schedule(instance, Some((&bounds, capability)), feeder, config)
}

/// Cheapest schedule with no ramp restriction. The utility profile is
/// computed against `feeder` for reporting only.
pub fn unconstrained_schedule(
    instance: &MicrogridInstance,
    feeder: &FeederContext,
    config: &AnalysisConfig,
) -> Result<ScheduleOutcome, AnalysisError> {
    solve_schedule(instance, None, feeder, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bare_instance, one_unit_instance, small_instance};
    use crate::instance::RampTarget;

    fn feeder(load: Vec<f64>, target: f64) -> FeederContext {
        FeederContext {
            customer_net_load: load,
            ramp_target: RampTarget::Uniform(target),
        }
    }

    #[test]
    fn bounds_follow_feeder_changes() {
        let flat = compute_ramp_bounds(&feeder(vec![3.0; 3], 5.0));
        assert_eq!(flat.lower[1..], [-5.0, -5.0]);
        assert_eq!(flat.upper[1..], [5.0, 5.0]);
        assert!(flat.lower[0].is_infinite() && flat.upper[0].is_infinite());

        let jump = compute_ramp_bounds(&feeder(vec![10.0, 17.0], 2.0));
        assert_eq!((jump.lower[1], jump.upper[1]), (-9.0, -5.0));

        let fall = compute_ramp_bounds(&feeder(vec![10.0, 7.0], 3.0));
        assert_eq!((fall.lower[1], fall.upper[1]), (0.0, 6.0));
    }

    #[test]
    fn per_period_targets_are_used() {
        let f = FeederContext {
            customer_net_load: vec![0.0; 3],
            ramp_target: RampTarget::PerPeriod(vec![0.0, 1.0, 4.0]),
        };
        let b = compute_ramp_bounds(&f);
        assert_eq!(b.upper[1..], [1.0, 4.0]);
    }

    #[test]
    fn utility_profile_adds_feeder() {
        let mut s = Schedule {
            units: vec![],
            storage: vec![],
            loads: vec![],
            exchange: vec![2.0, 3.0],
            cost: CostBreakdown::default(),
        };
        let p = utility_ramp_profile(&s, &feeder(vec![8.0, 7.0], 1.0));
        assert_eq!(p.net_load, [10.0, 10.0]);
        assert_eq!(p.ramps, [0.0]);
        s.exchange = vec![-1.0, 2.5];
        let p = utility_ramp_profile(&s, &FeederContext::empty(2, 1.0));
        assert_eq!(p.net_load, s.exchange);
        assert_eq!(p.max_abs_ramp(), 3.5);
    }

    #[test]
    fn no_resources_buy_everything() {
        let inst = bare_instance(vec![10.0, 10.0], vec![50.0, 50.0], 20.0);
        let out = optimal_schedule(&inst, &feeder(vec![4.0, 4.0], 0.0), 0.0, &AnalysisConfig::default()).unwrap();
        assert!((out.cost - 1000.0).abs() < 1e-9);
        assert_eq!(out.schedule.exchange, [10.0, 10.0]);
        assert_eq!(out.utility.ramps, [0.0]);
        assert_eq!(out.schedule.cost.energy_purchase, 1000.0);
    }

    #[test]
    fn band_forces_unit_to_absorb_feeder_jump() {
        // Feeder rises 5; with target 1 the import must fall by at least 4.
        let inst = one_unit_instance(2);
        let config = AnalysisConfig::default();
        let free = unconstrained_schedule(&inst, &FeederContext::empty(2, 0.0), &config).unwrap();
        // Buying at 30 beats the unit only if it is dearer; here the unit is cheaper.
        assert!((free.cost - (4.0 * 30.0 + 6.0 * 20.0) * 2.0).abs() < 1e-9);

        let jump = feeder(vec![0.0, 5.0], 1.0);
        let out = optimal_schedule(&inst, &jump, 6.0, &config).unwrap();
        let change = out.schedule.exchange[1] - out.schedule.exchange[0];
        assert!((-6.0 - 1e-9..=-4.0 + 1e-9).contains(&change));
        assert!(out.utility.max_abs_ramp() <= 1.0 + 1e-9);
        assert!(out.cost >= free.cost - 1e-9);
    }

    #[test]
    fn band_beyond_capability_is_empty() {
        let inst = one_unit_instance(2);
        let err = optimal_schedule(&inst, &feeder(vec![0.0, 9.0], 1.0), 6.0, &AnalysisConfig::default()).unwrap_err();
        assert!(err.is_infeasible());
        assert!(matches!(err, AnalysisError::EmptyBand(d) if d.period == 2));
    }

    #[test]
    fn conflicting_bands_are_told_apart_from_balance() {
        // Each band alone is reachable, but not both in a row.
        let inst = one_unit_instance(3);
        let f = feeder(vec![0.0, 5.0, 10.0], 0.0);
        let err = optimal_schedule(&inst, &f, 6.0, &AnalysisConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            AnalysisError::Infeasible {
                cause: InfeasibleCause::RampBands,
                ..
            }
        ));
    }

    #[test]
    fn cost_components_match_objective() {
        let inst = small_instance();
        let out = unconstrained_schedule(&inst, &FeederContext::empty(3, 0.0), &AnalysisConfig::default()).unwrap();
        assert!((out.schedule.cost.total() - out.cost).abs() < 1e-6);
        assert_eq!(out.schedule.storage[0].net_power().len(), 3);
    }

    #[test]
    fn wrong_feeder_length_is_rejected() {
        let inst = small_instance();
        let err = optimal_schedule(&inst, &FeederContext::empty(2, 1.0), 5.0, &AnalysisConfig::default()).unwrap_err();
        assert!(matches!(err, AnalysisError::InvalidInput(_)));
    }
}
