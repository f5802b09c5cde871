use crate::formulation::{base_formulation, RampDirection};
use crate::instance::MicrogridInstance;

use super::{run_indexed, solve, AnalysisConfig, AnalysisError, InfeasibleCause, SolveDiagnostics, SolveOutcome};

/// Largest achievable exchange change into one period, per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodCapability {
    pub period: usize,
    pub up: f64,
    pub down: f64,
}

impl PeriodCapability {
    pub fn capability(&self) -> f64 {
        self.up.max(self.down)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityResult {
    /// Exchange change the microgrid can offer in every evaluated period.
    pub capability: f64,
    /// Period attaining the minimum (earliest on ties).
    pub argmin_period: usize,
    pub periods: Vec<PeriodCapability>,
    /// One entry per solve, ordered by period then direction.
    pub diagnostics: Vec<SolveDiagnostics>,
}

/// For every transition, maximizes the exchange change up and down
/// independently; the capability is the smallest of the per-period maxima.
/// Transitions start at period 2 unless the instance gives an initial
/// exchange.
pub fn ramping_capability(
    instance: &MicrogridInstance,
    config: &AnalysisConfig,
) -> Result<CapabilityResult, AnalysisError> {
    let base = base_formulation(instance, &config.formulation)?;
    let first = base.first_transition();
    let periods: Vec<usize> = (first..=base.periods()).collect();
    if periods.is_empty() {
        return Err(AnalysisError::NoTransitions);
    }
    let jobs: Vec<(usize, RampDirection)> = periods
        .iter()
        .flat_map(|&t| [(t, RampDirection::Up), (t, RampDirection::Down)])
        .collect();
    let results = run_indexed(jobs.len(), config.workers, |i| {
        let (t, direction) = jobs[i];
        let mut f = base.clone();
        f.set_ramp_objective(t, direction)?;
        let context = format!("capability {direction:?} into period {t}");
        solve(config, f.model(), &context, Some(t), Some(direction))
    });

    let mut diagnostics = Vec::with_capacity(jobs.len());
    let mut maxima = Vec::with_capacity(jobs.len());
    for (&(t, _), result) in jobs.iter().zip(results) {
        match result? {
            SolveOutcome::Solved(s) => {
                diagnostics.push(s.diagnostics);
                maxima.push(s.objective);
            }
            SolveOutcome::Infeasible => {
                return Err(AnalysisError::Infeasible {
                    context: format!("capability into period {t}"),
                    cause: InfeasibleCause::Balance,
                })
            }
        }
    }
    let per_period: Vec<PeriodCapability> = periods
        .iter()
        .enumerate()
        .map(|(k, &t)| PeriodCapability {
            period: t,
            up: maxima[2 * k],
            down: maxima[2 * k + 1],
        })
        .collect();
    let (argmin, capability) = per_period
        .iter()
        .map(|p| (p.period, p.capability()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(CapabilityResult {
        capability,
        argmin_period: argmin,
        periods: per_period,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bare_instance, one_unit_instance, small_instance};

    fn capability(inst: &MicrogridInstance) -> CapabilityResult {
        ramping_capability(inst, &AnalysisConfig::default()).unwrap()
    }

    #[test]
    fn constant_load_without_resources_has_no_capability() {
        let r = capability(&bare_instance(vec![10.0; 4], vec![50.0; 4], 20.0));
        assert_eq!(r.capability, 0.0);
        assert_eq!(r.periods.len(), 3);
        assert_eq!(r.diagnostics.len(), 6);
    }

    #[test]
    fn forced_exchange_takes_smallest_transition() {
        let r = capability(&bare_instance(vec![10.0, 14.0, 11.0], vec![50.0; 3], 20.0));
        assert!((r.capability - 3.0).abs() < 1e-9);
        assert_eq!(r.argmin_period, 3);
        let p2 = &r.periods[0];
        assert!((p2.up - 4.0).abs() < 1e-9 && (p2.down + 4.0).abs() < 1e-9);
    }

    #[test]
    fn one_unit_swings_exchange_over_its_range() {
        let r = capability(&one_unit_instance(3));
        assert!((r.capability - 6.0).abs() < 1e-9);
        for p in &r.periods {
            assert!((p.up - 6.0).abs() < 1e-9 && (p.down - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn initial_exchange_adds_first_transition() {
        let mut inst = one_unit_instance(3);
        inst.grid_link.initial_exchange = Some(10.0);
        let r = capability(&inst);
        assert_eq!(r.periods[0].period, 1);
        // From 10 the unit can only lower the import.
        assert!((r.periods[0].up - 0.0).abs() < 1e-9);
        assert!((r.periods[0].down - 6.0).abs() < 1e-9);
    }

    #[test]
    fn workers_do_not_change_the_result() {
        let inst = small_instance();
        let serial = capability(&inst);
        let config = AnalysisConfig {
            workers: 4,
            ..AnalysisConfig::default()
        };
        let parallel = ramping_capability(&inst, &config).unwrap();
        assert_eq!(serial.periods, parallel.periods);
        assert_eq!(serial.capability, parallel.capability);
    }

    #[test]
    fn unmeetable_balance_is_reported() {
        let err = ramping_capability(&bare_instance(vec![10.0, 30.0], vec![50.0; 2], 20.0), &AnalysisConfig::default())
            .unwrap_err();
        assert!(matches!(
            err,
            AnalysisError::Infeasible {
                cause: InfeasibleCause::Balance,
                ..
            }
        ));
    }

    #[test]
    fn single_period_has_no_transition() {
        let err = ramping_capability(&bare_instance(vec![10.0], vec![50.0], 20.0), &AnalysisConfig::default()).unwrap_err();
        assert!(matches!(err, AnalysisError::NoTransitions));
    }
}
