//! Input checks that run before any model is built.

use std::collections::HashSet;
use std::fmt;

use crate::instance::{FeederContext, MicrogridInstance, RampTarget, StorageMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    /// Location inside the instance document, e.g. `storage_units[0].initial_energy`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn warning(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn finite(&mut self, path: &str, value: f64) -> bool {
        if value.is_finite() {
            true
        } else {
            self.violation(path, "must be a finite number");
            false
        }
    }

    fn nonneg(&mut self, path: &str, value: f64) {
        if self.finite(path, value) && value < 0.0 {
            self.violation(path, "must be non-negative");
        }
    }

    fn at_least_one(&mut self, path: &str, value: usize) {
        if value < 1 {
            self.violation(path, "must be at least 1 period");
        }
    }

    fn profile(&mut self, path: &str, values: &[f64], periods: usize, nonneg: bool) {
        if values.len() != periods {
            self.violation(path, format!("has {} entries, expected {periods}", values.len()));
        }
        for (k, &v) in values.iter().enumerate() {
            let p = format!("{path}[{k}]");
            if nonneg {
                self.nonneg(&p, v);
            } else {
                self.finite(&p, v);
            }
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks every structural and physical invariant of an instance. An empty
/// violation list means a model can be built; warnings flag data that builds
/// but is likely to be infeasible or degenerate.
pub fn validate_instance(instance: &MicrogridInstance) -> ValidationReport {
    let mut r = ValidationReport::default();
    let periods = instance.time_grid.periods;
    let step = instance.time_grid.step;
    if periods < 1 {
        r.violation("time_grid.periods", "must be at least 1");
    }
    if r.finite("time_grid.step", step) && step <= 0.0 {
        r.violation("time_grid.step", "must be positive");
    }

    let mut ids = HashSet::new();
    let mut check_id = |r: &mut ValidationReport, path: String, id: &str| {
        if id.is_empty() {
            r.violation(path, "id must not be empty");
        } else if !ids.insert(id.to_string()) {
            r.violation(path, format!("duplicate id {id:?}"));
        }
    };

    for (k, u) in instance.dispatchable_units.iter().enumerate() {
        let p = |field: &str| format!("dispatchable_units[{k}].{field}");
        check_id(&mut r, p("id"), &u.id);
        for (field, v) in [
            ("p_min", u.p_min),
            ("p_max", u.p_max),
            ("marginal_cost", u.marginal_cost),
            ("no_load_cost", u.no_load_cost),
            ("startup_cost", u.startup_cost),
            ("shutdown_cost", u.shutdown_cost),
            ("ramp_up", u.ramp_up),
            ("ramp_down", u.ramp_down),
        ] {
            r.nonneg(&p(field), v);
        }
        r.finite(&p("initial_power"), u.initial_power);
        if u.p_min > u.p_max {
            r.violation(p("p_min"), "p_min exceeds p_max");
        }
        r.at_least_one(&p("min_up"), u.min_up);
        r.at_least_one(&p("min_down"), u.min_down);
        if u.initial_committed {
            if u.initial_power < u.p_min || u.initial_power > u.p_max {
                r.violation(p("initial_power"), "a committed unit must start within [p_min, p_max]");
            }
        } else if u.initial_power != 0.0 {
            r.violation(p("initial_power"), "an uncommitted unit must start at 0");
        }
        // Period 0 itself counts, so the state has lasted at least one period.
        r.at_least_one(&p("initial_state_duration"), u.initial_state_duration);
        if u.p_min > u.ramp_up {
            r.warning(
                p("ramp_up"),
                "p_min exceeds ramp_up, so the unit cannot start up under the ramp limits",
            );
        }
        if u.initial_committed && u.p_min > u.ramp_down {
            r.warning(
                p("ramp_down"),
                "p_min exceeds ramp_down, so the unit cannot shut down under the ramp limits",
            );
        }
    }

    for (k, s) in instance.storage_units.iter().enumerate() {
        let p = |field: &str| format!("storage_units[{k}].{field}");
        check_id(&mut r, p("id"), &s.id);
        for (field, v) in [
            ("p_dch_min", s.p_dch_min),
            ("p_dch_max", s.p_dch_max),
            ("p_ch_min", s.p_ch_min),
            ("p_ch_max", s.p_ch_max),
            ("cap_min", s.cap_min),
            ("cap_max", s.cap_max),
            ("initial_energy", s.initial_energy),
        ] {
            r.nonneg(&p(field), v);
        }
        if s.p_dch_min > s.p_dch_max {
            r.violation(p("p_dch_min"), "p_dch_min exceeds p_dch_max");
        }
        if s.p_ch_min > s.p_ch_max {
            r.violation(p("p_ch_min"), "p_ch_min exceeds p_ch_max");
        }
        if s.cap_min > s.cap_max {
            r.violation(p("cap_min"), "cap_min exceeds cap_max");
        }
        if s.initial_energy < s.cap_min || s.initial_energy > s.cap_max {
            r.violation(p("initial_energy"), "initial energy must lie within [cap_min, cap_max]");
        }
        if r.finite(&p("efficiency"), s.efficiency) && !(s.efficiency > 0.0 && s.efficiency <= 1.0) {
            r.violation(p("efficiency"), "efficiency must lie in (0, 1]");
        }
        if s.initial_mode != StorageMode::Idle {
            r.at_least_one(&p("initial_mode_duration"), s.initial_mode_duration);
        }
        r.at_least_one(&p("min_charge_time"), s.min_charge_time);
        r.at_least_one(&p("min_discharge_time"), s.min_discharge_time);
    }

    for (k, d) in instance.adjustable_loads.iter().enumerate() {
        let p = |field: &str| format!("adjustable_loads[{k}].{field}");
        check_id(&mut r, p("id"), &d.id);
        r.profile(&p("d_min"), &d.d_min, periods, true);
        r.profile(&p("d_max"), &d.d_max, periods, true);
        for (t, (lo, hi)) in d.d_min.iter().zip(&d.d_max).enumerate() {
            if lo > hi {
                r.violation(format!("{}[{t}]", p("d_min")), "d_min exceeds d_max");
            }
        }
        r.nonneg(&p("energy"), d.energy);
        r.at_least_one(&p("min_on"), d.min_on);
        let window_ok = 1 <= d.window_start && d.window_start <= d.window_end && d.window_end <= periods;
        if !window_ok {
            r.violation(
                p("window_start"),
                format!("window [{}, {}] must satisfy 1 <= start <= end <= {periods}", d.window_start, d.window_end),
            );
        }
        if d.initial_operating {
            r.at_least_one(&p("initial_on_duration"), d.initial_on_duration);
        }
        let owed = d.min_on.saturating_sub(d.initial_on_duration);
        if window_ok && d.initial_operating && owed > 0 && (d.window_start > 1 || d.window_end < owed.min(periods)) {
            r.violation(
                p("initial_on_duration"),
                format!("the load must keep running for {owed} more periods but its window does not cover them"),
            );
        }
        let shaped = d.d_min.len() == periods && d.d_max.len() == periods;
        if window_ok && shaped && step.is_finite() {
            let (lo, hi) = d.energy_range(step);
            let tol = 1e-9 * hi.abs().max(1.0);
            if d.energy < lo - tol || d.energy > hi + tol {
                r.violation(
                    p("energy"),
                    format!("energy {} is outside the reachable range [{lo}, {hi}]", d.energy),
                );
            } else if (d.energy - lo).abs() <= tol || (d.energy - hi).abs() <= tol {
                r.warning(p("energy"), "energy sits at an end of its reachable range");
            }
        }
    }

    r.profile("fixed_profiles.fixed_load", &instance.fixed_profiles.fixed_load, periods, true);
    r.profile(
        "fixed_profiles.nondispatchable_gen",
        &instance.fixed_profiles.nondispatchable_gen,
        periods,
        true,
    );

    let g = &instance.grid_link;
    r.nonneg("grid_link.transfer_limit", g.transfer_limit);
    if let Some(p0) = g.initial_exchange {
        r.finite("grid_link.initial_exchange", p0);
    }
    r.profile("grid_link.market_price", &g.market_price, periods, false);
    r
}

/// Checks a feeder context against a horizon of `periods`.
pub fn validate_feeder(feeder: &FeederContext, periods: usize) -> ValidationReport {
    let mut r = ValidationReport::default();
    r.profile("customer_net_load", &feeder.customer_net_load, periods, false);
    let targets: Vec<f64> = match &feeder.ramp_target {
        RampTarget::Uniform(v) => vec![*v],
        RampTarget::PerPeriod(v) => {
            if v.len() != periods {
                r.violation("ramp_target", format!("has {} entries, expected {periods}", v.len()));
            }
            v.clone()
        }
    };
    for (k, v) in targets.into_iter().enumerate() {
        // An infinite target means the utility imposes no limit.
        if v.is_nan() || v < 0.0 {
            r.violation(format!("ramp_target[{k}]"), "ramp target must be non-negative");
        }
    }
    r
}
