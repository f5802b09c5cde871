use std::fmt;

use crate::formulation::FormulationOptions;
use crate::instance::{MicrogridInstance, StorageMode};

use super::schedule::Schedule;

const TOL: f64 = 1e-6;

/// One failed check on a decoded schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub component: String,
    pub period: Option<usize>,
    /// How far the value lies outside its limit.
    pub excess: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated for {}", self.check, self.component)?;
        if let Some(t) = self.period {
            write!(f, " in period {t}")?;
        }
        write!(f, " by {:.3e}", self.excess)
    }
}

struct Checker<'a> {
    out: Vec<Violation>,
    component: &'a str,
}

impl<'a> Checker<'a> {
    fn at_most(&mut self, check: &'static str, period: Option<usize>, value: f64, limit: f64) {
        let excess = value - limit;
        if excess > TOL * limit.abs().max(1.0) || value.is_nan() {
            self.out.push(Violation {
                check,
                component: self.component.to_string(),
                period,
                excess,
            });
        }
    }

    fn at_least(&mut self, check: &'static str, period: Option<usize>, value: f64, limit: f64) {
        self.at_most(check, period, -value, -limit);
    }

    fn flag(&mut self, check: &'static str, period: Option<usize>, ok: bool) {
        if !ok {
            self.out.push(Violation {
                check,
                component: self.component.to_string(),
                period,
                excess: 1.0,
            });
        }
    }

    /// Every switch into `active` must be held for `length` periods, or up
    /// to the horizon end. An initial run of `elapsed` periods counts.
    fn run_lengths(&mut self, check: &'static str, states: &[bool], initial: bool, elapsed: usize, active: bool, length: usize) {
        let mut run = if initial == active { elapsed } else { 0 };
        let mut previous = initial;
        for (k, &state) in states.iter().enumerate() {
            if previous == active && state != active && run < length {
                self.flag(check, Some(k + 1), false);
            }
            run = if state == active { if previous == active { run + 1 } else { 1 } } else { 0 };
            previous = state;
        }
    }
}

/// Re-checks a schedule against the instance, directly from the physical
/// rules rather than through the optimization model.
pub fn check_schedule(instance: &MicrogridInstance, options: &FormulationOptions, schedule: &Schedule) -> Vec<Violation> {
    let periods = instance.periods();
    let tau = instance.step();
    let mut c = Checker {
        out: Vec::new(),
        component: "schedule",
    };
    let lengths_ok = schedule.periods() == periods
        && schedule.units.len() == instance.dispatchable_units.len()
        && schedule.storage.len() == instance.storage_units.len()
        && schedule.loads.len() == instance.adjustable_loads.len();
    c.flag("dimensions", None, lengths_ok);
    if !lengths_ok {
        return c.out;
    }

    for (unit, s) in instance.dispatchable_units.iter().zip(&schedule.units) {
        c.component = &unit.id;
        let mut previous = unit.initial_power;
        for t in 1..=periods {
            let (p, on) = (s.power[t - 1], s.committed[t - 1]);
            let (lo, hi) = if on { (unit.p_min, unit.p_max) } else { (0.0, 0.0) };
            c.at_least("unit output minimum", Some(t), p, lo);
            c.at_most("unit output maximum", Some(t), p, hi);
            c.at_most("unit ramp up", Some(t), p - previous, unit.ramp_up);
            c.at_most("unit ramp down", Some(t), previous - p, unit.ramp_down);
            previous = p;
        }
        let elapsed = unit.initial_state_duration;
        c.run_lengths("unit minimum up time", &s.committed, unit.initial_committed, elapsed, true, unit.min_up);
        c.run_lengths("unit minimum down time", &s.committed, unit.initial_committed, elapsed, false, unit.min_down);
    }

    for (st, s) in instance.storage_units.iter().zip(&schedule.storage) {
        c.component = &st.id;
        let mut energy = st.initial_energy;
        for t in 1..=periods {
            let k = t - 1;
            let (dch, ch) = (s.discharge[k], s.charge[k]);
            c.flag("storage single mode", Some(t), !(s.discharging[k] && s.charging[k]));
            let (lo, hi) = if s.discharging[k] { (st.p_dch_min, st.p_dch_max) } else { (0.0, 0.0) };
            c.at_least("storage discharge minimum", Some(t), dch, lo);
            c.at_most("storage discharge maximum", Some(t), dch, hi);
            let (lo, hi) = if s.charging[k] { (st.p_ch_min, st.p_ch_max) } else { (0.0, 0.0) };
            c.at_least("storage charge minimum", Some(t), ch, lo);
            c.at_most("storage charge maximum", Some(t), ch, hi);
            energy += ch * tau - dch * tau / st.efficiency;
            let gap = (s.energy[k] - energy).abs();
            c.at_most("storage energy recursion", Some(t), gap, 0.0);
            c.at_least("storage energy minimum", Some(t), s.energy[k], st.cap_min);
            c.at_most("storage energy maximum", Some(t), s.energy[k], st.cap_max);
            energy = s.energy[k];
        }
        let mode = |m| st.initial_mode == m;
        let elapsed = st.initial_mode_duration;
        c.run_lengths("storage minimum charge time", &s.charging, mode(StorageMode::Charging), elapsed, true, st.min_charge_time);
        c.run_lengths(
            "storage minimum discharge time",
            &s.discharging,
            mode(StorageMode::Discharging),
            elapsed,
            true,
            st.min_discharge_time,
        );
        if options.terminal_soc_at_least_initial {
            c.at_least("storage terminal energy", None, energy, st.initial_energy);
        }
    }

    for (load, s) in instance.adjustable_loads.iter().zip(&schedule.loads) {
        c.component = &load.id;
        let mut total = 0.0;
        for t in 1..=periods {
            let (p, on) = (s.power[t - 1], s.on[t - 1]);
            if !load.in_window(t) {
                c.flag("load outside window", Some(t), !on);
                c.at_most("load outside window", Some(t), p.abs(), 0.0);
                continue;
            }
            let (lo, hi) = if on { (load.d_min[t - 1], load.d_max[t - 1]) } else { (0.0, 0.0) };
            c.at_least("load minimum", Some(t), p, lo);
            c.at_most("load maximum", Some(t), p, hi);
            total += p * tau;
        }
        c.at_most("load energy", None, (total - load.energy).abs(), 0.0);
        c.run_lengths("load minimum on time", &s.on, load.initial_operating, load.initial_on_duration, true, load.min_on);
    }

    c.component = "grid";
    let profiles = &instance.fixed_profiles;
    for t in 1..=periods {
        let k = t - 1;
        let supply: f64 = schedule.units.iter().map(|u| u.power[k]).sum::<f64>()
            + schedule.storage.iter().map(|s| s.discharge[k] - s.charge[k]).sum::<f64>()
            + profiles.nondispatchable_gen[k]
            + schedule.exchange[k];
        let demand = profiles.fixed_load[k] + schedule.loads.iter().map(|d| d.power[k]).sum::<f64>();
        c.at_most("power balance", Some(t), (supply - demand).abs(), 0.0);
        c.at_most("transfer limit", Some(t), schedule.exchange[k].abs(), instance.grid_link.transfer_limit);
    }
    c.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{unconstrained_schedule, AnalysisConfig};
    use crate::fixtures::small_instance;
    use crate::instance::FeederContext;

    fn solved() -> (MicrogridInstance, Schedule) {
        let inst = small_instance();
        let out = unconstrained_schedule(&inst, &FeederContext::empty(3, 0.0), &AnalysisConfig::default()).unwrap();
        (inst, out.schedule)
    }

    fn checks(inst: &MicrogridInstance, s: &Schedule) -> Vec<&'static str> {
        check_schedule(inst, &FormulationOptions::default(), s)
            .into_iter()
            .map(|v| v.check)
            .collect()
    }

    #[test]
    fn optimal_schedule_is_clean() {
        let (inst, s) = solved();
        assert!(checks(&inst, &s).is_empty());
    }

    #[test]
    fn tampering_is_caught() {
        let (inst, s) = solved();

        let mut bad = s.clone();
        bad.exchange[1] += 0.5;
        assert!(checks(&inst, &bad).contains(&"power balance"));

        let mut bad = s.clone();
        bad.storage[0].energy[0] += 0.1;
        assert!(checks(&inst, &bad).contains(&"storage energy recursion"));

        let mut bad = s.clone();
        bad.storage[0].charging[2] = true;
        bad.storage[0].discharging[2] = true;
        assert!(checks(&inst, &bad).contains(&"storage single mode"));

        let mut bad = s.clone();
        bad.loads[0].power[0] += 0.25;
        assert!(checks(&inst, &bad).contains(&"load energy"));

        let mut bad = s;
        bad.exchange.pop();
        assert_eq!(checks(&inst, &bad), ["dimensions"]);
    }

    #[test]
    fn run_lengths_count_initial_state() {
        let mut inst = small_instance();
        let unit = &mut inst.dispatchable_units[0];
        unit.min_up = 3;
        unit.initial_committed = true;
        unit.initial_power = 2.0;
        unit.initial_state_duration = 1;
        let mut c = Checker {
            out: vec![],
            component: "G1",
        };
        // On for 1 before the horizon, 1 more inside: 2 < 3.
        c.run_lengths("up", &[true, false, false], true, 1, true, 3);
        assert_eq!(c.out.len(), 1);
        assert_eq!(c.out[0].period, Some(2));
        c.out.clear();
        c.run_lengths("up", &[true, true, false], true, 1, true, 3);
        // A run cut by the horizon end is fine.
        c.run_lengths("up", &[false, false, true], false, 1, true, 3);
        c.run_lengths("down", &[true, false, true], true, 5, false, 1);
        assert!(c.out.is_empty());
        c.run_lengths("down", &[true, false, true], true, 5, false, 2);
        assert_eq!(c.out.len(), 1);
    }

    #[test]
    fn terminal_energy_checked_when_requested() {
        let (inst, mut s) = solved();
        let st = &mut s.storage[0];
        // Idle in the first two periods, then discharge 0.9 MW.
        st.discharging = vec![false, false, true];
        st.charging = vec![false; 3];
        st.discharge = vec![0.0, 0.0, 0.9];
        st.charge = vec![0.0; 3];
        st.energy = vec![4.0, 4.0, 3.0];
        let opts = FormulationOptions {
            terminal_soc_at_least_initial: true,
        };
        let storage_checks = |opts: &FormulationOptions| -> Vec<&'static str> {
            check_schedule(&inst, opts, &s)
                .into_iter()
                .filter(|v| v.component == "S1")
                .map(|v| v.check)
                .collect()
        };
        assert!(storage_checks(&FormulationOptions::default()).is_empty());
        assert_eq!(storage_checks(&opts), ["storage terminal energy"]);
        let v = Violation {
            check: "load energy",
            component: "L1".into(),
            period: Some(2),
            excess: 0.5,
        };
        assert_eq!(v.to_string(), "load energy violated for L1 in period 2 by 5.000e-1");
    }
}
