//! Microgrid instance data.
//!
//! Periods are 1-based in every public API that names a period; profile
//! vectors are stored 0-based, so `profile[t - 1]` is the value of period `t`.
//! Power is in MW, energy in MWh, prices in $/MWh and durations in periods.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub periods: usize,
    /// Period length in hours.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispatchableUnit {
    pub id: String,
    pub p_min: f64,
    pub p_max: f64,
    /// $/MWh
    pub marginal_cost: f64,
    /// $/h while committed
    pub no_load_cost: f64,
    pub startup_cost: f64,
    pub shutdown_cost: f64,
    /// MW per period
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub min_up: usize,
    pub min_down: usize,
    pub initial_committed: bool,
    pub initial_power: f64,
    /// Periods already spent in the initial on/off state.
    pub initial_state_duration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageMode {
    Idle,
    Charging,
    Discharging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageUnit {
    pub id: String,
    pub p_dch_min: f64,
    pub p_dch_max: f64,
    pub p_ch_min: f64,
    pub p_ch_max: f64,
    pub cap_min: f64,
    pub cap_max: f64,
    /// Applied to discharging only.
    pub efficiency: f64,
    pub initial_energy: f64,
    pub min_charge_time: usize,
    pub min_discharge_time: usize,
    pub initial_mode: StorageMode,
    pub initial_mode_duration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjustableLoad {
    pub id: String,
    pub d_min: Vec<f64>,
    pub d_max: Vec<f64>,
    /// MWh to be consumed inside the window.
    pub energy: f64,
    /// First period of the operating window (1-based, inclusive).
    pub window_start: usize,
    /// Last period of the operating window (1-based, inclusive).
    pub window_end: usize,
    pub min_on: usize,
    pub initial_operating: bool,
    pub initial_on_duration: usize,
}

impl AdjustableLoad {
    pub fn in_window(&self, period: usize) -> bool {
        (self.window_start..=self.window_end).contains(&period)
    }

    /// Energy range reachable inside the window at the given step.
    pub fn energy_range(&self, step: f64) -> (f64, f64) {
        let periods = self.window_start.max(1)..=self.window_end.min(self.d_min.len().min(self.d_max.len()));
        let lo = periods.clone().map(|t| self.d_min[t - 1] * step).sum();
        let hi = periods.map(|t| self.d_max[t - 1] * step).sum();
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedProfiles {
    /// Aggregate non-adjustable demand.
    pub fixed_load: Vec<f64>,
    /// Aggregate wind and solar injection, taken as given.
    pub nondispatchable_gen: Vec<f64>,
}

/// Interconnection with the utility. Positive exchange is import.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridLink {
    pub transfer_limit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_exchange: Option<f64>,
    pub market_price: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicrogridInstance {
    pub time_grid: TimeGrid,
    pub dispatchable_units: Vec<DispatchableUnit>,
    pub storage_units: Vec<StorageUnit>,
    pub adjustable_loads: Vec<AdjustableLoad>,
    pub fixed_profiles: FixedProfiles,
    pub grid_link: GridLink,
}

impl MicrogridInstance {
    pub fn periods(&self) -> usize {
        self.time_grid.periods
    }

    pub fn step(&self) -> f64 {
        self.time_grid.step
    }

    /// Copy with a different interconnection limit.
    pub fn with_transfer_limit(&self, limit: f64) -> MicrogridInstance {
        let mut out = self.clone();
        out.grid_link.transfer_limit = limit;
        out
    }
}

/// Utility ramp target, either one value for every transition or one per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RampTarget {
    Uniform(f64),
    PerPeriod(Vec<f64>),
}

impl RampTarget {
    /// Target for the transition into `period` (1-based).
    pub fn at(&self, period: usize) -> f64 {
        match self {
            RampTarget::Uniform(v) => *v,
            RampTarget::PerPeriod(v) => v[period - 1],
        }
    }
}

/// The rest of the feeder as seen by the utility.
#[derive(Debug, Clone, PartialEq)]
pub struct FeederContext {
    /// Aggregate net load of the other customers on the feeder.
    pub customer_net_load: Vec<f64>,
    pub ramp_target: RampTarget,
}

impl FeederContext {
    /// Feeder with no other customers.
    pub fn empty(periods: usize, ramp_target: f64) -> FeederContext {
        FeederContext {
            customer_net_load: vec![0.0; periods],
            ramp_target: RampTarget::Uniform(ramp_target),
        }
    }

    pub fn with_ramp_target(&self, target: f64) -> FeederContext {
        FeederContext {
            customer_net_load: self.customer_net_load.clone(),
            ramp_target: RampTarget::Uniform(target),
        }
    }
}
