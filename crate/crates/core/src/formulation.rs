//! Translation of an instance into a mixed-integer linear model.
//!
//! Variables and rows are created in a fixed order (units, storage, loads,
//! then exchange), so the same instance always yields the same model. Every
//! variable and row carries a tag of the form `role[component,period]`.

use std::collections::HashMap;

use microramp_milp::model::canonical_terms;
use microramp_milp::{MilpModel, ObjSense, RowSense, VarId};
use thiserror::Error;

use crate::instance::{MicrogridInstance, StorageMode};
use crate::validate::{validate_instance, ValidationReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FormulationOptions {
    /// Require every storage unit to end the horizon with at least its initial energy.
    pub terminal_soc_at_least_initial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RampDirection {
    Up,
    Down,
}

/// Why a ramp band came out empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandConflict {
    /// The utility's band is consistent but lies outside `[-R, R]`.
    ExceedsCapability,
    /// The band itself has its lower end above its upper end.
    InvertedTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandDiagnosis {
    pub period: usize,
    pub lower: f64,
    pub upper: f64,
    pub capability: f64,
    pub conflict: BandConflict,
}

impl std::fmt::Display for BandDiagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.conflict {
            BandConflict::ExceedsCapability => write!(
                f,
                "period {}: the utility asks for an exchange change in [{}, {}] but the microgrid can only guarantee ±{}",
                self.period, self.lower, self.upper, self.capability
            ),
            BandConflict::InvertedTarget => write!(
                f,
                "period {}: ramp band [{}, {}] is inverted",
                self.period, self.lower, self.upper
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulationError {
    #[error("invalid instance:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("constraint {tag} cannot hold for the given initial conditions")]
    InconsistentData { tag: String },
    #[error("transfer limit must be non-negative and finite, got {0}")]
    InvalidTransferLimit(f64),
    #[error("period {period} is outside 1..={periods}")]
    PeriodOutOfRange { period: usize, periods: usize },
    #[error("the first period has no predecessor without an initial exchange")]
    MissingInitialExchange,
    #[error("ramp bounds cover {got} periods, expected {expected}")]
    BoundsLength { got: usize, expected: usize },
    #[error("ramp capability must be non-negative, got {0}")]
    InvalidCapability(f64),
    #[error("empty ramp band: {0}")]
    EmptyBand(BandDiagnosis),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVars {
    pub power: Vec<VarId>,
    pub on: Vec<VarId>,
    pub startup_cost: Vec<VarId>,
    pub shutdown_cost: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageVars {
    pub discharge: Vec<VarId>,
    pub charge: Vec<VarId>,
    pub discharging: Vec<VarId>,
    pub charging: Vec<VarId>,
    pub energy: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadVars {
    pub power: Vec<VarId>,
    pub on: Vec<VarId>,
}

/// Structured and tag-based access to the model's variables. Per-period
/// vectors are indexed by `period - 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableMap {
    pub units: Vec<UnitVars>,
    pub storage: Vec<StorageVars>,
    pub loads: Vec<LoadVars>,
    /// Empty until the power balance is added.
    pub exchange: Vec<VarId>,
    by_tag: HashMap<String, VarId>,
    tags: Vec<String>,
}

impl VariableMap {
    pub fn lookup(&self, tag: &str) -> Option<VarId> {
        self.by_tag.get(tag).copied()
    }

    pub fn tag(&self, var: VarId) -> Option<&str> {
        self.tags.get(var.0).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Either a model variable or a known constant such as an initial condition.
#[derive(Debug, Clone, Copy)]
enum Value {
    Var(VarId),
    Const(f64),
}

#[derive(Debug, Default)]
struct Expr {
    terms: Vec<(VarId, f64)>,
    constant: f64,
}

impl Expr {
    fn new() -> Self {
        Expr::default()
    }

    fn with(mut self, value: Value, coef: f64) -> Self {
        match value {
            Value::Var(v) => self.terms.push((v, coef)),
            Value::Const(c) => self.constant += coef * c,
        }
        self
    }

    fn var(self, v: VarId, coef: f64) -> Self {
        self.with(Value::Var(v), coef)
    }
}

/// A model under construction together with its variable map.
#[derive(Debug, Clone)]
pub struct Formulation {
    model: MilpModel,
    vars: VariableMap,
    periods: usize,
    step: f64,
    initial_exchange: Option<f64>,
}

/// Per-period indicator sequence with its value before the horizon.
fn series(vars: &[VarId], initial: f64) -> impl Fn(usize) -> Value + '_ {
    move |t| if t == 0 { Value::Const(initial) } else { Value::Var(vars[t - 1]) }
}

impl Formulation {
    pub fn model(&self) -> &MilpModel {
        &self.model
    }

    pub fn vars(&self) -> &VariableMap {
        &self.vars
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn into_parts(self) -> (MilpModel, VariableMap) {
        (self.model, self.vars)
    }

    fn new_var(&mut self, binary: bool, lower: f64, upper: f64, tag: String) -> VarId {
        let id = if binary {
            let id = self.model.add_binary(tag.clone());
            self.model.set_bounds(id, lower, upper);
            id
        } else {
            self.model.add_continuous(lower, upper, tag.clone())
        };
        self.vars.by_tag.insert(tag.clone(), id);
        self.vars.tags.push(tag);
        id
    }

    fn new_series(&mut self, binary: bool, role: &str, owner: &str, bounds: impl Fn(usize) -> (f64, f64)) -> Vec<VarId> {
        (1..=self.periods)
            .map(|t| {
                let (lo, hi) = bounds(t);
                self.new_var(binary, lo, hi, format!("{role}[{owner},{t}]"))
            })
            .collect()
    }

    /// Adds `expr (sense) rhs`. Rows left without variables are checked and
    /// dropped.
    fn row(&mut self, expr: Expr, sense: RowSense, rhs: f64, tag: String) -> Result<(), FormulationError> {
        let terms = canonical_terms(expr.terms);
        let rhs = rhs - expr.constant;
        if terms.is_empty() {
            let tol = 1e-9;
            let holds = match sense {
                RowSense::Le => 0.0 <= rhs + tol,
                RowSense::Ge => 0.0 >= rhs - tol,
                RowSense::Eq => rhs.abs() <= tol,
            };
            return if holds {
                Ok(())
            } else {
                Err(FormulationError::InconsistentData { tag })
            };
        }
        self.model.add_constraint(terms, sense, rhs, tag);
        Ok(())
    }

    fn fix(&mut self, var: VarId, value: f64) -> Result<(), FormulationError> {
        let v = self.model.variable(var);
        if value < v.lower || value > v.upper {
            return Err(FormulationError::InconsistentData { tag: v.tag.clone() });
        }
        self.model.set_bounds(var, value, value);
        Ok(())
    }

    /// Minimum run-length rows over lookahead windows: once `state` switches
    /// on at `t`, it stays on through `t + length - 1`.
    fn run_length_rows(
        &mut self,
        state: &dyn Fn(usize) -> Value,
        length: usize,
        role: &str,
        owner: &str,
        invert: bool,
    ) -> Result<(), FormulationError> {
        let horizon = self.periods;
        for t in 1..=horizon {
            for s in t..=(t + length - 1).min(horizon) {
                // state_s - state_t + state_{t-1} >= 0, or the same on the complement.
                let sign = if invert { -1.0 } else { 1.0 };
                let expr = Expr::new()
                    .with(state(s), sign)
                    .with(state(t), -sign)
                    .with(state(t - 1), sign);
                let rhs = if invert { -1.0 } else { 0.0 };
                self.row(expr, RowSense::Ge, rhs, format!("{role}[{owner},{t},{s}]"))?;
            }
        }
        Ok(())
    }

    /// Holds `state` at `value` for the first `length - elapsed` periods.
    fn carry_over(&mut self, vars: &[VarId], length: usize, elapsed: usize, value: f64) -> Result<(), FormulationError> {
        for t in 1..=length.saturating_sub(elapsed).min(self.periods) {
            self.fix(vars[t - 1], value)?;
        }
        Ok(())
    }

    /// Adds the power balance of every period, creating the exchange
    /// variables bounded by the instance's transfer limit.
    pub fn add_power_balance(&mut self, instance: &MicrogridInstance) -> Result<(), FormulationError> {
        let limit = instance.grid_link.transfer_limit;
        if !(limit >= 0.0 && limit.is_finite()) {
            return Err(FormulationError::InvalidTransferLimit(limit));
        }
        if self.vars.exchange.is_empty() {
            self.vars.exchange = self.new_series(false, "exchange", "grid", |_| (-limit, limit));
        }
        for t in 1..=self.periods {
            let k = t - 1;
            let mut expr = Expr::new().var(self.vars.exchange[k], 1.0);
            for u in &self.vars.units {
                expr = expr.var(u.power[k], 1.0);
            }
            for s in &self.vars.storage {
                expr = expr.var(s.discharge[k], 1.0).var(s.charge[k], -1.0);
            }
            for d in &self.vars.loads {
                expr = expr.var(d.power[k], -1.0);
            }
            let net = instance.fixed_profiles.fixed_load[k] - instance.fixed_profiles.nondispatchable_gen[k];
            self.row(expr, RowSense::Eq, net, format!("balance[{t}]"))?;
        }
        Ok(())
    }

    /// Bounds every exchange variable to `[-limit, limit]`.
    pub fn add_grid_limits(&mut self, limit: f64) -> Result<(), FormulationError> {
        if !(limit >= 0.0 && limit.is_finite()) {
            return Err(FormulationError::InvalidTransferLimit(limit));
        }
        for &v in &self.vars.exchange {
            self.model.set_bounds(v, -limit, limit);
        }
        Ok(())
    }

    /// Operating cost: unit energy, no-load, startup and shutdown costs plus
    /// energy bought from (or sold to) the utility.
    pub fn set_cost_objective(&mut self, instance: &MicrogridInstance) {
        let tau = self.step;
        let mut terms = Vec::new();
        for (unit, vars) in instance.dispatchable_units.iter().zip(&self.vars.units) {
            for k in 0..self.periods {
                terms.push((vars.power[k], unit.marginal_cost * tau));
                terms.push((vars.on[k], unit.no_load_cost * tau));
                terms.push((vars.startup_cost[k], 1.0));
                terms.push((vars.shutdown_cost[k], 1.0));
            }
        }
        for (k, &v) in self.vars.exchange.iter().enumerate() {
            terms.push((v, instance.grid_link.market_price[k] * tau));
        }
        self.model.set_objective(ObjSense::Minimize, terms, 0.0);
    }

    /// Maximizes the exchange change into `period` in one direction.
    pub fn set_ramp_objective(&mut self, period: usize, direction: RampDirection) -> Result<(), FormulationError> {
        if period < 1 || period > self.periods {
            return Err(FormulationError::PeriodOutOfRange {
                period,
                periods: self.periods,
            });
        }
        let previous = if period == 1 {
            Value::Const(self.initial_exchange.ok_or(FormulationError::MissingInitialExchange)?)
        } else {
            Value::Var(self.vars.exchange[period - 2])
        };
        let sign = match direction {
            RampDirection::Up => 1.0,
            RampDirection::Down => -1.0,
        };
        let expr = Expr::new()
            .var(self.vars.exchange[period - 1], sign)
            .with(previous, -sign);
        self.model.set_objective(ObjSense::Maximize, expr.terms, expr.constant);
        Ok(())
    }

    /// First period whose incoming exchange change is constrained.
    pub fn first_transition(&self) -> usize {
        if self.initial_exchange.is_some() {
            1
        } else {
            2
        }
    }

    /// Restricts every exchange change to `bounds ∩ [-capability, capability]`.
    /// Nothing is added when any band is empty.
    pub fn add_ramp_band(&mut self, bounds: &RampBounds, capability: f64) -> Result<(), FormulationError> {
        if capability.is_nan() || capability < 0.0 {
            return Err(FormulationError::InvalidCapability(capability));
        }
        if bounds.lower.len() != self.periods || bounds.upper.len() != self.periods {
            return Err(FormulationError::BoundsLength {
                got: bounds.lower.len().min(bounds.upper.len()),
                expected: self.periods,
            });
        }
        let first = self.first_transition();
        let mut bands = Vec::new();
        for t in first..=self.periods {
            let (lo, hi) = (bounds.lower[t - 1], bounds.upper[t - 1]);
            let diagnosis = |conflict| BandDiagnosis {
                period: t,
                lower: lo,
                upper: hi,
                capability,
                conflict,
            };
            if lo > hi {
                return Err(FormulationError::EmptyBand(diagnosis(BandConflict::InvertedTarget)));
            }
            let (a, b) = (lo.max(-capability), hi.min(capability));
            if a > b {
                return Err(FormulationError::EmptyBand(diagnosis(BandConflict::ExceedsCapability)));
            }
            bands.push((t, a, b));
        }
        for (t, lo, hi) in bands {
            let previous = if t == 1 {
                Value::Const(self.initial_exchange.unwrap_or(0.0))
            } else {
                Value::Var(self.vars.exchange[t - 2])
            };
            let current = self.vars.exchange[t - 1];
            let change = || Expr::new().var(current, 1.0).with(previous, -1.0);
            if lo == hi {
                self.row(change(), RowSense::Eq, lo, format!("exchange_ramp[{t}]"))?;
                continue;
            }
            if lo.is_finite() {
                self.row(change(), RowSense::Ge, lo, format!("exchange_ramp_min[{t}]"))?;
            }
            if hi.is_finite() {
                self.row(change(), RowSense::Le, hi, format!("exchange_ramp_max[{t}]"))?;
            }
        }
        Ok(())
    }
}

/// Per-period limits on the exchange change into each period, indexed by
/// `period - 1`. Infinite entries mean no limit on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct RampBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RampBounds {
    pub fn unlimited(periods: usize) -> RampBounds {
        RampBounds {
            lower: vec![f64::NEG_INFINITY; periods],
            upper: vec![f64::INFINITY; periods],
        }
    }
}

/// Builds variables and rows for every unit, storage unit and adjustable
/// load. The power balance, grid limits and objective are added separately.
pub fn build_component_constraints(
    instance: &MicrogridInstance,
    options: &FormulationOptions,
) -> Result<Formulation, FormulationError> {
    let report = validate_instance(instance);
    if !report.is_valid() {
        return Err(FormulationError::InvalidInstance(report));
    }
    let periods = instance.periods();
    let tau = instance.step();
    let mut f = Formulation {
        model: MilpModel::new(),
        vars: VariableMap::default(),
        periods,
        step: tau,
        initial_exchange: instance.grid_link.initial_exchange,
    };

    for unit in &instance.dispatchable_units {
        let id = unit.id.as_str();
        let vars = UnitVars {
            power: f.new_series(false, "unit_power", id, |_| (0.0, unit.p_max)),
            on: f.new_series(true, "unit_on", id, |_| (0.0, 1.0)),
            startup_cost: f.new_series(false, "unit_startup_cost", id, |_| (0.0, unit.startup_cost)),
            shutdown_cost: f.new_series(false, "unit_shutdown_cost", id, |_| (0.0, unit.shutdown_cost)),
        };
        let initial_on = if unit.initial_committed { 1.0 } else { 0.0 };
        let on = series(&vars.on, initial_on);
        let power = series(&vars.power, unit.initial_power);
        for t in 1..=periods {
            let k = t - 1;
            f.row(
                Expr::new().var(vars.power[k], 1.0).var(vars.on[k], -unit.p_max),
                RowSense::Le,
                0.0,
                format!("unit_cap_max[{id},{t}]"),
            )?;
            if unit.p_min > 0.0 {
                f.row(
                    Expr::new().var(vars.power[k], 1.0).var(vars.on[k], -unit.p_min),
                    RowSense::Ge,
                    0.0,
                    format!("unit_cap_min[{id},{t}]"),
                )?;
            }
            f.row(
                Expr::new().with(power(t), 1.0).with(power(t - 1), -1.0),
                RowSense::Le,
                unit.ramp_up,
                format!("unit_ramp_up[{id},{t}]"),
            )?;
            f.row(
                Expr::new().with(power(t - 1), 1.0).with(power(t), -1.0),
                RowSense::Le,
                unit.ramp_down,
                format!("unit_ramp_down[{id},{t}]"),
            )?;
            if unit.startup_cost > 0.0 {
                f.row(
                    Expr::new()
                        .var(vars.startup_cost[k], 1.0)
                        .with(on(t), -unit.startup_cost)
                        .with(on(t - 1), unit.startup_cost),
                    RowSense::Ge,
                    0.0,
                    format!("unit_startup[{id},{t}]"),
                )?;
            }
            if unit.shutdown_cost > 0.0 {
                f.row(
                    Expr::new()
                        .var(vars.shutdown_cost[k], 1.0)
                        .with(on(t - 1), -unit.shutdown_cost)
                        .with(on(t), unit.shutdown_cost),
                    RowSense::Ge,
                    0.0,
                    format!("unit_shutdown[{id},{t}]"),
                )?;
            }
        }
        f.run_length_rows(&on, unit.min_up, "unit_min_up", id, false)?;
        f.run_length_rows(&on, unit.min_down, "unit_min_down", id, true)?;
        if unit.initial_committed {
            f.carry_over(&vars.on, unit.min_up, unit.initial_state_duration, 1.0)?;
        } else {
            f.carry_over(&vars.on, unit.min_down, unit.initial_state_duration, 0.0)?;
        }
        drop((on, power));
        f.vars.units.push(vars);
    }

    for st in &instance.storage_units {
        let id = st.id.as_str();
        let vars = StorageVars {
            discharge: f.new_series(false, "storage_discharge", id, |_| (0.0, st.p_dch_max)),
            charge: f.new_series(false, "storage_charge", id, |_| (0.0, st.p_ch_max)),
            discharging: f.new_series(true, "storage_discharging", id, |_| (0.0, 1.0)),
            charging: f.new_series(true, "storage_charging", id, |_| (0.0, 1.0)),
            energy: f.new_series(false, "storage_energy", id, |_| (st.cap_min, st.cap_max)),
        };
        let was = |mode| if st.initial_mode == mode { 1.0 } else { 0.0 };
        let discharging = series(&vars.discharging, was(StorageMode::Discharging));
        let charging = series(&vars.charging, was(StorageMode::Charging));
        let energy = series(&vars.energy, st.initial_energy);
        for t in 1..=periods {
            let k = t - 1;
            f.row(
                Expr::new().var(vars.discharge[k], 1.0).var(vars.discharging[k], -st.p_dch_max),
                RowSense::Le,
                0.0,
                format!("storage_discharge_max[{id},{t}]"),
            )?;
            if st.p_dch_min > 0.0 {
                f.row(
                    Expr::new().var(vars.discharge[k], 1.0).var(vars.discharging[k], -st.p_dch_min),
                    RowSense::Ge,
                    0.0,
                    format!("storage_discharge_min[{id},{t}]"),
                )?;
            }
            f.row(
                Expr::new().var(vars.charge[k], 1.0).var(vars.charging[k], -st.p_ch_max),
                RowSense::Le,
                0.0,
                format!("storage_charge_max[{id},{t}]"),
            )?;
            if st.p_ch_min > 0.0 {
                f.row(
                    Expr::new().var(vars.charge[k], 1.0).var(vars.charging[k], -st.p_ch_min),
                    RowSense::Ge,
                    0.0,
                    format!("storage_charge_min[{id},{t}]"),
                )?;
            }
            f.row(
                Expr::new().var(vars.discharging[k], 1.0).var(vars.charging[k], 1.0),
                RowSense::Le,
                1.0,
                format!("storage_mode[{id},{t}]"),
            )?;
            f.row(
                Expr::new()
                    .with(energy(t), 1.0)
                    .with(energy(t - 1), -1.0)
                    .var(vars.discharge[k], tau / st.efficiency)
                    .var(vars.charge[k], -tau),
                RowSense::Eq,
                0.0,
                format!("storage_energy_balance[{id},{t}]"),
            )?;
        }
        f.run_length_rows(&charging, st.min_charge_time, "storage_min_charge", id, false)?;
        f.run_length_rows(&discharging, st.min_discharge_time, "storage_min_discharge", id, false)?;
        match st.initial_mode {
            StorageMode::Charging => f.carry_over(&vars.charging, st.min_charge_time, st.initial_mode_duration, 1.0)?,
            StorageMode::Discharging => {
                f.carry_over(&vars.discharging, st.min_discharge_time, st.initial_mode_duration, 1.0)?
            }
            StorageMode::Idle => {}
        }
        if options.terminal_soc_at_least_initial {
            f.row(
                Expr::new().var(vars.energy[periods - 1], 1.0),
                RowSense::Ge,
                st.initial_energy,
                format!("storage_terminal_energy[{id}]"),
            )?;
        }
        drop((charging, discharging, energy));
        f.vars.storage.push(vars);
    }

    for load in &instance.adjustable_loads {
        let id = load.id.as_str();
        let vars = LoadVars {
            power: f.new_series(false, "load_power", id, |t| {
                (0.0, if load.in_window(t) { load.d_max[t - 1] } else { 0.0 })
            }),
            on: f.new_series(true, "load_on", id, |t| (0.0, if load.in_window(t) { 1.0 } else { 0.0 })),
        };
        let on = series(&vars.on, if load.initial_operating { 1.0 } else { 0.0 });
        for t in load.window_start..=load.window_end {
            let k = t - 1;
            f.row(
                Expr::new().var(vars.power[k], 1.0).var(vars.on[k], -load.d_max[k]),
                RowSense::Le,
                0.0,
                format!("load_power_max[{id},{t}]"),
            )?;
            if load.d_min[k] > 0.0 {
                f.row(
                    Expr::new().var(vars.power[k], 1.0).var(vars.on[k], -load.d_min[k]),
                    RowSense::Ge,
                    0.0,
                    format!("load_power_min[{id},{t}]"),
                )?;
            }
        }
        f.run_length_rows(&on, load.min_on, "load_min_on", id, false)?;
        if load.initial_operating {
            f.carry_over(&vars.on, load.min_on, load.initial_on_duration, 1.0)?;
        }
        let energy = (load.window_start..=load.window_end).fold(Expr::new(), |e, t| e.var(vars.power[t - 1], tau));
        f.row(energy, RowSense::Eq, load.energy, format!("load_energy[{id}]"))?;
        drop(on);
        f.vars.loads.push(vars);
    }

    Ok(f)
}

/// Components, power balance and grid limits: the feasible set shared by
/// every problem in this crate.
pub fn base_formulation(
    instance: &MicrogridInstance,
    options: &FormulationOptions,
) -> Result<Formulation, FormulationError> {
    let mut f = build_component_constraints(instance, options)?;
    f.add_power_balance(instance)?;
    f.add_grid_limits(instance.grid_link.transfer_limit)?;
    Ok(f)
}
