//! Random tiny instances and an exhaustive oracle: every admissible binary
//! pattern is enumerated and the remaining continuous problem is solved by
//! an independent LP package.

#![allow(dead_code)]

use microramp::*;
use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn half<R: Rng>(rng: &mut R, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo * 2..=hi * 2) as f64 / 2.0
}

/// At most one unit, one storage unit and one adjustable load, T <= 4.
pub fn random_instance(seed: u64) -> MicrogridInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let inst = draw(&mut rng);
        if validate_instance(&inst).is_valid() {
            return inst;
        }
    }
}

fn draw(rng: &mut ChaCha8Rng) -> MicrogridInstance {
    let periods = [2, 3, 3, 4][rng.gen_range(0..4)];
    let step = if rng.gen_bool(0.8) { 1.0 } else { 0.5 };
    let mut units = vec![];
    if rng.gen_bool(0.75) {
        let p_min = half(rng, 0, 2);
        let committed = rng.gen_bool(0.5);
        let p_max = p_min + half(rng, 1, 4);
        units.push(DispatchableUnit {
            id: "G".into(),
            p_min,
            p_max,
            marginal_cost: rng.gen_range(10..50) as f64,
            no_load_cost: rng.gen_range(0..5) as f64,
            startup_cost: rng.gen_range(0..10) as f64,
            shutdown_cost: if rng.gen_bool(0.5) { rng.gen_range(1..5) as f64 } else { 0.0 },
            ramp_up: half(rng, 1, 4).max(p_min),
            ramp_down: half(rng, 1, 4).max(p_min),
            min_up: rng.gen_range(1..=3),
            min_down: rng.gen_range(1..=3),
            initial_committed: committed,
            initial_power: if committed { p_min + half(rng, 0, 1).min(p_max - p_min) } else { 0.0 },
            initial_state_duration: rng.gen_range(1..=3),
        });
    }
    let mut storage = vec![];
    if rng.gen_bool(0.75) {
        let cap_min = half(rng, 0, 1);
        let cap_max = cap_min + half(rng, 2, 6);
        let mode = [StorageMode::Idle, StorageMode::Charging, StorageMode::Discharging][rng.gen_range(0..3)];
        storage.push(StorageUnit {
            id: "S".into(),
            p_dch_min: if rng.gen_bool(0.5) { 0.5 } else { 0.0 },
            p_dch_max: half(rng, 1, 3),
            p_ch_min: if rng.gen_bool(0.5) { 0.5 } else { 0.0 },
            p_ch_max: half(rng, 1, 3),
            cap_min,
            cap_max,
            efficiency: [0.8, 0.9, 1.0][rng.gen_range(0..3)],
            initial_energy: cap_min + half(rng, 0, 2).min(cap_max - cap_min),
            min_charge_time: rng.gen_range(1..=2),
            min_discharge_time: rng.gen_range(1..=2),
            initial_mode: mode,
            initial_mode_duration: if mode == StorageMode::Idle { 0 } else { rng.gen_range(1..=2) },
        });
    }
    let mut loads = vec![];
    if rng.gen_bool(0.75) {
        let start = rng.gen_range(1..=periods);
        let end = rng.gen_range(start..=periods);
        let d_min: Vec<f64> = (0..periods).map(|_| if rng.gen_bool(0.5) { 0.5 } else { 0.0 }).collect();
        let d_max: Vec<f64> = d_min.iter().map(|lo| lo + half(rng, 1, 2)).collect();
        let lo: f64 = (start..=end).map(|t| d_min[t - 1] * step).sum();
        let hi: f64 = (start..=end).map(|t| d_max[t - 1] * step).sum();
        let energy = (lo + (hi - lo) * rng.gen_range(0.0..=1.0) * 2.0).round() / 2.0;
        let operating = start == 1 && rng.gen_bool(0.2);
        loads.push(AdjustableLoad {
            id: "L".into(),
            d_min,
            d_max,
            energy: energy.clamp(lo, hi),
            window_start: start,
            window_end: end,
            min_on: rng.gen_range(1..=2),
            initial_operating: operating,
            initial_on_duration: if operating { rng.gen_range(1..=2) } else { 0 },
        });
    }
    MicrogridInstance {
        time_grid: TimeGrid { periods, step },
        dispatchable_units: units,
        storage_units: storage,
        adjustable_loads: loads,
        fixed_profiles: FixedProfiles {
            fixed_load: (0..periods).map(|_| half(rng, 3, 8)).collect(),
            nondispatchable_gen: (0..periods).map(|_| half(rng, 0, 2)).collect(),
        },
        grid_link: GridLink {
            transfer_limit: rng.gen_range(5..=12) as f64,
            initial_exchange: if rng.gen_bool(0.2) { Some(half(rng, 0, 6)) } else { None },
            market_price: (0..periods).map(|_| rng.gen_range(10..60) as f64).collect(),
        },
    }
}

/// Feeder with random changes of up to 4 MW per period.
pub fn random_feeder(seed: u64, periods: usize) -> FeederContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut level = 10.0;
    let load = (0..periods)
        .map(|_| {
            level += half(&mut rng, -4, 4);
            level
        })
        .collect();
    FeederContext {
        customer_net_load: load,
        ramp_target: RampTarget::Uniform(half(&mut rng, 0, 3)),
    }
}

/// Whether a sequence respects a minimum run length for `active`, counting
/// `elapsed` periods already spent in the initial state.
fn holds(states: &[bool], initial: bool, elapsed: usize, active: bool, length: usize) -> bool {
    let mut run = if initial == active { elapsed } else { 0 };
    let mut previous = initial;
    for &s in states {
        if previous == active && s != active && run < length {
            return false;
        }
        run = if s == active { run + 1 } else { 0 };
        previous = s;
    }
    true
}

fn sequences(periods: usize) -> Vec<Vec<bool>> {
    (0..1usize << periods)
        .map(|m| (0..periods).map(|t| m >> t & 1 == 1).collect())
        .collect()
}

/// 0 idle, 1 charging, 2 discharging.
fn mode_sequences(periods: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..periods {
        out = out
            .into_iter()
            .flat_map(|s: Vec<u8>| (0..3).map(move |m| [s.clone(), vec![m]].concat()))
            .collect();
    }
    out
}

struct Pattern {
    unit: Option<Vec<bool>>,
    storage: Option<Vec<u8>>,
    load: Option<Vec<bool>>,
}

fn patterns(inst: &MicrogridInstance) -> Vec<Pattern> {
    let periods = inst.periods();
    let units: Vec<Option<Vec<bool>>> = match inst.dispatchable_units.first() {
        None => vec![None],
        Some(u) => sequences(periods)
            .into_iter()
            .filter(|s| {
                holds(s, u.initial_committed, u.initial_state_duration, true, u.min_up)
                    && holds(s, u.initial_committed, u.initial_state_duration, false, u.min_down)
            })
            .map(Some)
            .collect(),
    };
    let stores: Vec<Option<Vec<u8>>> = match inst.storage_units.first() {
        None => vec![None],
        Some(st) => mode_sequences(periods)
            .into_iter()
            .filter(|s| {
                let charging: Vec<bool> = s.iter().map(|&m| m == 1).collect();
                let discharging: Vec<bool> = s.iter().map(|&m| m == 2).collect();
                let e = st.initial_mode_duration;
                holds(&charging, st.initial_mode == StorageMode::Charging, e, true, st.min_charge_time)
                    && holds(&discharging, st.initial_mode == StorageMode::Discharging, e, true, st.min_discharge_time)
            })
            .map(Some)
            .collect(),
    };
    let loads: Vec<Option<Vec<bool>>> = match inst.adjustable_loads.first() {
        None => vec![None],
        Some(d) => sequences(periods)
            .into_iter()
            .filter(|s| {
                s.iter().enumerate().all(|(k, &on)| !on || d.in_window(k + 1))
                    && holds(s, d.initial_operating, d.initial_on_duration, true, d.min_on)
            })
            .map(Some)
            .collect(),
    };
    let mut out = vec![];
    for u in &units {
        for s in &stores {
            for l in &loads {
                out.push(Pattern {
                    unit: u.clone(),
                    storage: s.clone(),
                    load: l.clone(),
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
pub enum Goal {
    Cost,
    /// Maximize the exchange change into the period, upward or downward.
    Swing(usize, bool),
}

/// Builds the continuous problem for one pattern; returns the optimum or
/// `None` when the pattern admits no dispatch.
fn solve_pattern(inst: &MicrogridInstance, p: &Pattern, goal: Goal, band: Option<&[(f64, f64)]>) -> Option<f64> {
    let periods = inst.periods();
    let tau = inst.step();
    let direction = match goal {
        Goal::Cost => OptimizationDirection::Minimize,
        Goal::Swing(..) => OptimizationDirection::Maximize,
    };
    let mut lp = Problem::new(direction);
    let mut constant = 0.0;
    let cost = matches!(goal, Goal::Cost);
    let c = |x: f64| if cost { x } else { 0.0 };

    let limit = inst.grid_link.transfer_limit;
    let exchange: Vec<Variable> = (0..periods)
        .map(|k| lp.add_var(c(inst.grid_link.market_price[k] * tau), (-limit, limit)))
        .collect();
    let mut supply: Vec<Vec<(Variable, f64)>> = exchange.iter().map(|&m| vec![(m, 1.0)]).collect();

    if let (Some(u), Some(on)) = (inst.dispatchable_units.first(), &p.unit) {
        let mut previous_on = u.initial_committed;
        let mut previous: Option<Variable> = None;
        for k in 0..periods {
            let (lo, hi) = if on[k] { (u.p_min, u.p_max) } else { (0.0, 0.0) };
            let power = lp.add_var(c(u.marginal_cost * tau), (lo, hi));
            if on[k] {
                constant += u.no_load_cost * tau;
            }
            if on[k] && !previous_on {
                constant += u.startup_cost;
            }
            if !on[k] && previous_on {
                constant += u.shutdown_cost;
            }
            match previous {
                None => {
                    lp.add_constraint([(power, 1.0)], ComparisonOp::Le, u.initial_power + u.ramp_up);
                    lp.add_constraint([(power, 1.0)], ComparisonOp::Ge, u.initial_power - u.ramp_down);
                }
                Some(prev) => {
                    lp.add_constraint([(power, 1.0), (prev, -1.0)], ComparisonOp::Le, u.ramp_up);
                    lp.add_constraint([(prev, 1.0), (power, -1.0)], ComparisonOp::Le, u.ramp_down);
                }
            }
            supply[k].push((power, 1.0));
            previous = Some(power);
            previous_on = on[k];
        }
    }

    if let (Some(st), Some(modes)) = (inst.storage_units.first(), &p.storage) {
        let mut previous: Option<Variable> = None;
        for k in 0..periods {
            let (dlo, dhi) = if modes[k] == 2 { (st.p_dch_min, st.p_dch_max) } else { (0.0, 0.0) };
            let (clo, chi) = if modes[k] == 1 { (st.p_ch_min, st.p_ch_max) } else { (0.0, 0.0) };
            let dch = lp.add_var(0.0, (dlo, dhi));
            let ch = lp.add_var(0.0, (clo, chi));
            let energy = lp.add_var(0.0, (st.cap_min, st.cap_max));
            let flow = [(energy, 1.0), (dch, tau / st.efficiency), (ch, -tau)];
            match previous {
                None => lp.add_constraint(flow, ComparisonOp::Eq, st.initial_energy),
                Some(prev) => lp.add_constraint([flow.as_slice(), &[(prev, -1.0)]].concat(), ComparisonOp::Eq, 0.0),
            }
            supply[k].push((dch, 1.0));
            supply[k].push((ch, -1.0));
            previous = Some(energy);
        }
    }

    if let (Some(d), Some(on)) = (inst.adjustable_loads.first(), &p.load) {
        let mut total = vec![];
        for k in 0..periods {
            let (lo, hi) = if on[k] { (d.d_min[k], d.d_max[k]) } else { (0.0, 0.0) };
            let power = lp.add_var(0.0, (lo, hi));
            if d.in_window(k + 1) {
                total.push((power, tau));
            }
            supply[k].push((power, -1.0));
        }
        lp.add_constraint(total, ComparisonOp::Eq, d.energy);
    }

    let profiles = &inst.fixed_profiles;
    for (k, terms) in supply.iter().enumerate() {
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, profiles.fixed_load[k] - profiles.nondispatchable_gen[k]);
    }

    let change = |k: usize| -> (Vec<(Variable, f64)>, f64) {
        if k == 0 {
            (vec![(exchange[0], 1.0)], inst.grid_link.initial_exchange.unwrap_or(0.0))
        } else {
            (vec![(exchange[k], 1.0), (exchange[k - 1], -1.0)], 0.0)
        }
    };
    if let Some(band) = band {
        for (k, &(lo, hi)) in band.iter().enumerate() {
            if lo.is_finite() || hi.is_finite() {
                let (terms, offset) = change(k);
                lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, lo + offset);
                lp.add_constraint(terms.as_slice(), ComparisonOp::Le, hi + offset);
            }
        }
    }

    let mut swing_offset = 0.0;
    if let Goal::Swing(t, up) = goal {
        // Objective is on the exchange change; a helper variable carries it.
        let sign = if up { 1.0 } else { -1.0 };
        let helper = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let (terms, offset) = change(t - 1);
        let mut row: Vec<(Variable, f64)> = terms.iter().map(|&(v, a)| (v, a * sign)).collect();
        row.push((helper, -1.0));
        lp.add_constraint(row, ComparisonOp::Eq, 0.0);
        swing_offset = -sign * offset;
    }

    match lp.solve() {
        Ok(sol) if cost => Some(sol.objective() + constant),
        Ok(sol) => Some(sol.objective() + swing_offset),
        Err(_) => None,
    }
}

/// Optimum over every admissible pattern, or `None` when none is feasible.
pub fn oracle(inst: &MicrogridInstance, goal: Goal, band: Option<&[(f64, f64)]>) -> Option<f64> {
    let better = |a: f64, b: f64| match goal {
        Goal::Cost => a.min(b),
        Goal::Swing(..) => a.max(b),
    };
    patterns(inst)
        .iter()
        .filter_map(|p| solve_pattern(inst, p, goal, band))
        .reduce(better)
}

/// Capability by enumeration: smallest over transitions of the larger
/// directional maximum.
pub fn oracle_capability(inst: &MicrogridInstance) -> Option<f64> {
    let first = if inst.grid_link.initial_exchange.is_some() { 1 } else { 2 };
    let mut best = f64::INFINITY;
    for t in first..=inst.periods() {
        let up = oracle(inst, Goal::Swing(t, true), None)?;
        let down = oracle(inst, Goal::Swing(t, false), None)?;
        best = best.min(up.max(down));
    }
    Some(best)
}

/// Ramp band per period (index `t - 1`) for a feeder and capability,
/// written out from the definition.
pub fn oracle_band(inst: &MicrogridInstance, feeder: &FeederContext, capability: f64) -> Vec<(f64, f64)> {
    let first = if inst.grid_link.initial_exchange.is_some() { 1 } else { 2 };
    (1..=inst.periods())
        .map(|t| {
            if t < first {
                return (f64::NEG_INFINITY, f64::INFINITY);
            }
            let (lo, hi) = if t == 1 {
                (f64::NEG_INFINITY, f64::INFINITY)
            } else {
                let target = feeder.ramp_target.at(t);
                let jump = feeder.customer_net_load[t - 1] - feeder.customer_net_load[t - 2];
                (-target - jump, target - jump)
            };
            (lo.max(-capability), hi.min(capability))
        })
        .collect()
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

/// Outcome of comparing the library with the oracle on one instance.
#[derive(Debug, Default)]
pub struct OracleCheck {
    pub capability_compared: bool,
    pub schedule_feasible: bool,
    pub mismatch: Option<String>,
}

/// Capability and ramp-constrained cost against the oracle.
pub fn compare_with_oracle(seed: u64, config: &AnalysisConfig) -> OracleCheck {
    let inst = random_instance(seed);
    let mut check = OracleCheck::default();
    let expected = oracle_capability(&inst);
    let got = ramping_capability(&inst, config);
    let capability = match (expected, got) {
        (Some(e), Ok(r)) if close(e, r.capability) => {
            check.capability_compared = true;
            r.capability
        }
        (None, Err(e)) if e.is_infeasible() => return check,
        (e, g) => {
            check.mismatch = Some(format!("seed {seed}: capability oracle {e:?}, library {:?}", g.map(|r| r.capability)));
            return check;
        }
    };
    let feeder = random_feeder(seed, inst.periods());
    let band = oracle_band(&inst, &feeder, capability);
    let expected = if band.iter().any(|(lo, hi)| lo > hi) {
        None
    } else {
        oracle(&inst, Goal::Cost, Some(&band))
    };
    let got = optimal_schedule(&inst, &feeder, capability, config);
    match (expected, got) {
        (Some(e), Ok(s)) if close(e, s.cost) => {
            let violations = check_schedule(&inst, &config.formulation, &s.schedule);
            if !violations.is_empty() {
                check.mismatch = Some(format!("seed {seed}: schedule fails the checker: {}", violations[0]));
            }
            check.schedule_feasible = true;
        }
        (None, Err(e)) if e.is_infeasible() => {}
        (e, g) => {
            check.mismatch = Some(format!("seed {seed}: cost oracle {e:?}, library {:?}", g.map(|s| s.cost)));
        }
    }
    check
}
