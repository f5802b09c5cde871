//! Monotonicity and consistency properties of the analyses.

mod common;

use common::*;
use microramp::*;

fn tiny() -> (MicrogridInstance, FeederContext) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    (
        io::load_instance(format!("{dir}/tiny_instance.json")).unwrap(),
        io::load_feeder(format!("{dir}/tiny_feeder.json")).unwrap(),
    )
}

#[test]
fn capability_grows_with_transfer_limit() {
    let config = AnalysisConfig::default();
    for seed in 200..215 {
        let inst = random_instance(seed);
        let limits = [2.0, 4.0, 6.0, 9.0, 13.0];
        let curve = capability_vs_line_capacity(&inst, &limits, &config).unwrap();
        let mut previous: Option<f64> = None;
        for p in &curve.capability.points {
            // Once feasible, a larger limit stays feasible.
            if previous.is_some() {
                assert_eq!(p.status, PointStatus::Optimal, "seed {seed} at {}", p.parameter);
            }
            if let Some(r) = p.value {
                if let Some(prev) = previous {
                    assert!(r >= prev - 1e-9, "seed {seed}: {prev} then {r} at {}", p.parameter);
                }
                previous = Some(r);
            }
        }
        let costs: Vec<f64> = curve.cost.points.iter().filter_map(|p| p.value).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0] + 1e-6 * w[0].abs().max(1.0)), "seed {seed}: {costs:?}");
    }
}

#[test]
fn cost_falls_as_ramp_target_loosens() {
    let config = AnalysisConfig::default();
    let targets = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 1e9];
    for seed in 300..320 {
        let inst = random_instance(seed);
        let Ok(cap) = ramping_capability(&inst, &config) else { continue };
        let feeder = random_feeder(seed, inst.periods());
        let curve = cost_vs_ramp_limit(&inst, &feeder, 1e9, &targets, &config).unwrap();
        let feasible: Vec<f64> = curve.points.iter().filter_map(|p| p.value).collect();
        assert!(feasible.windows(2).all(|w| w[1] <= w[0] + 1e-6 * w[0].abs().max(1.0)), "seed {seed}: {feasible:?}");
        // An unbounded target and capability leave only the base model.
        let free = unconstrained_schedule(&inst, &feeder, &config).unwrap();
        assert_eq!(curve.points.last().unwrap().value, Some(free.cost), "seed {seed}");
        // Restricting to the capability can only cost more.
        if let Ok(s) = optimal_schedule(&inst, &feeder.with_ramp_target(1e9), cap.capability, &config) {
            assert!(s.cost >= free.cost - 1e-6 * free.cost.abs().max(1.0), "seed {seed}");
        }
    }
}

#[test]
fn capability_is_achievable_on_an_empty_feeder() {
    let config = AnalysisConfig::default();
    for inst in [tiny().0, bundled::instance()] {
        let r = ramping_capability(&inst, &config).unwrap().capability;
        let out = optimal_schedule(&inst, &FeederContext::empty(inst.periods(), r), r, &config).unwrap();
        assert!(out.utility.max_abs_ramp() <= r + 1e-6);
    }
}

#[test]
fn forced_exchange_can_exceed_its_capability() {
    // With no resources the exchange must follow the load: it changes by 4
    // and then 3, so the capability is 3 and a band of 3 cannot be met.
    let mut inst = random_instance(0);
    inst.time_grid = TimeGrid { periods: 3, step: 1.0 };
    inst.dispatchable_units.clear();
    inst.storage_units.clear();
    inst.adjustable_loads.clear();
    inst.fixed_profiles = FixedProfiles {
        fixed_load: vec![10.0, 14.0, 11.0],
        nondispatchable_gen: vec![0.0; 3],
    };
    inst.grid_link = GridLink {
        transfer_limit: 20.0,
        initial_exchange: None,
        market_price: vec![50.0; 3],
    };
    let config = AnalysisConfig::default();
    let r = ramping_capability(&inst, &config).unwrap().capability;
    assert_eq!(r, 3.0);
    let err = optimal_schedule(&inst, &FeederContext::empty(3, r), r, &config).unwrap_err();
    assert!(err.is_infeasible());
}

#[test]
fn zero_target_on_a_moving_feeder_is_an_infeasible_point() {
    let (inst, feeder) = tiny();
    let curve = cost_vs_ramp_limit(&inst, &feeder, 1.0, &[0.0, 5.0], &AnalysisConfig::default()).unwrap();
    assert_eq!(curve.points[0].status, PointStatus::Infeasible);
    assert_eq!(curve.points[0].value, None);
    assert_eq!(curve.points[1].status, PointStatus::Optimal);
}

#[test]
fn per_period_targets_relax_only_their_period() {
    let (inst, feeder) = tiny();
    let config = AnalysisConfig::default();
    let strict = optimal_schedule(&inst, &feeder.with_ramp_target(0.5), 1e9, &config).unwrap();
    let mut targets = vec![0.5; inst.periods()];
    targets[3] = 1e9;
    let relaxed_feeder = FeederContext {
        customer_net_load: feeder.customer_net_load.clone(),
        ramp_target: RampTarget::PerPeriod(targets),
    };
    let relaxed = optimal_schedule(&inst, &relaxed_feeder, 1e9, &config).unwrap();
    assert!(relaxed.cost <= strict.cost + 1e-9);
    for (k, r) in relaxed.utility.ramps.iter().enumerate() {
        if k + 2 != 4 {
            assert!(r.abs() <= 0.5 + 1e-6, "transition into {}: {r}", k + 2);
        }
    }
}
