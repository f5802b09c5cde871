//! Small instances shared by unit tests.

use crate::instance::*;

/// Three periods, one unit, one storage, one adjustable load.
pub fn small_instance() -> MicrogridInstance {
    MicrogridInstance {
        time_grid: TimeGrid { periods: 3, step: 1.0 },
        dispatchable_units: vec![DispatchableUnit {
            id: "G1".into(),
            p_min: 1.0,
            p_max: 3.0,
            marginal_cost: 20.0,
            no_load_cost: 5.0,
            startup_cost: 10.0,
            shutdown_cost: 0.0,
            ramp_up: 2.0,
            ramp_down: 2.0,
            min_up: 2,
            min_down: 1,
            initial_committed: false,
            initial_power: 0.0,
            initial_state_duration: 3,
        }],
        storage_units: vec![StorageUnit {
            id: "S1".into(),
            p_dch_min: 0.0,
            p_dch_max: 2.0,
            p_ch_min: 0.0,
            p_ch_max: 2.0,
            cap_min: 0.0,
            cap_max: 8.0,
            efficiency: 0.9,
            initial_energy: 4.0,
            min_charge_time: 1,
            min_discharge_time: 1,
            initial_mode: StorageMode::Idle,
            initial_mode_duration: 0,
        }],
        adjustable_loads: vec![AdjustableLoad {
            id: "L1".into(),
            d_min: vec![0.5; 3],
            d_max: vec![2.0; 3],
            energy: 3.0,
            window_start: 1,
            window_end: 3,
            min_on: 1,
            initial_operating: false,
            initial_on_duration: 0,
        }],
        fixed_profiles: FixedProfiles {
            fixed_load: vec![5.0, 6.0, 7.0],
            nondispatchable_gen: vec![1.0, 0.0, 0.5],
        },
        grid_link: GridLink {
            transfer_limit: 10.0,
            initial_exchange: None,
            market_price: vec![40.0, 50.0, 60.0],
        },
    }
}

/// No components: the exchange must cover `load` exactly.
pub fn bare_instance(load: Vec<f64>, price: Vec<f64>, limit: f64) -> MicrogridInstance {
    MicrogridInstance {
        time_grid: TimeGrid {
            periods: load.len(),
            step: 1.0,
        },
        dispatchable_units: vec![],
        storage_units: vec![],
        adjustable_loads: vec![],
        fixed_profiles: FixedProfiles {
            nondispatchable_gen: vec![0.0; load.len()],
            fixed_load: load,
        },
        grid_link: GridLink {
            transfer_limit: limit,
            initial_exchange: None,
            market_price: price,
        },
    }
}

/// One flexible unit able to cover 0 or 1..=6 MW of a constant 10 MW load.
pub fn one_unit_instance(periods: usize) -> MicrogridInstance {
    let mut inst = bare_instance(vec![10.0; periods], vec![30.0; periods], 20.0);
    inst.dispatchable_units.push(DispatchableUnit {
        id: "G1".into(),
        p_min: 1.0,
        p_max: 6.0,
        marginal_cost: 20.0,
        no_load_cost: 0.0,
        startup_cost: 0.0,
        shutdown_cost: 0.0,
        ramp_up: 10.0,
        ramp_down: 10.0,
        min_up: 1,
        min_down: 1,
        initial_committed: false,
        initial_power: 0.0,
        initial_state_duration: 1,
    });
    inst
}
