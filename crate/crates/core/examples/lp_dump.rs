//! Build a two-hour instance in code and print its cost model in LP format,
//! ready for an external solver.
//!
//!     cargo run --example lp_dump

use microramp::*;
use microramp_milp::write_lp;

fn main() -> anyhow::Result<()> {
    let inst = MicrogridInstance {
        time_grid: TimeGrid { periods: 2, step: 1.0 },
        dispatchable_units: vec![DispatchableUnit {
            id: "diesel".into(),
            p_min: 1.0,
            p_max: 3.0,
            marginal_cost: 40.0,
            no_load_cost: 5.0,
            startup_cost: 20.0,
            shutdown_cost: 0.0,
            ramp_up: 3.0,
            ramp_down: 3.0,
            min_up: 1,
            min_down: 1,
            initial_committed: false,
            initial_power: 0.0,
            initial_state_duration: 4,
        }],
        storage_units: vec![],
        adjustable_loads: vec![],
        fixed_profiles: FixedProfiles {
            fixed_load: vec![4.0, 6.0],
            nondispatchable_gen: vec![1.0, 0.5],
        },
        grid_link: GridLink {
            transfer_limit: 4.0,
            initial_exchange: None,
            market_price: vec![30.0, 55.0],
        },
    };
    let mut f = base_formulation(&inst, &FormulationOptions::default())?;
    f.set_cost_objective(&inst);
    print!("{}", write_lp(f.model()));
    Ok(())
}
