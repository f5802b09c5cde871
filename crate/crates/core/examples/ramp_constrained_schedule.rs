//! Cheapest day-ahead schedule that keeps the feeder's ramp within 2 MW per
//! hour, compared with the schedule that ignores the feeder.
//!
//!     cargo run --release --example ramp_constrained_schedule

use microramp::{bundled, optimal_schedule, ramping_capability, unconstrained_schedule, AnalysisConfig};

fn main() -> anyhow::Result<()> {
    let inst = bundled::instance();
    let feeder = bundled::feeder().with_ramp_target(2.0);
    let config = AnalysisConfig::default();

    let r = ramping_capability(&inst, &config)?.capability;
    let free = unconstrained_schedule(&inst, &feeder, &config)?;
    let held = optimal_schedule(&inst, &feeder, r, &config)?;

    for (name, out) in [("unconstrained", &free), ("ramp target 2", &held)] {
        let c = &out.schedule.cost;
        println!(
            "{name:>14}: cost {:9.2} (generation {:.2}, start/stop {:.2}, purchases {:.2}), worst utility ramp {:.2}",
            out.cost,
            c.generation,
            c.startup_shutdown,
            c.energy_purchase,
            out.utility.max_abs_ramp()
        );
    }

    println!("\nevening hours, ramp target 2:");
    println!("hour  exchange  units    storage  loads");
    let s = &held.schedule;
    for t in 15..=21 {
        let k = t - 1;
        let units: f64 = s.units.iter().map(|u| u.power[k]).sum();
        let storage: f64 = s.storage.iter().map(|b| b.discharge[k] - b.charge[k]).sum();
        let loads: f64 = s.loads.iter().map(|d| d.power[k]).sum();
        println!("{t:>4} {:>9.2} {units:>6.2} {storage:>10.2} {loads:>6.2}", s.exchange[k]);
    }
    Ok(())
}
