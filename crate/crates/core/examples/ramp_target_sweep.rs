//! Operating cost for utility ramp targets from 1 to 8 MW per hour.
//!
//!     cargo run --release --example ramp_target_sweep

use microramp::{bundled, cost_vs_ramp_limit, ramping_capability, unconstrained_schedule, AnalysisConfig};

fn main() -> anyhow::Result<()> {
    let inst = bundled::instance();
    let feeder = bundled::feeder();
    let config = AnalysisConfig::default();
    let r = ramping_capability(&inst, &config)?.capability;
    let free = unconstrained_schedule(&inst, &feeder, &config)?.cost;

    let targets: Vec<f64> = (1..=8).map(f64::from).collect();
    let curve = cost_vs_ramp_limit(&inst, &feeder, r, &targets, &config)?;
    println!("target      cost   above unconstrained");
    for p in &curve.points {
        match p.value {
            Some(cost) => println!("{:>6.1} {:>9.2} {:>10.2}", p.parameter, cost, cost - free),
            None => println!("{:>6.1} {:>9}", p.parameter, p.status.as_str()),
        }
    }
    println!("unconstrained {free:.2}");
    Ok(())
}
