//! Utility-side net load with and without the ramp target, written as two
//! CSV files next to each other for plotting.
//!
//!     cargo run --release --example utility_profile -- out_dir

use std::fs::File;
use std::path::PathBuf;

use microramp::{bundled, io, optimal_schedule, ramping_capability, unconstrained_schedule, AnalysisConfig};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let inst = bundled::instance();
    let feeder = bundled::feeder().with_ramp_target(2.0);
    let config = AnalysisConfig::default();

    let r = ramping_capability(&inst, &config)?.capability;
    let runs = [
        ("utility_unconstrained.csv", unconstrained_schedule(&inst, &feeder, &config)?),
        ("utility_ramp_limited.csv", optimal_schedule(&inst, &feeder, r, &config)?),
    ];
    for (name, out) in &runs {
        let path = dir.join(name);
        io::write_utility_profile(File::create(&path)?, &out.schedule, &feeder, &out.utility)?;
        println!("{}: worst ramp {:.2} MW", path.display(), out.utility.max_abs_ramp());
    }

    println!("\nhour  feeder  unconstrained  limited");
    for t in 2..=inst.periods() {
        let jump = feeder.customer_net_load[t - 1] - feeder.customer_net_load[t - 2];
        println!(
            "{t:>4} {jump:>7.1} {:>14.2} {:>8.2}",
            runs[0].1.utility.ramps[t - 2],
            runs[1].1.utility.ramps[t - 2]
        );
    }
    Ok(())
}
