//! Ramping capability and operating cost as the interconnection limit grows.
//! Takes a minute or two in release mode; pass `lo hi` to narrow the range.
//!
//!     cargo run --release --example line_capacity_sweep -- 2 15

use microramp::{bundled, capability_vs_line_capacity, io, AnalysisConfig};

fn main() -> anyhow::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (lo, hi) = match args[..] {
        [lo, hi] => (lo as u32, hi as u32),
        _ => (2, 15),
    };
    let limits: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let config = AnalysisConfig {
        workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        ..AnalysisConfig::default()
    };
    let sweep = capability_vs_line_capacity(&bundled::instance(), &limits, &config)?;
    io::write_line_capacity_sweep(std::io::stdout(), &sweep)?;
    Ok(())
}
