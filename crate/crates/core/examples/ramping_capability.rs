//! Hour-by-hour ramping capability of the bundled microgrid.
//!
//!     cargo run --release --example ramping_capability

use microramp::{bundled, ramping_capability, AnalysisConfig};

fn main() -> anyhow::Result<()> {
    let inst = bundled::instance();
    let result = ramping_capability(&inst, &AnalysisConfig::default())?;
    println!("period      up    down");
    for p in &result.periods {
        let mark = if p.period == result.argmin_period { " <- binding" } else { "" };
        println!("{:>6} {:>7.3} {:>7.3}{mark}", p.period, p.up, p.down);
    }
    let nodes: usize = result.diagnostics.iter().map(|d| d.nodes).sum();
    println!("capability R = {:.3} MW per period ({} MILPs, {nodes} nodes)", result.capability, result.diagnostics.len());
    Ok(())
}
