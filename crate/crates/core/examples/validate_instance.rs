//! Validate an instance file, or the bundled one when no path is given.
//!
//!     cargo run --example validate_instance -- path/to/instance.json

use microramp::{bundled, io, validate_instance};

fn main() -> anyhow::Result<()> {
    let inst = match std::env::args().nth(1) {
        Some(path) => io::load_instance(&path)?,
        None => bundled::instance(),
    };
    let report = validate_instance(&inst);
    println!(
        "{} periods, {} units, {} storage units, {} adjustable loads",
        inst.periods(),
        inst.dispatchable_units.len(),
        inst.storage_units.len(),
        inst.adjustable_loads.len()
    );
    if report.violations.is_empty() && report.warnings.is_empty() {
        println!("no issues");
    } else {
        print!("{report}");
    }
    if !report.is_valid() {
        std::process::exit(2);
    }
    Ok(())
}
