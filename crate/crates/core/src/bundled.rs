//! Synthetic 24-hour microgrid and duck-shaped feeder shipped with the crate.

use crate::instance::{FeederContext, MicrogridInstance};
use crate::io::{parse_feeder, parse_instance};

pub const INSTANCE_JSON: &str = include_str!("../data/bundled_instance.json");
pub const FEEDER_JSON: &str = include_str!("../data/bundled_feeder.json");

/// Four units, wind and solar, one battery and five shiftable loads.
pub fn instance() -> MicrogridInstance {
    parse_instance(INSTANCE_JSON).expect("bundled instance parses")
}

/// Other customers' net load, rising about 15 MW over hours 16 to 19 with
/// a 7 MW jump into hour 19, and a 2 MW ramp target.
pub fn feeder() -> FeederContext {
    parse_feeder(FEEDER_JSON).expect("bundled feeder parses")
}
