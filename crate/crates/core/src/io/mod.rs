//! File formats: JSON input documents and CSV result tables.

pub mod document;
pub mod tables;

pub use document::{
    feeder_to_string, instance_to_string, load_feeder, load_instance, parse_feeder, parse_instance, DocumentError,
    FORMAT_VERSION,
};
pub use tables::{
    format_number, write_capability, write_curve, write_line_capacity_sweep, write_schedule, write_utility_profile,
};
