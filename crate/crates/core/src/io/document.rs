//! Versioned JSON documents for instances and feeder contexts.
//!
//! Unknown keys are rejected and every parse error names the offending
//! location, e.g. `storage_units[0].efficiency`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{
    AdjustableLoad, DispatchableUnit, FeederContext, FixedProfiles, GridLink, MicrogridInstance, RampTarget,
    StorageUnit, TimeGrid,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{location}: {message} (line {line}, column {column})")]
    Parse {
        /// Dotted location of the failing value; `.` is the document root.
        location: String,
        message: String,
        line: usize,
        column: usize,
    },
    #[error("unsupported document version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocument {
    version: u32,
    time_grid: TimeGrid,
    dispatchable_units: Vec<DispatchableUnit>,
    storage_units: Vec<StorageUnit>,
    adjustable_loads: Vec<AdjustableLoad>,
    fixed_profiles: FixedProfiles,
    grid_link: GridLink,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeederDocument {
    version: u32,
    customer_net_load: Vec<f64>,
    ramp_target: RampTarget,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let location = e.path().to_string();
        let inner = e.into_inner();
        DocumentError::Parse {
            location,
            message: strip_position(&inner.to_string()),
            line: inner.line(),
            column: inner.column(),
        }
    })?;
    de.end().map_err(|e| DocumentError::Parse {
        location: ".".into(),
        message: strip_position(&e.to_string()),
        line: e.line(),
        column: e.column(),
    })?;
    Ok(value)
}

/// serde_json appends " at line L column C"; the error reports those separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

fn check_version(found: u32) -> Result<(), DocumentError> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(DocumentError::Version { found })
    }
}

fn read(path: &Path) -> Result<String, DocumentError> {
    std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_instance(text: &str) -> Result<MicrogridInstance, DocumentError> {
    let doc: InstanceDocument = parse(text)?;
    check_version(doc.version)?;
    Ok(MicrogridInstance {
        time_grid: doc.time_grid,
        dispatchable_units: doc.dispatchable_units,
        storage_units: doc.storage_units,
        adjustable_loads: doc.adjustable_loads,
        fixed_profiles: doc.fixed_profiles,
        grid_link: doc.grid_link,
    })
}

pub fn instance_to_string(instance: &MicrogridInstance) -> String {
    let doc = InstanceDocument {
        version: FORMAT_VERSION,
        time_grid: instance.time_grid.clone(),
        dispatchable_units: instance.dispatchable_units.clone(),
        storage_units: instance.storage_units.clone(),
        adjustable_loads: instance.adjustable_loads.clone(),
        fixed_profiles: instance.fixed_profiles.clone(),
        grid_link: instance.grid_link.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize") + "\n"
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<MicrogridInstance, DocumentError> {
    parse_instance(&read(path.as_ref())?)
}

pub fn parse_feeder(text: &str) -> Result<FeederContext, DocumentError> {
    let doc: FeederDocument = parse(text)?;
    check_version(doc.version)?;
    Ok(FeederContext {
        customer_net_load: doc.customer_net_load,
        ramp_target: doc.ramp_target,
    })
}

pub fn feeder_to_string(feeder: &FeederContext) -> String {
    let doc = FeederDocument {
        version: FORMAT_VERSION,
        customer_net_load: feeder.customer_net_load.clone(),
        ramp_target: feeder.ramp_target.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("feeder documents always serialize") + "\n"
}

pub fn load_feeder(path: impl AsRef<Path>) -> Result<FeederContext, DocumentError> {
    parse_feeder(&read(path.as_ref())?)
}
