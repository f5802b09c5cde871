//! Microgrid ramping capability and ramp-constrained day-ahead scheduling.
//!
//! A [`MicrogridInstance`] describes the local generation, storage and
//! flexible demand behind one interconnection line. [`ramping_capability`]
//! finds the largest exchange swing the microgrid can offer in every hour, and
//! [`optimal_schedule`] computes the cheapest day-ahead schedule whose exchange
//! keeps the utility's feeder ramp inside a target.

pub mod analysis;
pub mod bundled;
pub mod formulation;
pub mod instance;
pub mod io;
pub mod validate;

#[cfg(test)]
mod fixtures;

pub use instance::{
    AdjustableLoad, DispatchableUnit, FeederContext, FixedProfiles, GridLink, MicrogridInstance, RampTarget,
    StorageMode, StorageUnit, TimeGrid,
};
pub use formulation::{
    base_formulation, build_component_constraints, BandConflict, BandDiagnosis, Formulation, FormulationError,
    FormulationOptions, RampBounds, RampDirection, VariableMap,
};
pub use analysis::{
    capability_vs_line_capacity, check_schedule, compute_ramp_bounds, cost_vs_ramp_limit, decode_schedule,
    optimal_schedule, ramping_capability, unconstrained_schedule, utility_ramp_profile, AnalysisConfig,
    AnalysisError, CapabilityResult, CostBreakdown, InfeasibleCause, LineCapacitySweep, LoadSchedule,
    PeriodCapability, PointStatus, Schedule, ScheduleOutcome, SolveDiagnostics, StorageSchedule, SweepCurve,
    SweepPoint, UnitSchedule, UtilityProfile, Violation,
};
pub use validate::{validate_feeder, validate_instance, Issue, ValidationReport};
