//! Slow-light propagation, storage and retrieval of paraxial probe beams in
//! a tripod-coupled atomic cloud.
//!
//! Units: transverse and longitudinal lengths in probe wavelengths (k = 2π),
//! speed of light c = 1, group velocities as fractions of c. Rabi
//! frequencies and `g²n` share one frequency unit chosen by the caller.

pub mod analysis;
pub mod beams;
pub mod error;
pub mod grid;
pub mod io;
pub mod medium;
pub mod propagation;
pub mod scenarios;
pub mod spectral;
pub mod storage;

pub use num_complex::Complex64;

pub use beams::{lg_field, total_rabi, two_photon_mismatch, xi_ratios, ControlBeamSpec, ControlPair};
pub use error::{Error, Result};
pub use grid::{field_power, moments, ComplexField2D, TransverseGrid};
pub use medium::{group_velocity, AtomicFields, MediumParams};
pub use propagation::{
    propagate_through_medium, slowlight_step, vacuum_step, Boundary, Frame, PropagationConfig,
    PropagationOutcome, StepControls,
};
pub use storage::{
    lambda_store_tripod_retrieve, retrieve, store, tripod_store_lambda_retrieve, RetrievalResult,
    StoredCoherence, VortexTransfer,
};
pub use scenarios::{run_scenario, Assertion, ScenarioKind, ScenarioParams, ScenarioReport, ScenarioSpec};
