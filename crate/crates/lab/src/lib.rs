//! Experiment harness around `repwalk-core`: a flat JSON/flag configuration,
//! parallel replica orchestration with deterministic aggregation, and CSV/JSON
//! artifacts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{Experiment, ExperimentConfig, PartialConfig};
pub use error::{LabError, LabResult};
pub use experiments::{execute, execute_with_streams, Aggregates, Outcome};
