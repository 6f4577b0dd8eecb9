//! Command-line front end for the cantilever/ion simulator: run
//! configuration, figure presets, CSV output, parameter sweeps and the
//! validation report.

pub mod analysis;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod sweep;
pub mod table;
pub mod validation;

pub use config::{ConfigOverrides, ModelSelect, RunConfig};
pub use error::SimError;
pub use run::{run_simulation, simulate, RunOutput, RunSummary};
pub use sweep::{run_sweep, SweepRow, SweepVar};
pub use validation::{run_validation, ValidationOptions, ValidationReport};
