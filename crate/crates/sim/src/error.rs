use std::io;
use std::path::PathBuf;

use cantilever_ion_core::Error as ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bad configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    /// The ansatz trajectory disagrees with the Fock-space reference.
    #[error("{model} ansatz deviates from Fock reference by {deviation:.3e} (tolerance {tolerance:.1e})")]
    FockMismatch {
        model: &'static str,
        deviation: f64,
        tolerance: f64,
    },
}

impl SimError {
    /// Process exit status: 1 validation failure, 2 bad config, 3 runtime breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::FockMismatch { .. } => 1,
            SimError::Config(_) | SimError::Io { .. } => 2,
            SimError::Model(e) => match e {
                ModelError::InvalidParameter { .. }
                | ModelError::Domain { .. }
                | ModelError::InvalidGrid { .. } => 2,
                _ => 3,
            },
        }
    }
}
