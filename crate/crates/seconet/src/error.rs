//! Error type shared across the simulator.
//!
//! Configuration problems (bad parameter values, malformed JSON, unknown
//! strategy names) are separated from runtime failures (I/O, seeding that
//! cannot satisfy its preconditions, numerical non-convergence) so the CLI
//! can map them to distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter values or unusable input files.
    #[error("configuration error: {0}")]
    Config(String),

    /// JSON that failed to parse or carried unknown/missing fields.
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    /// The population cannot support the requested initial couples.
    #[error("seeding error: {0}")]
    Seeding(String),

    /// Power iteration failed to reach the requested tolerance.
    #[error("eigenvector iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// An internal API was called outside its documented contract.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI should terminate with for this error:
    /// 1 for configuration/usage problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
