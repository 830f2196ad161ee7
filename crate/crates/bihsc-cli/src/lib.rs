//! Library backing the `bihsc` binary: scenario ingestion, command
//! implementations, and deterministic artifact emission. Kept as a library
//! so integration tests can drive the commands directly.

pub mod commands;
pub mod emit;
pub mod scenario;

/// Command-level failure. Exit codes: validation/config/io problems map to
/// 1, a resonant refusal to 2 and a singular Gram system to 3; every error
/// is also printed as one machine-readable JSON object on stdout.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("gamma = {gamma} is resonant (pairs {pairs:?}); exact null control refused")]
    Resonant {
        gamma: f64,
        pairs: Vec<(usize, usize)>,
    },
    #[error("gram matrix numerically singular (rcond = {rcond:.3e})")]
    Singular { rcond: f64 },
    #[error(transparent)]
    Core(#[from] bihsc::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "invalid_scenario",
            CliError::Io(_) => "io_error",
            CliError::Resonant { .. } => "resonant_parameters",
            CliError::Singular { .. } => "singular_gram",
            CliError::Core(bihsc::Error::ResonantParameters { .. }) => "resonant_parameters",
            CliError::Core(bihsc::Error::SingularGram { .. }) => "singular_gram",
            CliError::Core(_) => "computation_error",
        }
    }

    /// Documented process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resonant { .. } | CliError::Core(bihsc::Error::ResonantParameters { .. }) => 2,
            CliError::Singular { .. } | CliError::Core(bihsc::Error::SingularGram { .. }) => 3,
            _ => 1,
        }
    }

    /// The JSON object printed on stdout when the command fails.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": {
                "code": self.code(),
                "message": self.to_string(),
            }
        })
    }
}
