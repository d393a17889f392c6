//! Command-line companion to `hexcov-core`: config resolution, parallel
//! estimator drivers, and CSV/JSON result emission.

pub mod config;
pub mod driver;
pub mod emit;

/// Errors mapped onto the process exit codes: validation failures exit
/// 1, engine/runtime failures exit 2, I/O failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Engine(String),
    Io(String),
}

impl CliError {
    pub fn engine(e: hexcov_core::Error) -> Self {
        match e {
            hexcov_core::Error::Parameter { .. } | hexcov_core::Error::Domain(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Engine(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Engine(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation: {m}"),
            CliError::Engine(m) => write!(f, "engine: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
