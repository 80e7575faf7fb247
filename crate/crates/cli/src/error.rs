use std::fmt;
use std::path::PathBuf;

use nashroyalty_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_DEAL: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    ScenarioParse { path: PathBuf, message: String },

    #[error("{0}")]
    ScenarioInvalid(ValidationError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_infeasible() => EXIT_NO_DEAL,
            CliError::Model(e) => match e {
                Error::DegenerateOrigin | Error::DegenerateLine => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            },
            CliError::Usage(_) | CliError::ScenarioParse { .. } | CliError::ScenarioInvalid(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::VerificationFailed => EXIT_INTERNAL,
        }
    }
}

/// Every invariant a scenario file breaks, grouped per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub path: PathBuf,
    pub violations: Vec<String>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} problem(s) found", self.path.display(), self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}
