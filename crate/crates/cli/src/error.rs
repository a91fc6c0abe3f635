use std::fmt;
use std::path::Path;

use tvar_rd::Error;

pub const EXIT_IO: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_CONVERGENCE: u8 = 4;
pub const EXIT_THRESHOLD: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn bad_input(message: impl Into<String>) -> Self {
        Self::new(EXIT_BAD_INPUT, message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BelowFloor { .. } => EXIT_VALIDATION,
            Error::Convergence { .. } | Error::EigenConvergence(_) => EXIT_CONVERGENCE,
            Error::Domain(_)
            | Error::InvalidModel(_)
            | Error::NonFinite(_)
            | Error::DistortionOutOfRange { .. }
            | Error::Parse(_) => EXIT_BAD_INPUT,
        };
        CliError::new(code, e.to_string())
    }
}
