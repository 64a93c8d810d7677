use std::fmt;
use std::path::Path;

use hgl_core::{ErrorClass, HglError};

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            msg: msg.into(),
        }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERIC,
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            msg: format!("{}: {e}", path.display()),
        }
    }
}

pub fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Numeric => EXIT_NUMERIC,
        ErrorClass::Io => EXIT_IO,
    }
}

impl From<HglError> for CliError {
    fn from(e: HglError) -> Self {
        CliError {
            code: exit_code(e.class()),
            msg: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

pub type CliResult<T> = Result<T, CliError>;
