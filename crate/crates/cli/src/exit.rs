use std::fmt;

use demolab::LabError;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(context: &str, err: impl fmt::Display) -> Self {
        Self { code: EXIT_FAILURE, message: format!("{context}: {err}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<LabError> for CliError {
    fn from(err: LabError) -> Self {
        let code = match &err {
            LabError::EnumerationTooLarge { .. } => EXIT_BUDGET,
            LabError::Numeric(_)
            | LabError::SingularSelection { .. }
            | LabError::NotAProjector { .. }
            | LabError::DegenerateSelection { .. } => EXIT_NUMERIC,
            LabError::Io(_) | LabError::Csv(_) | LabError::Json(_) => EXIT_FAILURE,
            LabError::InvalidDimension(_)
            | LabError::EmptySelection
            | LabError::IndexOutOfRange { .. }
            | LabError::UniverseMismatch { .. }
            | LabError::Precondition(_)
            | LabError::Format(_) => EXIT_USAGE,
        };
        Self { code, message: err.to_string() }
    }
}
