//! Exit-code classification: 0 success, 1 failed check, 2 invalid or unsupported
//! parameters, 3 blowup.

use std::fmt;

use fnls_core::LabError;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Lab(LabError),
    Io(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 1,
            CliError::Lab(e) => match e {
                LabError::InvalidParameter(_)
                | LabError::UnsupportedRegime(_)
                | LabError::UnsupportedDimension { .. }
                | LabError::ResonantQuad(_)
                | LabError::UndefinedRatio => 2,
                LabError::BlowupDetected { .. } => 3,
                LabError::DegenerateEstimator(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Lab(e) => write!(f, "{e}"),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Lab(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}
