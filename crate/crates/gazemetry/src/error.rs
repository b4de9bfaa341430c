//! CLI error type and the process exit codes it maps to.

use std::fmt;
use std::path::PathBuf;

/// Stable exit codes, one per failure class. Documented in the README.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const MISSING_INPUT: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const EMPTY_SESSION: i32 = 5;
    pub const OUTPUT: i32 = 6;
    pub const SYNTH_SPEC: i32 = 7;
    pub const CONFIG: i32 = 8;
}

#[derive(Debug)]
pub enum CliError {
    MissingInput(PathBuf),
    /// Malformed session data; `row` is the 1-based data row when known.
    Parse {
        path: PathBuf,
        row: Option<usize>,
        message: String,
    },
    /// No level in the session produced any valid gaze samples.
    EmptySession(PathBuf),
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    SynthSpec(String),
    Config(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::MissingInput(p) => write!(f, "input not found: {}", p.display()),
            CliError::Parse { path, row, message } => match row {
                Some(row) => write!(f, "{}: row {row}: {message}", path.display()),
                None => write!(f, "{}: {message}", path.display()),
            },
            CliError::EmptySession(p) => {
                write!(f, "{}: no usable gaze samples in any level", p.display())
            }
            CliError::Output { path, source } => {
                write!(f, "cannot write {}: {source}", path.display())
            }
            CliError::SynthSpec(msg) => write!(f, "synth spec: {msg}"),
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => exit_code::MISSING_INPUT,
            CliError::Parse { .. } => exit_code::PARSE,
            CliError::EmptySession(_) => exit_code::EMPTY_SESSION,
            CliError::Output { .. } => exit_code::OUTPUT,
            CliError::SynthSpec(_) => exit_code::SYNTH_SPEC,
            CliError::Config(_) => exit_code::CONFIG,
            CliError::Internal(_) => exit_code::INTERNAL,
        }
    }
}
