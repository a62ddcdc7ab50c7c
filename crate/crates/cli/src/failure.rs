//! Process exit codes and the errors that map onto them.

use std::fmt;
use std::path::Path;

use holorigid_core::Error;

pub const OK: i32 = 0;
pub const NEGATIVE: i32 = 1;
pub const INPUT: i32 = 2;
pub const UNCERTIFIED: i32 = 3;
pub const DEGENERATE: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unverified | Error::NotExpanding { .. } => UNCERTIFIED,
            Error::Degenerate { .. } => DEGENERATE,
            _ => INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(e.to_string())
    }
}
