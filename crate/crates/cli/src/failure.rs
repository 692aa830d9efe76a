//! Command failures, split by who has to act on them. The split drives
//! the exit code: 2 means fix the invocation, 3 means fix the inputs,
//! 4 means the tool itself misbehaved.

use std::fmt;
use std::path::Path;

use prefault_core::CoreError;

#[derive(Debug)]
pub enum Failure {
    /// The command line itself is wrong.
    Usage(String),
    /// An input file is missing, malformed, or inconsistent.
    Data(String),
    /// A bug or an environment fault inside the tool.
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    /// Data failure tagged with the file it came from.
    pub fn at(path: &Path, err: impl fmt::Display) -> Failure {
        Failure::Data(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Failure {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Failure>;
