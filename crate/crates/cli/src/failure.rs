use std::fmt;
use std::path::Path;

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: the input is invalid.
    Config(String),
    /// Exit 3: the numerics failed.
    Numerical(String),
    /// Exit 4: reading or writing a file failed.
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }

    pub fn field(field: &str, reason: impl fmt::Display) -> Self {
        Failure::Config(format!("invalid config field `{field}`: {reason}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<rydcoh_core::Error> for Failure {
    fn from(e: rydcoh_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;
