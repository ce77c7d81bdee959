use std::fmt;
use std::io;
use std::process::ExitCode;

/// Why a command stopped. Maps onto the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Invalid or inconsistent configuration, or an unusable output path.
    Config(String),
    /// A required setting was given neither as a flag nor in the run file.
    Missing { command: &'static str, key: String },
    /// A solver gave up or a verification check failed.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) | Self::Missing { .. } => ExitCode::from(2),
            Self::Numerical(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) | Self::Numerical(msg) => f.write_str(msg),
            Self::Missing { key, .. } => write!(f, "missing required setting --{key}"),
        }
    }
}

impl From<spinstar::Error> for Failure {
    fn from(e: spinstar::Error) -> Self {
        use spinstar::Error as E;
        match e {
            E::NoConvergence { .. } | E::KrylovStepFailed { .. } | E::Identification(_) => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Config(format!("i/o error: {e}"))
    }
}
