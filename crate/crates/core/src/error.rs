use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("B not full column rank: actuators u{first} and u{second} both target state x{state}", first = .first + 1, second = .second + 1, state = .state + 1)]
    DuplicateActuatorTarget {
        first: usize,
        second: usize,
        state: usize,
    },

    #[error("structural consistency violation: {0}")]
    Invariant(String),

    #[error("{kind} index {index} out of range (count {count})")]
    OutOfRange {
        kind: &'static str,
        index: usize,
        count: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zI - A is singular at the sampled point")]
    SingularPencil,

    #[error("instance too large for exhaustive search: size {size} exceeds {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("attacked set does not separate u{} from the sink", .actuator + 1)]
    NotSeparator { actuator: usize },

    #[error("invalid attack path: {0}")]
    InvalidPath(String),

    #[error("model has no numeric realization")]
    MissingRealization,
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 1,
            Error::Parse(_) | Error::Schema(_) => 2,
            Error::Infeasible(_) => 4,
            _ => 3,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_data() {
            Error::Schema(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}
