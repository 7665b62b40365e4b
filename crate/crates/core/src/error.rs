use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// Variants are grouped by the CLI exit code they map to: input problems
/// (malformed files, unknown labels, violated preconditions) exit with 2,
/// modelling assumptions (treatment not an ancestor of the outcome,
/// positivity) exit with 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph contains a cycle through {0}")]
    Cycle(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("CPT row for {vertex} at parent state {row:?} sums to {sum}")]
    Normalization {
        vertex: String,
        row: Vec<usize>,
        sum: f64,
    },

    #[error("invalid CPT for {vertex}: {msg}")]
    InvalidCpt { vertex: String, msg: String },

    #[error("positivity fails: P({treatment}={level} | {parents:?}={state:?}) = {prob} < {epsilon}")]
    Positivity {
        treatment: String,
        level: usize,
        parents: Vec<String>,
        state: Vec<usize>,
        prob: f64,
        epsilon: f64,
    },

    #[error("conditioning event has probability zero: {0}")]
    ZeroConditioningEvent(String),

    #[error("state space of {0} joint configurations exceeds the enumeration limit")]
    StateSpaceTooLarge(u128),

    #[error("state {state} out of range for {vertex} (cardinality {card})")]
    StateOutOfRange {
        vertex: String,
        state: usize,
        card: usize,
    },

    #[error("empty conditioning cells: {}", .0.join("; "))]
    EmptyCell(Vec<String>),

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AssumptionViolation(_) | Error::Positivity { .. } => 3,
            Error::Replication { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
