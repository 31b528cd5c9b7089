use thiserror::Error;

/// Failure while evaluating an objective or one of its derivatives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{op}: operand {value} outside domain")]
    Domain { op: &'static str, value: f64 },
    #[error("objective produced a non-finite value ({0})")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("observation {index}: {source}")]
    Observation {
        index: usize,
        #[source]
        source: Box<EvalError>,
    },
}

impl EvalError {
    pub fn at_observation(self, index: usize) -> Self {
        EvalError::Observation {
            index,
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("singular matrix (smallest pivot {pivot:e}){hint}")]
    Singular { pivot: f64, hint: String },
    #[error("non-positive variance {value:e} at coordinate {index}")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("optimizer failed: {0}")]
    Optimizer(String),
    #[error("all {attempts} runs failed; last error: {last}")]
    AllFailed { attempts: usize, last: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: String, column: String },
    #[error("{path}: row {row}, column `{column}`: {problem}")]
    BadCell {
        path: String,
        row: u64,
        column: String,
        problem: String,
    },
    #[error("{0}: no data rows")]
    EmptyFile(String),
    #[error("{path}: choice column has {found} distinct label(s), need at least 2")]
    TooFewAlternatives { path: String, found: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("report: {0}")]
    Report(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure category, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Usage,
    Data,
    Numerical,
    Io,
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Argument(_) | Error::Config(_) => Category::Usage,
            Error::MissingColumn { .. }
            | Error::BadCell { .. }
            | Error::EmptyFile(_)
            | Error::TooFewAlternatives { .. }
            | Error::Csv(_) => Category::Data,
            Error::Eval(_)
            | Error::Singular { .. }
            | Error::NonPositiveVariance { .. }
            | Error::Optimizer(_)
            | Error::AllFailed { .. } => Category::Numerical,
            Error::Report(_) | Error::Io(_) => Category::Io,
        }
    }
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Usage => 2,
            Category::Data => 3,
            Category::Numerical => 4,
            Category::Io => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
