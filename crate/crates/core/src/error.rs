use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite: pivot {index} is {value:e}")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    ConvergenceFailure { sweeps: usize, off_diagonal: f64 },
    #[error("degenerate effective channel: ‖HV‖_F = {norm:e}")]
    DegenerateChannel { norm: f64 },
    #[error("cannot build a CDF from zero samples")]
    EmptySamples,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable category prefix for command-line error lines.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse-error",
            Error::InvalidConfig(_) => "config-error",
            Error::Io { .. } => "io-error",
            _ => "runtime-error",
        }
    }

    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InvalidConfig(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
