use std::path::PathBuf;

/// Errors raised by the algebra, calculus, solver and diagnostics layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed permutation: expected {expected} axis labels, got {got}")]
    MalformedPermutation { expected: usize, got: usize },

    #[error("invalid axis label {0} (must be 0..=10)")]
    InvalidAxis(usize),

    #[error("degree overflow: {left} + {right} exceeds 11")]
    DegreeOverflow { left: usize, right: usize },

    #[error("degree underflow: operation needs degree >= {needed}, got {got}")]
    DegreeUnderflow { needed: usize, got: usize },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("covector is not null: k0^2 - |k|^2 = {0:e}")]
    NotNull(f64),

    #[error("time-derivative depth {requested} exceeds recursion limit {limit}")]
    RecursionLimit { requested: usize, limit: usize },

    #[error("compatibility refinement did not converge; residual history {history:?}")]
    Refinement { history: Vec<f64> },

    #[error("integration produced non-finite state at t = {time}; last good time {last_good}")]
    Diverged { time: f64, last_good: f64 },

    #[error("fit window [{lo}, {hi}] holds {got} samples, at least 8 required")]
    FitWindow { lo: f64, hi: f64, got: usize },

    #[error("fit input contains non-positive value {value} at t = {t}")]
    FitDomain { t: f64, value: f64 },

    #[error("snapshot: bad magic bytes")]
    SnapshotMagic,

    #[error("snapshot: unsupported format version {0}")]
    SnapshotVersion(u32),

    #[error("snapshot: truncated payload (expected {expected} bytes, found {found})")]
    SnapshotTruncated { expected: u64, found: u64 },

    #[error("csv: {0}")]
    Csv(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
