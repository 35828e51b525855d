use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    /// Quadrature grid too coarse for the kernel's quadratic phase.
    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("zero field: {0}")]
    ZeroField(String),

    #[error("momentum window truncates the amplitude: edge weight {edge_ratio:.3e} of peak")]
    Truncation { edge_ratio: f64 },

    #[error("degenerate state: amplitude vanishes over the integration window")]
    DegenerateState,

    #[error("field of view exceeds the paraxial bound: {0}")]
    FieldOfView(String),

    #[error("no fringe center: {0}")]
    NoCenter(String),

    #[error("insufficient fringes: found {found} extrema, need at least 3")]
    InsufficientFringes { found: usize },

    #[error("ambiguous extrema: {0}")]
    AmbiguousExtrema(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("regression error: {0}")]
    Regression(String),

    #[error("unphysical slope {slope:.6e}: a must grow with d")]
    UnphysicalSlope { slope: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: parse error at {location}: {message}", path.display())]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },

    #[error("config error: {key}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
