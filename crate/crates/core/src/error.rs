use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: entries ({row}, {col}) and ({col}, {row}) differ")]
    Asymmetric { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "matrix must be square with dimension matching {expected} index roles, got {rows}x{cols}"
    )]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("expected a {expected}-site Hamiltonian, got dimension {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("a sink is already attached")]
    SinkAlreadyAttached,

    #[error("Hamiltonian has no sink sites")]
    NoSink,

    #[error("coupling {value_cm:.6} cm^-1 between sites {site_a} and {site_b} exceeds calibration amplitude {max_cm} cm^-1")]
    CouplingOutOfRange {
        site_a: usize,
        site_b: usize,
        value_cm: f64,
        max_cm: f64,
    },

    #[error("subset carries zero total probability at z = {z_mm} mm")]
    ZeroSubsetProbability { z_mm: f64 },

    #[error("transport efficiency at the final distance is zero")]
    ZeroEfficiency,

    #[error("series has zero variance")]
    ConstantSeries,

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("mask `{0}` extends beyond the image")]
    MaskOutOfBounds(&'static str),

    #[error("masks overlap at pixel (row {row}, col {col})")]
    OverlappingMasks { row: usize, col: usize },

    #[error("total masked intensity is not positive")]
    ZeroIntensity,

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by reading or writing files, as opposed to
    /// rejected inputs or failed numerical preconditions.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
