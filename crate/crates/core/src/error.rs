use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: expected {expected}, got {got}")]
    ModeMismatch { expected: usize, got: usize },
    #[error("sector {l} out of range for {m} modes")]
    SectorOutOfRange { l: usize, m: usize },
    #[error("mode index {i} out of range for {m} modes")]
    ModeOutOfRange { i: usize, m: usize },
    #[error("mode count {m} exceeds cap {cap}")]
    CapExceeded { m: usize, cap: usize },
    #[error("sector {l} is empty")]
    EmptySector { l: usize },
    #[error("rejection sampler exhausted {tries} tries in sector {l}")]
    SamplerExhausted { l: usize, tries: usize },
    #[error("operator is not homogeneous in fermion number")]
    Inhomogeneous,
    #[error("matrix is not Hermitian (symmetry residual {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("matrix is not positive semi-definite (eigenvalue {value:e})")]
    NotPsd { value: f64 },
    #[error("matrix dimension {dim} exceeds dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigensolver failed to converge")]
    EigenFailure,
    #[error("exact rank unavailable: {0}")]
    ExactUnavailable(String),
    #[error("coboundary is not nilpotent (residual {residual:e})")]
    NotNilpotent { residual: f64 },
    #[error("operator input is not a projector (residual {residual:e})")]
    NotProjector { residual: f64 },
    #[error("phase readout grid {spacing:e} too coarse for delta {delta:e}")]
    GridTooCoarse { spacing: f64, delta: f64 },
    #[error("sector density {density:e} below configured floor {floor:e}")]
    DensityFloor { density: f64, floor: f64 },
    #[error("ansatz group is not mutually commuting")]
    NonCommutingGroup,
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code classification for the CLI: promise/precondition failures
    /// exit with 2, everything else with 1.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::DensityFloor { .. }
                | Error::GridTooCoarse { .. }
                | Error::EmptySector { .. }
                | Error::SamplerExhausted { .. }
        )
    }
}
