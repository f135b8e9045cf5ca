use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("pole of phi_{n} at grid point x = {x}")]
    PoleOnGrid { n: usize, x: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weight vanishes at x = {x}")]
    ZeroWeight { x: usize },
    #[error("singular linear system")]
    SingularSystem,
    #[error("rank deficient system: rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("degenerate denominator in mu coefficients at n = {n}")]
    DegenerateDenominator { n: usize },
    #[error("floating point error estimate {estimate:e} exceeds deviation {deviation:e} at h = {h}")]
    PrecisionLoss { h: f64, estimate: f64, deviation: f64 },
    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
    #[error("closed form disagrees with direct evaluation: {0}")]
    ClosedFormMismatch(String),
}
