use thiserror::Error;

/// Errors raised by the geometric, Lie-theoretic and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("homogeneous coordinates must not all vanish")]
    ZeroVector,
    #[error("expected {expected} homogeneous coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside chart Z_{0}")]
    ChartUndefined(usize),
    #[error("chart index {index} out of range for P^{k}")]
    ChartIndex { index: usize, k: usize },
    #[error("compact set must contain at least one ball")]
    EmptySet,
    #[error("ball radius must be finite and nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("matrix is not traceless (|trace| = {0:e})")]
    NotTraceless(f64),
    #[error("matrix is numerically singular (|det| = {0:e})")]
    Singular(f64),
    #[error("(1,1)-entry vanishes, phi-normalization undefined")]
    NormalizationUndefined,
    #[error("image of the point under the matrix is numerically zero")]
    DegenerateImage,
    #[error("matrix is outside the logarithm chart (||A - Id||_s = {0})")]
    OutOfChart(f64),
    #[error("shear offset |h_{index}| = {value} exceeds the validity radius {epsilon}")]
    ShearTooLarge { index: usize, value: f64, epsilon: f64 },
    #[error("theta = 0 has no density (Dirac measure)")]
    ThetaZero,
    #[error("theta = {0} outside (0, 1]")]
    ThetaOutOfRange(f64),
    #[error("finite-difference step {0:e} outside [1e-5, 1e-2]")]
    StepOutOfRange(f64),
    #[error("finite-difference step {0:e} is below roundoff at this point")]
    StepTooSmall(f64),
    #[error("derivative order must be 1 or 2, got {0}")]
    BadOrder(u32),
    #[error("delta = {delta} outside the admissible range ({lo}, {hi})")]
    DeltaOutOfRange { delta: f64, lo: f64, hi: f64 },
    #[error("regression needs at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("regression rows must be strictly positive")]
    NonPositiveRow,
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
