use thiserror::Error;

/// Errors produced by state construction and uncertainty-relation evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized: total mass {0}")]
    NotNormalized(f64),

    #[error("covariance matrix is not symmetric (max asymmetry {0:.3e})")]
    AsymmetricCovariance(f64),

    #[error("mode index {0} out of range for {1}-mode system")]
    BadModeIndex(usize, usize),

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("periodic outcome labels carry no metric; operation needs standard coarse graining")]
    PeriodicLabels,

    #[error("histogram function width {hf} does not match coarse-graining width {cg}")]
    WidthMismatch { hf: f64, cg: f64 },

    #[error("Rényi order must be positive, got {0}")]
    InvalidOrder(f64),

    #[error("conjugate pair requires 1/2 <= alpha <= 1, got {0}")]
    InvalidConjugateAlpha(f64),

    #[error("pair is not declared canonically conjugate: {0}")]
    NotCco(String),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("root bracketing failed for {func}: target {target} outside explored range")]
    BracketFailure { func: &'static str, target: f64 },

    #[error("coarse-grained coverage {0} too low for a faithful measurement")]
    UnfaithfulCoverage(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
