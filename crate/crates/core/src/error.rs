use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigenvalue {eigenvalue:.6e} lies outside the function domain")]
    Domain { eigenvalue: f64 },

    #[error("jump operator {index} has no adjoint partner in the list")]
    AdjointClosure { index: usize },

    #[error("matrix is not conditionally negative definite (max form value {max_value:.3e})")]
    NotConditionallyNegative { max_value: f64 },

    #[error("Gram matrix has negative eigenvalue {eigenvalue:.3e}")]
    NegativeGram { eigenvalue: f64 },

    #[error("invalid Schur symbol: {0}")]
    InvalidSymbol(String),

    #[error("cyclic group order {0} is odd; embed Z_n into Z_2n")]
    OddOrder(usize),

    #[error("size guard: {what} = {value} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is singular or nearly so (min eigenvalue {min_eig:.3e}); regularize it first")]
    SingularState { min_eig: f64 },

    #[error("generator is not ergodic (kernel dimension {kernel_dim})")]
    NonErgodic { kernel_dim: usize },

    #[error("finite-difference step underflow (h = {h:.3e})")]
    StepUnderflow { h: f64 },

    #[error("grid too coarse: h^2 |L|^3 = {risk:.3e}")]
    GridTooCoarse { risk: f64 },

    #[error("verification of constructed generator failed: {0}")]
    Verification(String),

    #[error("semigroup descriptor: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
