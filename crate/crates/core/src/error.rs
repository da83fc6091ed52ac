use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("branch self-check failed on ray {k}: {detail}")]
    BranchError { k: i32, detail: String },

    #[error("integration step collapsed to {step:e} at |lambda| = {radius}")]
    StepUnderflow { step: f64, radius: f64 },

    #[error("integration tolerance not met: estimated error {estimate:e} > {tolerance:e}")]
    ToleranceNotMet { estimate: f64, tolerance: f64 },

    #[error("Stokes relation violated: residual {residual:e}")]
    RelationViolation { residual: f64 },

    #[error("asymptotic values w_{k} and w_{next} coincide")]
    AdjacencyViolation { k: i32, next: i32 },

    #[error("kernel pole too close: {0}")]
    PoleProximity(String),

    #[error("assumption violated: |1 + exp(-eps_{k})| = {modulus:e} at sigma = {sigma}")]
    AssumptionViolated { k: i32, sigma: f64, modulus: f64 },

    #[error("no convergence after {iterations} iterations (last step {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("division by a vanishing Y-value: {0}")]
    ZeroDivision(String),

    #[error("no root in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
