use thiserror::Error;

/// Errors produced by the library. Guard-style failures carry the name of
/// the violated guard so front ends can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid quantum number: {0}")]
    InvalidQuantumNumber(String),

    #[error("state not normalized: |sum(p) - 1| = {deviation:.3e} exceeds 1e-10")]
    NotNormalized { deviation: f64 },

    #[error("negative population p[{level}] = {value:.3e} below the -1e-12 excursion floor")]
    NegativePopulation { level: usize, value: f64 },

    #[error("guard '{guard}' violated: {detail}")]
    RegimeViolation { guard: &'static str, detail: String },

    #[error("quadrature under-resolved: {0}")]
    UnderResolvedQuadrature(String),

    #[error("step size fell below the stiffness floor at t = {t:.6e}")]
    StepSizeFloor { t: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Short machine-readable code for each error class, used by the CLI's
/// one-line error reports.
impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidQuantumNumber(_) => "invalid_quantum_number",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NegativePopulation { .. } => "negative_population",
            Error::RegimeViolation { guard, .. } => guard,
            Error::UnderResolvedQuadrature(_) => "under_resolved_quadrature",
            Error::StepSizeFloor { .. } => "step_size_floor",
            Error::TooManySteps(_) => "too_many_steps",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
