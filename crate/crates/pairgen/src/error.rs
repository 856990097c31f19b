use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma function pole at non-positive integer z = {0}")]
    GammaPole(String),

    #[error("magnitude overflow in {0}; use the log-space variant")]
    Overflow(&'static str),

    #[error("series failed to converge within {terms} terms (last |term|/|sum| = {ratio:.3e})")]
    NonConvergence { terms: usize, ratio: f64 },

    #[error("degenerate hypergeometric parameters: c - a - b = {0} is within 1e-9 of an integer")]
    DegenerateParameters(String),

    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error("sub-threshold field: (e0 tau^2)^2 > 1/4 required, got e0 = {e0}, tau = {tau}")]
    SubThreshold { e0: f64, tau: f64 },

    #[error("squared adiabatic frequency went negative at t = {t}: {value}")]
    ImaginaryFrequency { t: f64, value: f64 },

    #[error("integrator step-size underflow (stiffness) at t = {t}: {detail}")]
    StepUnderflow { t: f64, detail: String },

    #[error("Bogoliubov constraint violated: | |alpha|^2 - |beta|^2 - 1 | = {0:.3e}")]
    ConstraintViolation(f64),

    #[error("no residual plateau: tail stdev {stdev:.3e} exceeds 10% of tail mean {mean:.3e}")]
    NoPlateau { stdev: f64, mean: f64 },

    #[error("detection failed: {0}")]
    DetectionFailure(String),

    #[error("least-squares fit ill-conditioned: {0}")]
    IllConditionedFit(String),

    #[error("all-zero spectrum cannot be normalized")]
    AllZeroSpectrum,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
