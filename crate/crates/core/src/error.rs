use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why the closed-form optimum has no real solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoRealOptimum {
    /// The detuning radicand is negative (g < κ/√2).
    NegativeRadicand { radicand: f64 },
    /// 2g² − κ² vanishes, so the Kerr optimum is undefined (g = κ/√2).
    VanishingDenominator,
}

impl std::fmt::Display for NoRealOptimum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoRealOptimum::NegativeRadicand { radicand } => {
                write!(f, "detuning radicand {radicand:e} is negative")
            }
            NoRealOptimum::VanishingDenominator => {
                write!(f, "Kerr denominator 2g² − κ² vanishes at g = κ/√2")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("no unique steady state: {0}")]
    NoUniqueSteadyState(String),

    #[error("correlation undefined: mean photon number {0:e} is not positive")]
    UndefinedCorrelation(f64),

    #[error("integration failed after t = {last_good_time}: {reason}")]
    Integration { last_good_time: f64, reason: String },

    #[error("no real optimum: {0}")]
    NoRealSolution(NoRealOptimum),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::InvalidDimension(msg.into())
    }
}
