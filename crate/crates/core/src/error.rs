use thiserror::Error;

use crate::interval::Interval;

/// Which end of the sample a scale parameter is pushing towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Min,
    Max,
}

impl std::fmt::Display for Extreme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extreme::Min => f.write_str("min"),
            Extreme::Max => f.write_str("max"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{x} lies outside the domain {domain}")]
    Domain { x: f64, domain: Interval },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("{y} lies outside the range {range}")]
    Range { y: f64, range: Interval },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("overflow while accumulating generator values: {0}")]
    Overflow(String),

    #[error("no convergence after {iterations} iterations: {context}")]
    Convergence { iterations: usize, context: String },

    #[error("no real monotone {k}-th root of a neutral map with a = {a}")]
    NoRoot { a: f64, k: u32 },

    #[error(
        "a = -1 gives an involution (eta o eta = id); such maps are excluded from scale construction"
    )]
    ExcludedInvolution,

    #[error("target {target} is not inside the open interval ({lo}, {hi})")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("target is too close to the sample {extreme}; |beta| would exceed {beta_cap}")]
    NearExtreme { extreme: Extreme, beta_cap: f64 },

    #[error("no witness found: {0}")]
    WitnessNotFound(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::NoRoot { .. } | Error::ExcludedInvolution => 2,
            Error::Domain { .. }
            | Error::DegenerateDomain(_)
            | Error::Range { .. }
            | Error::Overflow(_)
            | Error::TargetOutOfRange { .. } => 3,
            Error::Convergence { .. } | Error::NearExtreme { .. } => 4,
            Error::WitnessNotFound(_) => 5,
        }
    }

    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::DegenerateDomain(_) => "DomainError",
            Error::Range { .. } => "RangeError",
            Error::Input(_) => "InputError",
            Error::Overflow(_) => "OverflowError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::NoRoot { .. } => "NoRootError",
            Error::ExcludedInvolution => "ExcludedInvolutionError",
            Error::TargetOutOfRange { .. } => "TargetOutOfRangeError",
            Error::NearExtreme { .. } => "NearExtremeError",
            Error::WitnessNotFound(_) => "WitnessNotFoundError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
