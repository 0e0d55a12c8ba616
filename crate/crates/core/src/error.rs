use core::fmt;

use crate::detector::Outcome;
use crate::linalg::AtomLevel;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {dim}: must be at least {min}")]
    InvalidDimension { dim: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density operator: {0}")]
    NotDensity(DensityViolation),

    #[error("detector constraint violated: {0}")]
    Constraint(ConstraintViolation),

    #[error("omega_tau must be finite and non-negative, got {0}")]
    InvalidOmegaTau(f64),

    #[error("theta = {0} lies outside [0, pi]")]
    ThetaOutOfRange(f64),

    #[error("outcome {outcome} is impossible (probability {probability:e})")]
    ImpossibleOutcome { outcome: Outcome, probability: f64 },

    #[error("degenerate detector: closed-form posterior normalization is {0:e}")]
    DegenerateDetector(f64),

    #[error("invalid hypothesis grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid outcome index {0}, expected 0, 1 or 2")]
    InvalidOutcome(u32),

    #[error("{0} must be non-empty")]
    Empty(&'static str),
}

/// Which density-operator invariant failed, with the measured residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityViolation {
    NotHermitian { residual: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { floor: f64 },
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHermitian { residual } => {
                write!(f, "max |rho - rho^dagger| = {residual:e} exceeds 1e-12")
            }
            Self::TraceNotOne { trace } => write!(f, "trace {trace} differs from 1"),
            Self::NotPositive { floor } => {
                write!(f, "an eigenvalue lies below -{floor:e}")
            }
        }
    }
}

/// The detector constraints enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// `0 <= eps_g <= 1`
    GroundEfficiency,
    /// `0 <= eps_e <= 1`
    ExcitedEfficiency,
    /// `p_1g + p_2g = eps_g` with both click probabilities non-negative.
    GroundClickSplit,
    /// `p_1e + p_2e = eps_e` with both click probabilities non-negative.
    ExcitedClickSplit,
    /// Flip fraction of the given outcome and entry level lies in `[0, 1]`.
    FlipFraction(Outcome, AtomLevel),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroundEfficiency => f.write_str("ground-state efficiency eps_g in [0, 1]"),
            Self::ExcitedEfficiency => f.write_str("excited-state efficiency eps_e in [0, 1]"),
            Self::GroundClickSplit => {
                f.write_str("ground click split p1g + p2g = eps_g with 0 <= p1g <= eps_g")
            }
            Self::ExcitedClickSplit => {
                f.write_str("excited click split p1e + p2e = eps_e with 0 <= p1e <= eps_e")
            }
            Self::FlipFraction(xi, level) => {
                write!(f, "flip fraction f[{xi}][{level}] in [0, 1]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintViolation {
    pub constraint: Constraint,
    pub value: f64,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (offending value {})", self.constraint, self.value)
    }
}
