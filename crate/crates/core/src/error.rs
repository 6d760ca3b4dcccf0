use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the accountant.
///
/// Variants fall into three groups that callers (notably the CLI) map onto
/// distinct exit statuses: invalid input, numerically unrepresentable
/// results, and searches with no feasible grid point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error("absolute continuity violated at index {index}: p = {p} but q = 0")]
    AbsoluteContinuityViolation { index: usize, p: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("quadrature did not converge: {0}")]
    QuadratureDivergence(String),

    #[error("result not representable: exponent {exponent} exceeds {limit}")]
    Overflow { exponent: f64, limit: f64 },

    #[error("group of 2^{k} entries needs alpha > {bound}, got {alpha}")]
    GroupTooLarge { alpha: f64, k: u32, bound: f64 },

    #[error("ledger step has alpha {got}, ledger is fixed at alpha {expected}")]
    MixedAlpha { expected: f64, got: f64 },

    #[error("ledger has no steps")]
    EmptyLedger,

    #[error("ledger replay mismatch: stored cumulative {stored}, replayed {replayed}")]
    LedgerMismatch { stored: f64, replayed: f64 },

    #[error("no alpha in the search grid yields a finite privacy cost")]
    NoFeasibleAlpha,

    #[error("no (alpha, sigma) grid point meets the epsilon bound {bound}")]
    NoFeasibleSigma { bound: f64 },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    /// Coarse classification used for exit codes and machine-readable reports.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Overflow { .. } | Error::QuadratureDivergence(_) => ErrorKind::Numeric,
            Error::NoFeasibleAlpha | Error::NoFeasibleSigma { .. } => ErrorKind::Infeasible,
            _ => ErrorKind::Validation,
        }
    }

    /// Name of the offending input, when the error is tied to one.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::Domain { field, .. } => Some(field),
            Error::GroupTooLarge { .. } => Some("k"),
            Error::MixedAlpha { .. } => Some("alpha"),
            Error::EmptyLedger => Some("steps"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numeric,
    Infeasible,
}

/// Largest exponent accepted before a closed form is declared unrepresentable.
pub const EXP_LIMIT: f64 = 700.0;

pub(crate) fn check_exponent(exponent: f64) -> Result<()> {
    if exponent > EXP_LIMIT || !exponent.is_finite() {
        Err(Error::Overflow {
            exponent,
            limit: EXP_LIMIT,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 1.0 + 1e-12 {
        return Err(Error::domain("alpha", format!("must be > 1, got {alpha}")));
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta", format!("must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

pub(crate) fn check_nonneg(field: &'static str, value: f64) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::domain(field, format!("must be finite and >= 0, got {value}")));
    }
    Ok(())
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::domain(field, format!("must be finite and > 0, got {value}")));
    }
    Ok(())
}
