use alloc::string::String;
use core::fmt;

use crate::quad::{IntegralResult, QuadError};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the physics layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its admissible range.
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A structured input (atom model, table, ...) is malformed.
    InvalidModel(String),
    /// Unit tag not recognised by [`crate::constants::AccelerationUnit`].
    UnknownUnit(String),
    /// Hard failure inside the quadrature engine.
    Quad(QuadError),
    /// A quadrature ran out of its evaluation budget.
    NotConverged {
        what: &'static str,
        result: IntegralResult,
    },
    /// The requested integral does not exist for these inputs.
    Divergent(&'static str),
    /// The boundary kernel broke its contract at `omega`.
    KernelContract {
        omega: f64,
        value: f64,
        reason: &'static str,
    },
    /// Root search bracket does not enclose a sign change of the log-ratio.
    NoSignChange {
        lo: f64,
        log_ratio_lo: f64,
        hi: f64,
        log_ratio_hi: f64,
    },
    /// The requested zone asymptote does not exist for this model combination.
    InvalidZone(&'static str),
    /// A term evaluated to zero so its power-law exponent is undefined.
    UndefinedExponent,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument {
                name,
                value,
                reason,
            } => write!(f, "invalid {name} = {value:e}: {reason}"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::UnknownUnit(tag) => write!(f, "unknown acceleration unit `{tag}`"),
            Error::Quad(err) => write!(f, "quadrature failed: {err}"),
            Error::NotConverged { what, result } => write!(
                f,
                "{what}: quadrature did not converge after {} evaluations (value {:e}, error estimate {:e})",
                result.evaluations, result.value, result.abs_error_estimate
            ),
            Error::Divergent(msg) => write!(f, "divergent integral: {msg}"),
            Error::KernelContract {
                omega,
                value,
                reason,
            } => write!(
                f,
                "wall kernel contract violated at omega = {omega:e} rad/s (K = {value:e}): {reason}"
            ),
            Error::NoSignChange {
                lo,
                log_ratio_lo,
                hi,
                log_ratio_hi,
            } => write!(
                f,
                "bracket [{lo:e}, {hi:e}] cm/s^2 does not enclose a crossing: ln ratio = {log_ratio_lo:.6} at the lower end, {log_ratio_hi:.6} at the upper end"
            ),
            Error::InvalidZone(msg) => write!(f, "zone asymptote unavailable: {msg}"),
            Error::UndefinedExponent => {
                f.write_str("term evaluates to zero, power-law exponent undefined")
            }
        }
    }
}

impl core::error::Error for Error {}

impl From<QuadError> for Error {
    fn from(err: QuadError) -> Self {
        Error::Quad(err)
    }
}

/// Rejects non-finite or out-of-range scalars.
pub(crate) fn require(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<f64> {
    if value.is_finite() && ok {
        Ok(value)
    } else {
        Err(Error::InvalidArgument {
            name,
            value,
            reason,
        })
    }
}

/// Turns an unconverged integral into an error.
pub(crate) fn converged(what: &'static str, result: IntegralResult) -> Result<f64> {
    if result.converged {
        Ok(result.value)
    } else {
        Err(Error::NotConverged { what, result })
    }
}
