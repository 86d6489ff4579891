//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library operations.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran at.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its documented invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation argument violates its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Newton iteration on a periodic-orbit condition failed to meet the
    /// residual target.
    #[error("newton did not converge after {steps} steps (residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },

    /// The cycle found from the given seed collapses onto a lower period.
    #[error("cycle at c = ({c_re}, {c_im}) degenerates to a lower period")]
    DegenerateCycle { c_re: f64, c_im: f64 },

    /// Winding-number accumulation saw an argument jump too large to trust.
    #[error(
        "inconclusive winding number: argument jump {jump:.3} rad exceeds pi/2 (grid too coarse)"
    )]
    InconclusiveWinding { jump: f64 },

    /// Fewer than three local maxima survive the transient cut.
    #[error("too few peaks for a period estimate: found {found}, need 3")]
    TooFewPeaks { found: usize },

    /// `omega = 0` has no finite oscillation period.
    #[error("zero frequency has no finite period")]
    ZeroFrequency,

    /// The Hopf point lies on the imaginary axis; the ray slope is undefined.
    #[error("ray slope undefined: hopf point real part vanishes")]
    DivisionByZeroRay,
}
