//! Discrete quadratic recurrence and its continuous delay extension, with
//! orbit classification.
//!
//! The discrete system iterates `z_{k+1} = z_k^2 + c` from `z_0 = 0`; the
//! continuous system integrates `dz/dtau = -z(tau) + z^2(tau - tau0) + c`
//! from the zero history on `[-tau0, 0]`. In the limit `tau0 -> infinity`
//! the continuous solution tracks the discrete orbit plateau by plateau.

mod classify;
mod config;
mod history;
mod integrate;

pub use classify::classify_trajectory;
pub(crate) use classify::peak_indices;
pub use config::{
    DdeConfig, DEFAULT_CONV_TOL, DEFAULT_DDE_ESCAPE_RADIUS, DEFAULT_STEPS_PER_DELAY,
    DEFAULT_TRANSIENT_FRAC, DEFAULT_WINDOW_DELAYS,
};
pub use history::HistoryBuffer;
pub use integrate::integrate_dde;

use num_complex::Complex;

use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Default escape radius for the discrete map (sufficient: once `|z| > 2`
/// the orbit diverges).
pub const DEFAULT_MAP_ESCAPE_RADIUS: f64 = 2.0;

/// Length of the settling window used by [`iterate_orbit`].
const SETTLE_WINDOW: usize = 16;

/// One application of the quadratic map: `z^2 + c`.
#[inline]
pub fn map_step<T: Scalar>(z: Complex<T>, c: Complex<T>) -> Complex<T> {
    z * z + c
}

/// Parameters of a discrete-mode sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteParams<T: Scalar> {
    pub max_iter: usize,
    pub escape_radius: T,
}

impl<T: Scalar> Default for DiscreteParams<T> {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            escape_radius: lit(DEFAULT_MAP_ESCAPE_RADIUS),
        }
    }
}

/// Classification of one parameter point, with per-class diagnostics.
///
/// `escape_time` is the continuous time of the first crossing in DDE mode
/// and the iteration index in discrete mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitOutcome<T: Scalar> {
    /// The orbit settled onto a stationary value; `residual` is
    /// `|z_final^2 - z_final + c|`, small because a settled value solves the
    /// stationarity equation.
    Converged { z_final: Complex<T>, residual: T },
    /// Bounded, not settled, with a sustained oscillation of the given
    /// amplitude (max `|z|` over the classification window).
    Oscillating { z_final: Complex<T>, amplitude: T },
    /// `|z|` exceeded the escape radius, first at `escape_time`.
    /// `non_finite` flags orbits that left the representable range before
    /// the threshold test could see them.
    Escaped {
        z_final: Complex<T>,
        escape_time: T,
        non_finite: bool,
    },
    /// Bounded but neither settled nor recognizably oscillating within the
    /// window (continuous mode only; a bounded unsettled discrete orbit
    /// counts as oscillating).
    Undecided { z_final: Complex<T> },
}

/// Raster class codes: 0 = Escaped, 1 = Converged, 2 = Oscillating,
/// 3 = Undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Escaped = 0,
    Converged = 1,
    Oscillating = 2,
    Undecided = 3,
}

impl<T: Scalar> OrbitOutcome<T> {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Self::Escaped { .. } => OutcomeKind::Escaped,
            Self::Converged { .. } => OutcomeKind::Converged,
            Self::Oscillating { .. } => OutcomeKind::Oscillating,
            Self::Undecided { .. } => OutcomeKind::Undecided,
        }
    }

    pub fn z_final(&self) -> Complex<T> {
        match *self {
            Self::Converged { z_final, .. }
            | Self::Oscillating { z_final, .. }
            | Self::Escaped { z_final, .. }
            | Self::Undecided { z_final } => z_final,
        }
    }

    /// Class code for rasters and CSV output.
    pub fn class_code(&self) -> u8 {
        self.kind() as u8
    }

    /// Per-class scalar stored in rasters: escape time for escapes, residual
    /// for converged points, amplitude for oscillations, 0 otherwise.
    pub fn class_scalar(&self) -> T {
        match *self {
            Self::Escaped { escape_time, .. } => escape_time,
            Self::Converged { residual, .. } => residual,
            Self::Oscillating { amplitude, .. } => amplitude,
            Self::Undecided { .. } => T::zero(),
        }
    }
}

/// `(tau, z)` samples of one integration, recorded every `sample_stride`
/// steps; an early escape appends the crossing sample and ends the record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub samples: Vec<(T, Complex<T>)>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> Option<&(T, Complex<T>)> {
        self.samples.last()
    }
}

/// Iterates the map from `z_0 = 0` and classifies the orbit.
///
/// Escape is the first `k` with `|z_k|` beyond the radius. A bounded orbit
/// whose last 16 iterates stay within `1e-6` of the current iterate counts
/// as converged (checked every 16 iterations); any other bounded orbit is
/// oscillating, with amplitude `max |z_k|` over the last 16 iterates.
pub fn iterate_orbit<T: Scalar>(
    c: Complex<T>,
    max_iter: usize,
    escape_radius: T,
) -> Result<OrbitOutcome<T>, Error> {
    if max_iter == 0 {
        return Err(Error::InvalidParam("max_iter must be at least 1".into()));
    }
    debug_assert!(
        escape_radius >= lit(2.0),
        "escape radius below the divergence bound"
    );
    let conv_tol = lit::<T>(DEFAULT_CONV_TOL);
    let r2 = escape_radius * escape_radius;
    let zero = Complex::new(T::zero(), T::zero());
    let mut ring = [zero; SETTLE_WINDOW];
    let mut z = zero;
    for k in 1..=max_iter {
        z = map_step(z, c);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Ok(OrbitOutcome::Escaped {
                z_final: z,
                escape_time: lit(k as f64),
                non_finite: true,
            });
        }
        if z.norm_sqr() > r2 {
            return Ok(OrbitOutcome::Escaped {
                z_final: z,
                escape_time: lit(k as f64),
                non_finite: false,
            });
        }
        ring[k % SETTLE_WINDOW] = z;
        if k >= SETTLE_WINDOW && k % SETTLE_WINDOW == 0 {
            let spread = ring.iter().map(|w| (*w - z).norm()).fold(T::zero(), T::max);
            if spread < conv_tol {
                let residual = (map_step(z, c) - z).norm();
                return Ok(OrbitOutcome::Converged {
                    z_final: z,
                    residual,
                });
            }
        }
    }
    // unwritten ring slots are zero and cannot raise the maximum
    let amplitude = ring.iter().map(|w| w.norm()).fold(T::zero(), T::max);
    Ok(OrbitOutcome::Oscillating {
        z_final: z,
        amplitude,
    })
}
