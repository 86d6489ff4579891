//! Integration and classification policy for the delay equation.

use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Default step divisor: `dt = tau0 / 200`.
pub const DEFAULT_STEPS_PER_DELAY: usize = 200;
/// Default escape radius in continuous mode. The transient can overshoot the
/// discrete-map bound 2, so the continuous default is larger.
pub const DEFAULT_DDE_ESCAPE_RADIUS: f64 = 10.0;
/// Default convergence tolerance for both modes.
pub const DEFAULT_CONV_TOL: f64 = 1e-6;
/// Default classification window, in units of `tau0`.
pub const DEFAULT_WINDOW_DELAYS: f64 = 5.0;
/// Default fraction of the horizon discarded as transient.
pub const DEFAULT_TRANSIENT_FRAC: f64 = 0.5;

/// Integration and classification policy for the delay equation: normalized
/// delay `tau0`, step `dt`, horizon `tau_end`, escape radius, convergence
/// tolerance, classification window and transient fraction.
///
/// The constructor forces `tau0/dt` to a positive integer `N >= 4`
/// (`N = round(tau0/dt)`, then `dt = tau0/N`) so that propagated derivative
/// discontinuities land on grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdeConfig<T: Scalar> {
    tau0: T,
    dt: T,
    tau_end: T,
    escape_radius: T,
    conv_tol: T,
    window: T,
    transient_frac: T,
    delay_steps: usize,
}

impl<T: Scalar> DdeConfig<T> {
    /// Builds a validated configuration.
    ///
    /// Rejects non-positive `tau0`, `dt`, `tau_end`, `escape_radius`,
    /// `conv_tol` or `window`, a `transient_frac` outside `[0, 1)`, and any
    /// horizon shorter than `tau0 + window`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tau0: T,
        dt: T,
        tau_end: T,
        escape_radius: T,
        conv_tol: T,
        window: T,
        transient_frac: T,
    ) -> Result<Self, Error> {
        let pos = [
            (tau0, "tau0"),
            (dt, "dt"),
            (tau_end, "tau_end"),
            (escape_radius, "escape_radius"),
            (conv_tol, "conv_tol"),
            (window, "window"),
        ];
        for (v, name) in pos {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        if !transient_frac.is_finite() || transient_frac < T::zero() || transient_frac >= T::one() {
            return Err(Error::InvalidConfig(
                "transient_frac must lie in [0, 1)".into(),
            ));
        }
        let n = (tau0 / dt).round();
        let delay_steps = n.to_usize().unwrap_or(0).max(4);
        let dt = tau0 / lit::<T>(delay_steps as f64);
        if tau_end < tau0 + window {
            return Err(Error::InvalidConfig(format!(
                "tau_end must cover tau0 + window (= {})",
                tau0 + window
            )));
        }
        Ok(Self {
            tau0,
            dt,
            tau_end,
            escape_radius,
            conv_tol,
            window,
            transient_frac,
            delay_steps,
        })
    }

    /// Configuration with the documented defaults for a given delay and
    /// horizon: `dt = tau0/200`, escape radius 10, `conv_tol = 1e-6`,
    /// `window = 5 tau0`, `transient_frac = 0.5`.
    pub fn with_defaults(tau0: T, tau_end: T) -> Result<Self, Error> {
        Self::new(
            tau0,
            tau0 / lit(DEFAULT_STEPS_PER_DELAY as f64),
            tau_end,
            lit(DEFAULT_DDE_ESCAPE_RADIUS),
            lit(DEFAULT_CONV_TOL),
            tau0 * lit(DEFAULT_WINDOW_DELAYS),
            lit(DEFAULT_TRANSIENT_FRAC),
        )
    }

    /// Same policy at a different horizon.
    pub fn with_tau_end(&self, tau_end: T) -> Result<Self, Error> {
        Self::new(
            self.tau0,
            self.dt,
            tau_end,
            self.escape_radius,
            self.conv_tol,
            self.window,
            self.transient_frac,
        )
    }

    pub fn tau0(&self) -> T {
        self.tau0
    }

    /// Actual step after rounding `tau0/dt` to the integer `N`.
    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn tau_end(&self) -> T {
        self.tau_end
    }

    pub fn escape_radius(&self) -> T {
        self.escape_radius
    }

    pub fn conv_tol(&self) -> T {
        self.conv_tol
    }

    pub fn window(&self) -> T {
        self.window
    }

    pub fn transient_frac(&self) -> T {
        self.transient_frac
    }

    /// `N = tau0/dt`, the delay measured in steps.
    pub fn delay_steps(&self) -> usize {
        self.delay_steps
    }

    /// Number of RK4 steps to reach (the grid node nearest to) `tau_end`.
    pub fn step_count(&self) -> usize {
        (self.tau_end / self.dt)
            .round()
            .to_usize()
            .expect("horizon representable as a step count")
    }
}
