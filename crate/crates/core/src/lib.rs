//! Numerical laboratory for the quadratic recurrence `z_{k+1} = z_k^2 + c`
//! and its delay-differential extension
//!
//! ```text
//! dz/dtau + z(tau) = z^2(tau - tau0) + c
//! ```
//!
//! over the complex parameter plane. The crate classifies orbits of either
//! system (converged / oscillating / escaped), computes the analytic
//! stability boundaries of both (cardioid, period-2 circle, period-3 bulb
//! edge, and the delay-dependent Hopf curve), renders classification rasters
//! of the parameter plane, and measures oscillation periods and bifurcation
//! branches along parameter lines.
//!
//! All numerics are generic over the scalar type through [`Scalar`]
//! (`f32` or `f64`); the concrete aliases [`Real`] and [`ComplexValue`]
//! fix `f64` as the working precision used by the CLI and the test suite.
//!
//! Module map:
//!
//! * [`dynamics`] — the discrete map, the delay integrator (fixed-step RK4
//!   with cubic Hermite history interpolation) and trajectory classification.
//! * [`cycles`] — periodic orbits of the discrete map, their multipliers and
//!   the period-1/2/3 boundary curves.
//! * [`stability`] — linear stability of stationary points of the delay
//!   equation: marginal frequencies, the parametric Hopf boundary, and a
//!   Nyquist winding-number cross-check.
//! * [`render`] — deterministic data-parallel sweeps of a parameter-plane
//!   grid into classification rasters and RGB images.
//! * [`bifurcation`] — time series, period measurement from refined `|z|`
//!   peaks, and Feigenbaum-style scans along parameter lines.

pub mod bifurcation;
pub mod cycles;
pub mod dynamics;
pub mod error;
pub mod render;
pub mod scalar;
pub mod stability;

pub use error::Error;
pub use scalar::Scalar;

/// Working floating-point precision of the concrete API.
pub type Real = f64;

/// Complex scalar at the working precision; carries `z`, `c` and multipliers.
pub type ComplexValue = num_complex::Complex<Real>;
