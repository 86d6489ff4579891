//! Linear stability of stationary points of the delay equation.
//!
//! A stationary value `z_s` (root of `z^2 - z + c = 0`) perturbed by
//! `u = z - z_s` obeys `du/dtau + u = 2 z_s u(tau - tau0)`. Marginal modes
//! `u ~ e^{i omega tau}` exist exactly on `|z_s| = sqrt(1 + omega^2)/2`,
//! with the frequency tied to the argument `phi` of `z_s` by
//! `omega tau0 + arctan omega = phi`. Substituting `c = z_s - z_s^2` turns
//! that modulus condition into the parametric Hopf boundary of the
//! parameter plane; as `tau0` grows, `omega -> 0` and the boundary tightens
//! onto the map's cardioid.

use num_complex::Complex;

use crate::cycles::marginal_point;
use crate::error::Error;
use crate::scalar::{lit, tol, Scalar};

/// One point of the Hopf boundary: argument `phi` of the stationary value,
/// marginal frequency `omega`, the boundary parameter `c_h`, and the
/// marginal modulus `sqrt(1 + omega^2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfSample<T: Scalar> {
    pub phi: T,
    pub omega: T,
    pub c_h: Complex<T>,
    pub marginal_modulus: T,
}

/// Verdict of the threshold test for one stationary value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict<T: Scalar> {
    /// Strictly inside the marginal modulus.
    pub stable: bool,
    /// `sqrt(1 + omega0^2)/2` at the binding branch.
    pub binding_threshold: T,
    /// Effective angle in `[0, pi]` after conjugate reduction.
    pub phi_used: T,
    /// Marginal frequency at the binding branch.
    pub omega_used: T,
}

/// Solves `omega tau0 + arctan omega = phi_eff` for the unique
/// `omega >= 0`.
///
/// The left side grows strictly from 0, so a bracketing bisection (run to
/// floating-point exhaustion) followed by one Newton polish pins the root;
/// the residual stays below `1e-12`.
pub fn solve_omega<T: Scalar>(phi_eff: T, tau0: T) -> T {
    assert!(phi_eff >= T::zero(), "effective angle must be non-negative");
    assert!(tau0 > T::zero(), "delay must be positive");
    if phi_eff == T::zero() {
        return T::zero();
    }
    let g = |w: T| w * tau0 + w.atan() - phi_eff;
    let mut lo = T::zero();
    let mut hi = phi_eff / tau0;
    while g(hi) < T::zero() {
        hi = hi + hi;
    }
    for _ in 0..200 {
        let mid = (lo + hi) * lit::<T>(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (lo + hi) * lit::<T>(0.5);
    // one Newton step; g' = tau0 + 1/(1 + w^2)
    let gp = tau0 + T::one() / (T::one() + w * w);
    w - g(w) / gp
}

/// Marginal modulus at frequency `omega`: `sqrt(1 + omega^2)/2`.
pub fn marginal_modulus<T: Scalar>(omega: T) -> T {
    (T::one() + omega * omega).sqrt() * lit::<T>(0.5)
}

/// Hopf boundary point for `phi` in `[0, 2pi)`.
///
/// For `phi <= pi` the sample solves the frequency relation directly; for
/// `phi > pi` it is the conjugate of the sample at `2pi - phi` (the
/// boundary is symmetric about the real axis).
pub fn hopf_boundary_point<T: Scalar>(phi: T, tau0: T) -> HopfSample<T> {
    let tau = T::TAU();
    let pi = T::PI();
    debug_assert!(phi >= T::zero() && phi < tau, "phi normalized to [0, 2pi)");
    if phi > pi {
        let mirror = hopf_boundary_point(tau - phi, tau0);
        return HopfSample {
            phi,
            omega: mirror.omega,
            c_h: mirror.c_h.conj(),
            marginal_modulus: mirror.marginal_modulus,
        };
    }
    let omega = solve_omega(phi, tau0);
    let m = marginal_modulus(omega);
    HopfSample {
        phi,
        omega,
        c_h: marginal_point(m, phi),
        marginal_modulus: m,
    }
}

/// Hopf boundary sampled on a uniform `phi` grid over `[0, 2pi)`; the
/// closed curve is conjugate-symmetric about the real axis.
pub fn hopf_boundary_curve<T: Scalar>(tau0: T, n_samples: usize) -> Vec<HopfSample<T>> {
    assert!(n_samples >= 8, "need at least 8 samples");
    let step = T::TAU() / lit::<T>(n_samples as f64);
    (0..n_samples)
        .map(|k| hopf_boundary_point(step * lit::<T>(k as f64), tau0))
        .collect()
}

/// The two stationary values `(1 -+ sqrt(1 - 4c))/2` (principal square
/// root), minus branch first. At `c = 1/4` the double root is returned
/// twice.
pub fn stationary_points<T: Scalar>(c: Complex<T>) -> (Complex<T>, Complex<T>) {
    let one = Complex::new(T::one(), T::zero());
    let half = lit::<T>(0.5);
    let disc = (one - c * lit::<T>(4.0)).sqrt();
    ((one - disc) * half, (one + disc) * half)
}

/// Threshold stability test for a stationary value.
///
/// The argument of `z_s` is normalized to `[0, 2pi)`, reduced by
/// conjugation to `[0, pi]`, and the marginal frequency of that binding
/// branch sets the threshold: stable iff `|z_s| < sqrt(1 + omega0^2)/2`
/// (strict). Larger angle branches (`phi + 2pi k`) only raise the
/// threshold, so the first crossing is the binding one.
pub fn is_stable<T: Scalar>(z_s: Complex<T>, tau0: T) -> StabilityVerdict<T> {
    let mut phi = z_s.arg();
    if phi < T::zero() {
        phi = phi + T::TAU();
    }
    let phi_eff = if phi > T::PI() { T::TAU() - phi } else { phi };
    let omega = solve_omega(phi_eff, tau0);
    let threshold = marginal_modulus(omega);
    StabilityVerdict {
        stable: z_s.norm() < threshold,
        binding_threshold: threshold,
        phi_used: phi_eff,
        omega_used: omega,
    }
}

/// Independent frequency-domain check of [`is_stable`].
///
/// Evaluates the open loop `L(i omega) = 2 z_s e^{-i omega tau0} /
/// (1 + i omega)` on a dense symmetric grid and accumulates the winding
/// number of `L - 1` about the origin. The open loop's only pole sits at
/// `-1`, so the closed loop is stable iff the winding number is zero.
///
/// Callers should supply `omega_max >= max(10, 8 |z_s|)` and at least
/// `10^4` points; a grid too coarse to track the argument (a jump above
/// `pi/2` between neighbours) is reported as inconclusive rather than
/// guessed.
pub fn nyquist_oracle<T: Scalar>(
    z_s: Complex<T>,
    tau0: T,
    omega_max: T,
    n_points: usize,
) -> Result<bool, Error> {
    assert!(n_points >= 2, "need at least two grid points");
    let two_zs = z_s * lit::<T>(2.0);
    let step = (omega_max + omega_max) / lit::<T>((n_points - 1) as f64);
    let pi = T::PI();
    let half_pi = T::FRAC_PI_2();
    let mut total = T::zero();
    let mut prev: Option<T> = None;
    for i in 0..n_points {
        let w = -omega_max + step * lit::<T>(i as f64);
        let rot = Complex::from_polar(T::one(), -w * tau0);
        let l = two_zs * rot / Complex::new(T::one(), w);
        let shifted = l - Complex::new(T::one(), T::zero());
        let arg = shifted.arg();
        if let Some(p) = prev {
            let mut d = arg - p;
            if d > pi {
                d = d - T::TAU();
            } else if d < -pi {
                d = d + T::TAU();
            }
            if d.abs() > half_pi {
                return Err(Error::InconclusiveWinding {
                    jump: d.abs().to_f64().unwrap_or(f64::NAN),
                });
            }
            total = total + d;
        }
        prev = Some(arg);
    }
    let winding = (total / T::TAU()).round();
    Ok(winding == T::zero())
}

/// Oscillation period `2 pi / omega` of a marginal mode.
pub fn predicted_period<T: Scalar>(omega: T) -> Result<T, Error> {
    if omega <= T::zero() {
        return Err(Error::ZeroFrequency);
    }
    Ok(T::TAU() / omega)
}

/// Slope `c_hi / c_hr` of the parameter-plane ray through the Hopf point
/// at angle `phi`; the oscillation frequency is constant along that ray.
pub fn ray_slope<T: Scalar>(phi: T, tau0: T) -> Result<T, Error> {
    let sample = hopf_boundary_point(phi, tau0);
    if sample.c_h.re.abs() < tol::<T>(1e-14) {
        return Err(Error::DivisionByZeroRay);
    }
    Ok(sample.c_h.im / sample.c_h.re)
}
