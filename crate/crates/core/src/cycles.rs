//! Periodic orbits of the quadratic map, their multipliers, and the
//! analytic/numerical boundaries of the period-1, 2 and 3 regions.
//!
//! A period-`n` cycle of `z -> z^2 + c` is marginal when its multiplier
//! `prod 2 z_k` has modulus 1, equivalently when the product of its points
//! has modulus `1/2^n`: `|z| = 1/2` bounds the main region, `|y| = 1/4` the
//! period-2 disk, `|x| = 1/8` the period-3 bulbs.

use num_complex::Complex;
use thiserror::Error;

use crate::error::Error;
use crate::scalar::{lit, tol, Scalar};

const NEWTON_MAX_STEPS: usize = 100;

/// A period-`n` cycle: its points in orbit order, the multiplier
/// `prod 2 z_k`, and the parameter it lives at.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleData<T: Scalar> {
    pub period: usize,
    pub points: Vec<Complex<T>>,
    pub multiplier: Complex<T>,
    pub c: Complex<T>,
}

/// Marginal-stationarity curve `c = z_s - z_s^2` for `z_s = m e^{i phi}`,
/// evaluated componentwise as `m cos phi - m^2 cos 2phi` (and the sine
/// analogue) so that curves sharing a modulus agree bit-exactly.
pub fn marginal_point<T: Scalar>(m: T, phi: T) -> Complex<T> {
    let (s1, c1) = phi.sin_cos();
    let (s2, c2) = (phi + phi).sin_cos();
    let m2 = m * m;
    Complex::new(m * c1 - m2 * c2, m * s1 - m2 * s2)
}

/// Boundary of the main region: `(1/2) e^{i phi} - (1/4) e^{2 i phi}`.
pub fn cardioid_point<T: Scalar>(phi: T) -> Complex<T> {
    marginal_point(lit(0.5), phi)
}

/// Boundary of the period-2 disk: `(1/4) e^{i phi} - 1`.
pub fn period2_point<T: Scalar>(phi: T) -> Complex<T> {
    let (s, c) = phi.sin_cos();
    let quarter = lit::<T>(0.25);
    Complex::new(quarter * c - T::one(), quarter * s)
}

/// One root of the period-2 condition `z^2 + z + (c + 1) = 0`
/// (principal branch); the closed form removes seed sensitivity.
pub fn period2_seed<T: Scalar>(c: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let disc = (one - (c + one) * lit::<T>(4.0)).sqrt();
    (disc - one) * lit::<T>(0.5)
}

/// Real superattracting center of the period-3 window: the real root of
/// `c^3 + 2c^2 + c + 1 = 0` (from `F^3(0) = 0`), found by bisection.
pub fn period3_center<T: Scalar>() -> T {
    let f = |c: f64| ((c + 2.0) * c + 1.0) * c + 1.0;
    let (mut lo, mut hi) = (-2.0, -1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lit(0.5 * (lo + hi))
}

/// `F^n(z)` together with the cycle multiplier `prod 2 F^k(z)` and all four
/// partial derivatives needed by the Newton solvers.
struct SystemEval<T: Scalar> {
    fnz: Complex<T>,
    dfnz_dz: Complex<T>,
    dfnz_dc: Complex<T>,
    mult: Complex<T>,
    dmult_dz: Complex<T>,
    dmult_dc: Complex<T>,
}

fn eval_system<T: Scalar>(z: Complex<T>, c: Complex<T>, n: usize) -> SystemEval<T> {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let two = lit::<T>(2.0);
    let mut w = z;
    let mut dw_dz = one;
    let mut dw_dc = zero;
    let mut mult = one;
    let mut dmult_dz = zero;
    let mut dmult_dc = zero;
    for _ in 0..n {
        let factor = w * two;
        dmult_dz = dmult_dz * factor + mult * (dw_dz * two);
        dmult_dc = dmult_dc * factor + mult * (dw_dc * two);
        mult = mult * factor;
        dw_dz = factor * dw_dz;
        dw_dc = factor * dw_dc + one;
        w = w * w + c;
    }
    SystemEval {
        fnz: w,
        dfnz_dz: dw_dz,
        dfnz_dc: dw_dc,
        mult,
        dmult_dz,
        dmult_dc,
    }
}

/// Newton iteration on `G(z) = F^n(z) - z` at fixed `c`.
///
/// Converges when `|G| < 1e-12`; rejects cycles whose points are not
/// pairwise distinct within `1e-8` (a lower period divides `n`) unless
/// `n = 1`.
pub fn find_cycle<T: Scalar>(
    c: Complex<T>,
    n: usize,
    seed: Complex<T>,
) -> Result<CycleData<T>, Error> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParam(format!(
            "period {n} outside supported range 1..=3"
        )));
    }
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(Error::InvalidParam("seed must be finite".into()));
    }
    let target = tol::<T>(1e-12);
    let mut z = seed;
    let mut residual = T::infinity();
    let mut converged = false;
    for _ in 0..NEWTON_MAX_STEPS {
        let sys = eval_system(z, c, n);
        let g = sys.fnz - z;
        residual = g.norm();
        if residual < target {
            converged = true;
            break;
        }
        let one = Complex::new(T::one(), T::zero());
        let step = g / (sys.dfnz_dz - one);
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z = z - step;
    }
    if !converged {
        return Err(Error::NoConvergence {
            steps: NEWTON_MAX_STEPS,
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }

    // The residual target leaves a nearly-parabolic cycle (multiplier near
    // 1, so G has an almost-double root) well short of full accuracy in z.
    // Keep stepping while the steps shrink; simple roots exit immediately.
    let mut prev_step = T::infinity();
    for _ in 0..64 {
        let sys = eval_system(z, c, n);
        let one = Complex::new(T::one(), T::zero());
        let step = (sys.fnz - z) / (sys.dfnz_dz - one);
        let size = step.norm();
        if !size.is_finite()
            || size >= prev_step * lit(0.9)
            || size < T::epsilon() * (z.norm() + T::one())
        {
            break;
        }
        z = z - step;
        prev_step = size;
    }

    let mut points = Vec::with_capacity(n);
    let mut w = z;
    for _ in 0..n {
        points.push(w);
        w = w * w + c;
    }
    let distinct = tol::<T>(1e-8);
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() < distinct {
                return Err(Error::DegenerateCycle {
                    c_re: c.re.to_f64().unwrap_or(f64::NAN),
                    c_im: c.im.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let two = lit::<T>(2.0);
    let multiplier = points
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, p| acc * (*p * two));
    Ok(CycleData {
        period: n,
        points,
        multiplier,
        c,
    })
}

/// Modulus of the cycle-point product (`|z|`, `|y| = |z0 z1|` or
/// `|x| = |z0 z1 z2|` for periods 1, 2, 3) and whether it sits on the
/// marginal value (`1/2`, `1/4`, `1/8`) within `1e-9`.
///
/// The multiplier identity `|multiplier| = 2^n * modulus` ties the two
/// formulations together.
pub fn cycle_multiplier_invariants<T: Scalar>(cycle: &CycleData<T>) -> (T, bool) {
    let product = cycle
        .points
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, p| acc * *p);
    let modulus = product.norm();
    let boundary = T::one() / lit::<T>(f64::powi(2.0, cycle.period as i32));
    let on_boundary = (modulus - boundary).abs() <= tol::<T>(1e-9);
    (modulus, on_boundary)
}

/// Multiplier continuation failed partway around the boundary; the points
/// solved so far are preserved.
#[derive(Debug, Clone, Error)]
#[error("continuation stalled at theta = {theta} after {} boundary points", partial.len())]
pub struct ContinuationStall<T: Scalar> {
    pub theta: T,
    pub partial: Vec<Complex<T>>,
}

/// Boundary of the period-`n` region, sampled at `tau_samples` parameter
/// values.
///
/// Periods 1 and 2 evaluate their closed forms on a uniform `phi` grid over
/// `[0, 2pi)`. Period 3 continues the system
/// `{F^3(z) = z, prod 2 z_k = e^{i theta}}` in `theta` by Newton, starting
/// from the superattracting center of the window on the real axis, and
/// returns `c(theta)` on the bulb boundary.
pub fn trace_multiplier_boundary<T: Scalar>(
    n: usize,
    tau_samples: usize,
) -> Result<Vec<Complex<T>>, ContinuationStall<T>> {
    assert!((1..=3).contains(&n), "period outside supported range 1..=3");
    assert!(tau_samples >= 8, "need at least 8 samples");
    let step = T::TAU() / lit::<T>(tau_samples as f64);
    match n {
        1 => Ok((0..tau_samples)
            .map(|k| cardioid_point(step * lit::<T>(k as f64)))
            .collect()),
        2 => Ok((0..tau_samples)
            .map(|k| period2_point(step * lit::<T>(k as f64)))
            .collect()),
        _ => trace_period3_boundary(tau_samples),
    }
}

/// Newton solve of `{F^3(z) - z = 0, mult - target = 0}` in `(z, c)`.
fn newton_system<T: Scalar>(z: &mut Complex<T>, c: &mut Complex<T>, target: Complex<T>) -> bool {
    let tol_g = tol::<T>(1e-12);
    let one = Complex::new(T::one(), T::zero());
    for _ in 0..60 {
        let sys = eval_system(*z, *c, 3);
        let g1 = sys.fnz - *z;
        let g2 = sys.mult - target;
        if g1.norm().max(g2.norm()) < tol_g {
            return true;
        }
        let a = sys.dfnz_dz - one;
        let b = sys.dfnz_dc;
        let d = sys.dmult_dz;
        let e = sys.dmult_dc;
        let det = a * e - b * d;
        if det.norm() < T::epsilon() {
            return false;
        }
        let dz = (g1 * e - g2 * b) / det;
        let dc = (a * g2 - d * g1) / det;
        if !(dz.re.is_finite() && dz.im.is_finite() && dc.re.is_finite() && dc.im.is_finite()) {
            return false;
        }
        *z = *z - dz;
        *c = *c - dc;
    }
    false
}

fn trace_period3_boundary<T: Scalar>(
    tau_samples: usize,
) -> Result<Vec<Complex<T>>, ContinuationStall<T>> {
    // cycle through the origin at the superattracting center
    let mut c = Complex::new(period3_center::<T>(), T::zero());
    let mut z = Complex::new(T::zero(), T::zero());
    // ramp the multiplier modulus from 0 to 1 at theta = 0
    for j in 1..=16 {
        let target = Complex::new(lit::<T>(j as f64 / 16.0), T::zero());
        if !newton_system(&mut z, &mut c, target) {
            return Err(ContinuationStall {
                theta: T::zero(),
                partial: Vec::new(),
            });
        }
    }

    let mut points = Vec::with_capacity(tau_samples);
    points.push(c);
    let grid = T::TAU() / lit::<T>(tau_samples as f64);
    let mut theta_cur = T::zero();
    for k in 1..tau_samples {
        let theta_goal = grid * lit::<T>(k as f64);
        let mut dtheta = theta_goal - theta_cur;
        let mut guard = 0usize;
        while theta_cur < theta_goal {
            let theta_try = (theta_cur + dtheta).min(theta_goal);
            let (mut z_try, mut c_try) = (z, c);
            let (s, co) = theta_try.sin_cos();
            if newton_system(&mut z_try, &mut c_try, Complex::new(co, s)) {
                z = z_try;
                c = c_try;
                theta_cur = theta_try;
                dtheta = dtheta + dtheta;
            } else {
                dtheta = dtheta * lit::<T>(0.5);
                guard += 1;
                if guard > 60 || dtheta < tol::<T>(1e-9) {
                    return Err(ContinuationStall {
                        theta: theta_goal,
                        partial: points,
                    });
                }
            }
        }
        points.push(c);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    #[test]
    fn cardioid_landmarks() {
        assert_eq!(cardioid_point(0.0), C::new(0.25, 0.0));
        let top = cardioid_point(std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(top.re, 0.25, epsilon = 1e-15);
        assert_relative_eq!(top.im, 0.5, epsilon = 1e-15);
        let left = cardioid_point(std::f64::consts::PI);
        assert_eq!(left.re, -0.75); // cos(pi) and cos(2 pi) are exact
        assert!(left.im.abs() < 2.5e-16);
    }

    #[test]
    fn period2_landmarks() {
        assert_eq!(period2_point(0.0), C::new(-0.75, 0.0));
        let left = period2_point(std::f64::consts::PI);
        assert_eq!(left.re, -1.25);
        assert!(left.im.abs() < 1e-16);
        let top = period2_point(std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(top.re, -1.0, epsilon = 1e-15);
        assert_relative_eq!(top.im, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn tangency_of_main_and_period2_boundaries() {
        // cardioid(pi) = period2(0) = -3/4; real parts are bit-exact, the
        // imaginary part of the former carries sin(pi_f64) ~ 1.2e-16
        let a = cardioid_point(std::f64::consts::PI);
        let b = period2_point(0.0);
        assert_eq!(a.re, b.re);
        assert_eq!(b.im, 0.0);
        assert!(a.im.abs() <= 2.5e-16);
    }

    #[test]
    fn fixed_point_cycle_at_origin() {
        let cycle = find_cycle(C::new(0.0, 0.0), 1, C::new(0.1, 0.0)).unwrap();
        assert_eq!(cycle.period, 1);
        assert!(cycle.points[0].norm() < 1e-12);
        assert!(cycle.multiplier.norm() < 1e-11);
        let (modulus, on_boundary) = cycle_multiplier_invariants(&cycle);
        assert!(modulus < 1e-12);
        assert!(!on_boundary);
    }

    #[test]
    fn superattracting_two_cycle() {
        let cycle = find_cycle(C::new(-1.0, 0.0), 2, C::new(0.1, 0.0)).unwrap();
        let mut pts = cycle.points.clone();
        pts.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((pts[0] - C::new(-1.0, 0.0)).norm() < 1e-10);
        assert!(pts[1].norm() < 1e-10);
        assert!(cycle.multiplier.norm() < 1e-9);
    }

    #[test]
    fn two_cycle_on_boundary_at_minus_five_quarters() {
        // points are the roots of z^2 + z - 1/4, product c + 1 = -1/4
        let cycle = find_cycle(C::new(-1.25, 0.0), 2, period2_seed(C::new(-1.25, 0.0))).unwrap();
        let (modulus, on_boundary) = cycle_multiplier_invariants(&cycle);
        assert_relative_eq!(modulus, 0.25, epsilon = 1e-12);
        assert!(on_boundary);
        assert_relative_eq!(cycle.multiplier.norm(), 4.0 * modulus, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_two_cycle_at_tangency() {
        // at c = -3/4 the period-2 roots collapse onto the fixed point
        let c = C::new(-0.75, 0.0);
        assert!(matches!(
            find_cycle(c, 2, period2_seed(c)),
            Err(Error::DegenerateCycle { .. })
        ));
    }

    #[test]
    fn superattracting_three_cycle_center() {
        let c = C::new(period3_center::<f64>(), 0.0);
        assert_relative_eq!(c.re, -1.754_877_666_246_693, epsilon = 1e-12);
        let cycle = find_cycle(c, 3, C::new(0.0, 0.0)).unwrap();
        let (modulus, on_boundary) = cycle_multiplier_invariants(&cycle);
        assert!(modulus < 1e-10);
        assert!(!on_boundary);
        assert!(cycle.points.iter().any(|p| p.norm() < 1e-10));
    }

    #[test]
    fn absurd_parameter_fails_to_converge() {
        // roots sit near modulus 1e100 where the absolute residual target
        // is unreachable in f64
        let out = find_cycle(C::new(1e200, 0.0), 1, C::new(0.1, 0.0));
        assert!(matches!(out, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn cycle_points_map_onto_each_other() {
        let c = C::new(-0.9, 0.25);
        let cycle = find_cycle(c, 2, period2_seed(c)).unwrap();
        for i in 0..cycle.period {
            let next = cycle.points[(i + 1) % cycle.period];
            let stepped = cycle.points[i] * cycle.points[i] + c;
            assert!((stepped - next).norm() < 1e-10);
        }
    }

    #[test]
    fn boundary_trace_period1_and_2_sample_closed_forms() {
        let c1 = trace_multiplier_boundary::<f64>(1, 8).unwrap();
        assert_eq!(c1.len(), 8);
        assert_eq!(c1[0], C::new(0.25, 0.0));
        assert!((c1[2] - C::new(0.25, 0.5)).norm() < 1e-15);
        assert_eq!(c1[4].re, -0.75);
        assert!((c1[6] - C::new(0.25, -0.5)).norm() < 1e-15);
        let c2 = trace_multiplier_boundary::<f64>(2, 8).unwrap();
        assert_eq!(c2[0], C::new(-0.75, 0.0));
        assert_eq!(c2[4].re, -1.25);
    }

    #[test]
    fn period3_boundary_cycles_recompute_to_marginal_modulus() {
        // independent check: at every boundary point some period-3 cycle,
        // re-solved from scratch, has |x| = 1/8
        let pts = trace_multiplier_boundary::<f64>(3, 32).unwrap();
        let center = period3_center::<f64>();
        let base = [
            C::new(0.0, 0.0),
            C::new(center, 0.0),
            C::new(center * center + center, 0.0),
        ];
        let offsets = [
            C::new(0.0, 0.0),
            C::new(0.05, 0.0),
            C::new(-0.05, 0.0),
            C::new(0.0, 0.05),
            C::new(0.0, -0.05),
        ];
        for c in pts {
            let best = base
                .iter()
                .flat_map(|b| offsets.iter().map(move |o| b + o))
                .filter_map(|seed| find_cycle(c, 3, seed).ok())
                .map(|cycle| (cycle_multiplier_invariants(&cycle).0 - 0.125).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(
                best <= 1e-8,
                "no marginal cycle at c = {c}: best error {best:.2e}"
            );
        }
    }

    #[test]
    fn period3_boundary_is_selfconsistent_and_symmetric() {
        let pts = trace_multiplier_boundary::<f64>(3, 64).unwrap();
        assert_eq!(pts.len(), 64);
        // cusp of the bulb at theta = 0 is the tangent bifurcation c = -7/4
        assert!((pts[0] - C::new(-1.75, 0.0)).norm() < 1e-8);
        // conjugation symmetry: theta and 2pi - theta mirror each other
        for k in 1..64 {
            assert!((pts[k].conj() - pts[64 - k]).norm() < 1e-8);
        }
        // stays near the window center
        for p in &pts {
            assert!((p - C::new(-1.7549, 0.0)).norm() < 0.05);
        }
    }
}
