//! Fixed-step classical RK4 for the delay equation, method-of-steps style.
//!
//! The delay is an integer multiple of the step, so the delayed argument of
//! every stage falls either on a grid node (stored exactly) or on a segment
//! midpoint (cubic Hermite). Derivative discontinuities propagate from
//! tau = 0 along multiples of tau0 and always land on grid nodes, which
//! preserves the full stage order away from those nodes.

use num_complex::Complex;

use super::classify::classify_trajectory;
use super::config::DdeConfig;
use super::history::HistoryBuffer;
use super::{OrbitOutcome, Trajectory};
use crate::error::Error;
use crate::scalar::{lit, Scalar};

#[inline]
fn rhs<T: Scalar>(z: Complex<T>, z_delayed: Complex<T>, c: Complex<T>) -> Complex<T> {
    -z + z_delayed * z_delayed + c
}

/// Integrates `dz/dtau = -z(tau) + z^2(tau - tau0) + c` from `tau = 0` to
/// the horizon, starting from the zero history on `[-tau0, 0]`.
///
/// The trajectory records `(tau, z)` every `sample_stride` steps (the
/// initial point included); integration stops early on escape or on a
/// non-finite state, appending the crossing sample. The returned outcome is
/// [`classify_trajectory`] applied to the record.
pub fn integrate_dde<T: Scalar>(
    c: Complex<T>,
    config: &DdeConfig<T>,
    sample_stride: usize,
) -> Result<(Trajectory<T>, OrbitOutcome<T>), Error> {
    if sample_stride == 0 {
        return Err(Error::InvalidParam(
            "sample_stride must be at least 1".into(),
        ));
    }
    let n = config.delay_steps();
    let h = config.dt();
    let steps = config.step_count();
    let r2 = config.escape_radius() * config.escape_radius();
    let half = lit::<T>(0.5);
    let sixth = T::one() / lit::<T>(6.0);
    let two = lit::<T>(2.0);

    let mut hb = HistoryBuffer::zero_history(n, h);
    let mut z = Complex::new(T::zero(), T::zero());
    // right-hand derivative at tau = 0 differs from the history slope
    hb.set_latest_slope_out(rhs(z, hb.z_at_node(-(n as i64)), c));

    let mut samples = Vec::with_capacity(steps / sample_stride + 2);
    samples.push((T::zero(), z));

    for step in 0..steps {
        let node = step as i64;
        let delayed = node - n as i64;
        let zd0 = hb.z_at_node(delayed);
        let zdm = hb.z_at_midpoint(delayed);
        let zd1 = hb.z_at_node(delayed + 1);

        let k1 = rhs(z, zd0, c);
        let k2 = rhs(z + k1 * (h * half), zdm, c);
        let k3 = rhs(z + k2 * (h * half), zdm, c);
        let k4 = rhs(z + k3 * h, zd1, c);
        z = z + (k1 + (k2 + k3) * two + k4) * (h * sixth);

        let tau = lit::<T>((step + 1) as f64) * h;
        let finite = z.re.is_finite() && z.im.is_finite();
        if !finite || z.norm_sqr() > r2 {
            samples.push((tau, z));
            break;
        }
        hb.push(z, rhs(z, zd1, c));
        if (step + 1) % sample_stride == 0 {
            samples.push((tau, z));
        }
    }

    let trajectory = Trajectory { samples };
    let outcome = classify_trajectory(&trajectory, c, config);
    Ok((trajectory, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{iterate_orbit, map_step, OutcomeKind};

    type C = Complex<f64>;

    fn cfg(tau0: f64, dt: f64, tau_end: f64, window: f64) -> DdeConfig<f64> {
        DdeConfig::new(tau0, dt, tau_end, 10.0, 1e-6, window, 0.5).unwrap()
    }

    #[test]
    fn zero_parameter_stays_exactly_zero() {
        let config = DdeConfig::with_defaults(10.0, 200.0).unwrap();
        let (traj, outcome) = integrate_dde(C::new(0.0, 0.0), &config, 1).unwrap();
        assert!(traj.samples.iter().all(|(_, z)| *z == C::new(0.0, 0.0)));
        match outcome {
            OrbitOutcome::Converged { z_final, residual } => {
                assert_eq!(z_final, C::new(0.0, 0.0));
                assert_eq!(residual, 0.0);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn small_real_parameter_relaxes_to_stationary_root() {
        let config = DdeConfig::with_defaults(10.0, 300.0).unwrap();
        let (_, outcome) = integrate_dde(C::new(0.1, 0.0), &config, 1).unwrap();
        match outcome {
            OrbitOutcome::Converged { z_final, .. } => {
                let root = (1.0 - 0.6_f64.sqrt()) / 2.0; // minus root of z^2 - z + 0.1
                assert!(
                    (z_final - C::new(root, 0.0)).norm() < 1e-7,
                    "z_final = {z_final}"
                );
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn long_delay_tracks_map_orbit_staircase() {
        let config = cfg(50.0, 0.05, 250.0, 10.0);
        let (traj, _) = integrate_dde(C::new(-1.0, 0.0), &config, 1).unwrap();
        let mut zk = C::new(0.0, 0.0);
        for k in 1..=5usize {
            zk = map_step(zk, C::new(-1.0, 0.0));
            let idx = ((k as f64 * 50.0 - 1.0) / config.dt()).round() as usize;
            let (tau, z) = traj.samples[idx];
            assert!((tau - (k as f64 * 50.0 - 1.0)).abs() < 1e-9);
            assert!((z - zk).norm() < 0.01, "k = {k}: z({tau}) = {z} vs {zk}");
        }
    }

    #[test]
    fn escape_stops_integration_at_first_crossing() {
        // far outside every bounded region
        let config = cfg(10.0, 0.05, 100.0, 50.0);
        let (traj, outcome) = integrate_dde(C::new(3.0, 0.0), &config, 4).unwrap();
        match outcome {
            OrbitOutcome::Escaped {
                escape_time,
                non_finite,
                ..
            } => {
                assert!(!non_finite);
                let (last_tau, last_z) = *traj.last().unwrap();
                assert_eq!(escape_time, last_tau);
                assert!(last_z.norm() > 10.0);
                // every earlier sample is inside the radius
                for (_, z) in &traj.samples[..traj.samples.len() - 1] {
                    assert!(z.norm() <= 10.0);
                }
            }
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_parameter_gives_bitwise_conjugate_trajectory() {
        let config = cfg(10.0, 0.1, 80.0, 30.0);
        let c = C::new(-0.62, 0.41);
        let (a, oa) = integrate_dde(c, &config, 1).unwrap();
        let (b, ob) = integrate_dde(c.conj(), &config, 1).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for ((ta, za), (tb, zb)) in a.samples.iter().zip(&b.samples) {
            assert_eq!(ta, tb);
            assert_eq!(za.re, zb.re);
            assert_eq!(za.im, -zb.im);
        }
        assert_eq!(oa.kind(), ob.kind());
    }

    #[test]
    fn halving_dt_shrinks_error_by_at_least_eight() {
        // probe away from the derivative-discontinuity nodes at multiples
        // of tau0; reference at dt/8
        let at = |dt: f64| {
            let config = cfg(10.0, dt, 30.0, 10.0);
            let (traj, _) = integrate_dde(C::new(0.1, 0.0), &config, 1).unwrap();
            traj.last().unwrap().1
        };
        let reference = at(10.0 / 800.0);
        let e1 = (at(10.0 / 100.0) - reference).norm();
        let e2 = (at(10.0 / 200.0) - reference).norm();
        assert!(e2 > 0.0);
        assert!(
            e1 / e2 >= 8.0,
            "observed order too low: e1 = {e1:.3e}, e2 = {e2:.3e}"
        );
    }

    #[test]
    fn rejects_zero_stride() {
        let config = DdeConfig::with_defaults(10.0, 100.0).unwrap();
        assert!(integrate_dde(C::new(0.0, 0.0), &config, 0).is_err());
    }

    #[test]
    fn discrete_and_continuous_classifications_agree_inside_cardioid() {
        // |z_s| = 0.3 is stable for the map and for every delay
        let zs = C::from_polar(0.3, 2.0);
        let c = zs - zs * zs;
        let config = DdeConfig::with_defaults(10.0, 300.0).unwrap();
        let (_, dde) = integrate_dde(c, &config, 1).unwrap();
        let map = iterate_orbit(c, 10_000, 2.0).unwrap();
        assert_eq!(dde.kind(), OutcomeKind::Converged);
        assert_eq!(map.kind(), OutcomeKind::Converged);
        assert!((dde.z_final() - zs).norm() < 1e-5);
    }
}
