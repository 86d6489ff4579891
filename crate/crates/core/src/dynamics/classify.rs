//! Trajectory classification with the fixed precedence
//! Escaped > Converged > Oscillating > Undecided, so every parameter point
//! lands in exactly one class.

use num_complex::Complex;

use super::config::DdeConfig;
use super::{map_step, OrbitOutcome, Trajectory};
use crate::scalar::{lit, Scalar};

/// Local maxima of a modulus sequence: strictly above the left neighbour,
/// at least level with the right one, so a peak landing exactly between two
/// samples still counts (once, at the left shoulder).
pub(crate) fn peak_indices<T: Scalar>(moduli: &[T]) -> Vec<usize> {
    (1..moduli.len().saturating_sub(1))
        .filter(|&i| moduli[i] > moduli[i - 1] && moduli[i] >= moduli[i + 1])
        .collect()
}

/// Classifies a recorded trajectory.
///
/// * Escaped: some sample is non-finite or beyond the escape radius; the
///   first such sample fixes the escape time and nothing after it is read.
/// * Converged: over the final window every sample stays within `conv_tol`
///   of the last one, and the last value satisfies the stationarity residual
///   bound `|z^2 - z + c| < 10 conv_tol`.
/// * Oscillating: bounded, not converged, with at least three local maxima
///   of `|z|` in the window whose heights agree within 10% relative spread.
/// * Undecided otherwise.
///
/// The trajectory should cover `[tau_end - window, tau_end]` (or have ended
/// in escape); classification uses only recorded samples.
pub fn classify_trajectory<T: Scalar>(
    trajectory: &Trajectory<T>,
    c: Complex<T>,
    config: &DdeConfig<T>,
) -> OrbitOutcome<T> {
    let samples = &trajectory.samples;
    assert!(!samples.is_empty(), "cannot classify an empty trajectory");

    let r2 = config.escape_radius() * config.escape_radius();
    for &(tau, z) in samples {
        let finite = z.re.is_finite() && z.im.is_finite();
        if !finite || z.norm_sqr() > r2 {
            return OrbitOutcome::Escaped {
                z_final: z,
                escape_time: tau,
                non_finite: !finite,
            };
        }
    }

    let &(t_end, z_end) = samples.last().expect("non-empty");
    let window_start = t_end - config.window();
    let window: Vec<(T, Complex<T>)> = samples
        .iter()
        .copied()
        .filter(|(tau, _)| *tau >= window_start)
        .collect();

    let spread = window
        .iter()
        .map(|(_, z)| (*z - z_end).norm())
        .fold(T::zero(), T::max);
    if spread < config.conv_tol() {
        let residual = (map_step(z_end, c) - z_end).norm();
        if residual < lit::<T>(10.0) * config.conv_tol() {
            return OrbitOutcome::Converged {
                z_final: z_end,
                residual,
            };
        }
    }

    let moduli: Vec<T> = window.iter().map(|(_, z)| z.norm()).collect();
    let peaks: Vec<T> = peak_indices(&moduli)
        .into_iter()
        .map(|i| moduli[i])
        .collect();
    if peaks.len() >= 3 {
        let hi = peaks.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = peaks.iter().copied().fold(T::infinity(), T::min);
        if hi > T::zero() && (hi - lo) <= lit::<T>(0.1) * hi {
            let amplitude = moduli.iter().copied().fold(T::zero(), T::max);
            return OrbitOutcome::Oscillating {
                z_final: z_end,
                amplitude,
            };
        }
    }

    OrbitOutcome::Undecided { z_final: z_end }
}
