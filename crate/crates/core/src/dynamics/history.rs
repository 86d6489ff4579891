//! Rolling record of the recent solution, dense enough to answer every
//! delayed-argument query the integrator makes.
//!
//! Samples live on the uniform step grid. On-grid queries return the stored
//! value bit-exactly; queries between nodes use cubic Hermite interpolation
//! of the bracketing pair, which keeps the delayed argument at the same
//! order as the RK4 stages.
//!
//! Each node carries two slopes: the derivative of the segment arriving at
//! the node and the derivative of the segment leaving it. They coincide
//! everywhere except at tau = 0, where the prescribed history (z = 0, slope
//! 0) meets the integrated solution (slope c).

use std::collections::VecDeque;

use num_complex::Complex;

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy)]
struct Node<T: Scalar> {
    z: Complex<T>,
    slope_in: Complex<T>,
    slope_out: Complex<T>,
}

/// Ring of `(z, dz)` samples on the uniform grid covering at least the most
/// recent span `tau0 + dt`; answers queries for the delayed argument
/// `z(tau - tau0)`.
#[derive(Debug, Clone)]
pub struct HistoryBuffer<T: Scalar> {
    dt: T,
    /// Grid index of `nodes[0]`; node `i` sits at `tau = i * dt`.
    first: i64,
    nodes: VecDeque<Node<T>>,
    capacity: usize,
}

impl<T: Scalar> HistoryBuffer<T> {
    /// Buffer prefilled with the zero initial history on `[-tau0 - dt, 0]`
    /// (`delay_steps + 2` nodes, all with `z = 0` and zero slopes).
    pub fn zero_history(delay_steps: usize, dt: T) -> Self {
        let capacity = delay_steps + 2;
        let mut nodes = VecDeque::with_capacity(capacity + 1);
        let zero = Complex::new(T::zero(), T::zero());
        for _ in 0..capacity {
            nodes.push_back(Node {
                z: zero,
                slope_in: zero,
                slope_out: zero,
            });
        }
        Self {
            dt,
            first: -(delay_steps as i64) - 1,
            nodes,
            capacity,
        }
    }

    /// Grid step.
    pub fn dt(&self) -> T {
        self.dt
    }

    /// Grid index of the newest node (`tau_now = latest() * dt`).
    pub fn latest(&self) -> i64 {
        self.first + self.nodes.len() as i64 - 1
    }

    /// Overrides the outgoing slope of the newest node. Used once, at
    /// tau = 0, where the right-hand derivative jumps away from the history
    /// slope.
    pub fn set_latest_slope_out(&mut self, slope: Complex<T>) {
        let node = self.nodes.back_mut().expect("buffer never empty");
        node.slope_out = slope;
    }

    /// Appends the node for the next grid time with a continuous slope,
    /// dropping the oldest node once the covered span exceeds `tau0 + dt`.
    pub fn push(&mut self, z: Complex<T>, slope: Complex<T>) {
        self.nodes.push_back(Node {
            z,
            slope_in: slope,
            slope_out: slope,
        });
        if self.nodes.len() > self.capacity {
            self.nodes.pop_front();
            self.first += 1;
        }
    }

    fn node(&self, idx: i64) -> &Node<T> {
        debug_assert!(
            idx >= self.first && idx <= self.latest(),
            "node {idx} outside retained window [{}, {}]",
            self.first,
            self.latest()
        );
        &self.nodes[(idx - self.first) as usize]
    }

    /// Stored sample at grid index `idx` (bit-exact).
    pub fn z_at_node(&self, idx: i64) -> Complex<T> {
        self.node(idx).z
    }

    /// Hermite value at the midpoint of segment `[idx, idx + 1]`.
    ///
    /// At `theta = 1/2` the cubic Hermite form reduces to
    /// `(z0 + z1)/2 + dt (m0 - m1)/8`.
    pub fn z_at_midpoint(&self, idx: i64) -> Complex<T> {
        let a = self.node(idx);
        let b = self.node(idx + 1);
        let half = lit::<T>(0.5);
        let eighth = lit::<T>(0.125);
        (a.z + b.z) * half + (a.slope_out - b.slope_in) * (self.dt * eighth)
    }

    /// General query at time `q`.
    ///
    /// Returns `None` outside the retained span. Queries within `1e-9` grid
    /// units of a node return the stored sample exactly; other queries use
    /// cubic Hermite interpolation on the bracketing segment.
    pub fn sample(&self, q: T) -> Option<Complex<T>> {
        let u = q / self.dt;
        let first = lit::<T>(self.first as f64);
        let last = lit::<T>(self.latest() as f64);
        if u < first || u > last {
            return None;
        }
        let k = u.round();
        if (u - k).abs() < tol_on_grid::<T>() {
            return Some(self.node(k.to_i64()?).z);
        }
        let lo = u.floor().to_i64()?;
        let a = self.node(lo);
        let b = self.node(lo + 1);
        let theta = u - u.floor();
        Some(hermite(a.z, a.slope_out, b.z, b.slope_in, self.dt, theta))
    }
}

fn tol_on_grid<T: Scalar>() -> T {
    lit::<T>(1e-9).max(T::epsilon() * lit(64.0))
}

/// Cubic Hermite interpolant on one segment, `theta` in `(0, 1)`.
fn hermite<T: Scalar>(
    z0: Complex<T>,
    m0: Complex<T>,
    z1: Complex<T>,
    m1: Complex<T>,
    h: T,
    theta: T,
) -> Complex<T> {
    let one = T::one();
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = lit::<T>(2.0) * t3 - lit::<T>(3.0) * t2 + one;
    let h10 = t3 - lit::<T>(2.0) * t2 + theta;
    let h01 = lit::<T>(-2.0) * t3 + lit::<T>(3.0) * t2;
    let h11 = t3 - t2;
    z0 * h00 + m0 * (h * h10) + z1 * h01 + m1 * (h * h11)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    /// Fill a buffer with samples of a complex cubic polynomial; Hermite
    /// interpolation must then reproduce it exactly (up to rounding).
    fn cubic_filled(dt: f64, nodes: usize) -> (HistoryBuffer<f64>, impl Fn(f64) -> C) {
        let p = |t: f64| {
            C::new(
                2.0 - t + 0.5 * t * t + 0.25 * t * t * t,
                1.0 + 2.0 * t - t * t * t,
            )
        };
        let dp = |t: f64| C::new(-1.0 + t + 0.75 * t * t, 2.0 - 3.0 * t * t);
        let mut hb = HistoryBuffer::zero_history(nodes, dt);
        // overwrite the zero prefill by pushing real samples past it
        for i in 1..=(2 * nodes as i64) {
            let t = i as f64 * dt;
            hb.push(p(t), dp(t));
        }
        (hb, p)
    }

    #[test]
    fn on_grid_queries_are_bit_exact() {
        let (hb, p) = cubic_filled(0.25, 8);
        for idx in (hb.latest() - 8)..=hb.latest() {
            let t = idx as f64 * 0.25;
            assert_eq!(hb.z_at_node(idx), p(t));
            assert_eq!(hb.sample(t).unwrap(), p(t));
        }
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let (hb, p) = cubic_filled(0.25, 8);
        for idx in (hb.latest() - 8)..hb.latest() {
            let mid = hb.z_at_midpoint(idx);
            let t = (idx as f64 + 0.5) * 0.25;
            assert!((mid - p(t)).norm() < 1e-13, "midpoint off at t = {t}");
            let q = (idx as f64 + 0.3) * 0.25;
            assert!((hb.sample(q).unwrap() - p(q)).norm() < 1e-13);
        }
    }

    #[test]
    fn covered_span_is_delay_plus_one_step() {
        let hb = HistoryBuffer::<f64>::zero_history(10, 0.5);
        assert_eq!(hb.latest(), 0);
        assert!(hb.sample(-5.5).is_some()); // tau_now - tau0 - dt
        assert!(hb.sample(0.0).is_some());
        assert!(hb.sample(-5.5 - 0.5).is_none());
        assert!(hb.sample(0.25).is_none());
    }

    #[test]
    fn zero_history_slope_split_at_origin() {
        let mut hb = HistoryBuffer::<f64>::zero_history(4, 0.5);
        hb.set_latest_slope_out(C::new(0.3, 0.1));
        // history side of node 0 still interpolates the zero function
        assert_eq!(hb.sample(-0.25).unwrap(), C::new(0.0, 0.0));
        // the outgoing slope is what the next segment will see
        hb.push(C::new(0.14, 0.05), C::new(0.2, 0.08));
        // (z0 + z1)/2 + dt (m0 - m1)/8 with m0 the outgoing slope at 0
        let mid = hb.z_at_midpoint(0);
        assert!((mid - C::new(0.07625, 0.02625)).norm() < 1e-15);
    }

    #[test]
    fn ring_drops_stale_nodes() {
        let (hb, _) = cubic_filled(0.25, 8);
        // capacity is delay_steps + 2 = 10 nodes
        assert_eq!(hb.latest(), 16);
        assert!(hb.sample(16.0 * 0.25).is_some());
        assert!(hb.sample(7.0 * 0.25).is_some());
        assert!(hb.sample(6.9 * 0.25).is_none());
    }
}
