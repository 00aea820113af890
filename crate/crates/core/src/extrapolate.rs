//! Limit estimation for monotone parameter sweeps.
//!
//! Every kernel construction in this crate produces a family indexed by a
//! geometric schedule (truncation radius, mollifier width, layer depth) whose
//! members approach the object of interest monotonically. The schedule values
//! and the per-step data are always kept; extrapolation only ever *adds* an
//! estimate, it never hides the sequence it came from.

use crate::real::Real;

/// A geometric schedule of positive parameters, largest first.
#[derive(Debug, Clone)]
pub struct Schedule<T> {
    values: Vec<T>,
}

impl<T: Real> Schedule<T> {
    /// Geometric schedule `start, start*ratio, ...` with `count` terms, ratio in (0,1).
    pub fn geometric(start: T, ratio: T, count: usize) -> Self {
        assert!(start > T::zero() && ratio > T::zero() && ratio < T::one());
        let mut values = Vec::with_capacity(count);
        let mut v = start;
        for _ in 0..count {
            values.push(v);
            v *= ratio;
        }
        Schedule { values }
    }

    /// Dyadic schedule `2^-1, ..., 2^-count` scaled by `scale`.
    pub fn dyadic(scale: T, count: usize) -> Self {
        Schedule::geometric(scale * T::of(0.5), T::of(0.5), count)
    }

    pub fn from_values(values: Vec<T>) -> Self {
        assert!(values.windows(2).all(|w| w[1] < w[0]), "schedule must decrease");
        Schedule { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn smallest(&self) -> T {
        *self.values.last().expect("empty schedule")
    }
}

/// Linear-in-parameter Richardson step on the last two members of a sweep:
/// fit `y = y0 + c*t` through `(t1, y1), (t2, y2)` and return `y0`.
pub fn richardson_linear<T: Real>(t1: T, y1: T, t2: T, y2: T) -> T {
    debug_assert!(t2 < t1);
    y2 + (y2 - y1) * t2 / (t1 - t2)
}

/// Richardson step assuming `y = y0 + c*t^order`.
pub fn richardson_power<T: Real>(t1: T, y1: T, t2: T, y2: T, order: T) -> T {
    let s = (t1 / t2).powf(order);
    (s * y2 - y1) / (s - T::one())
}

/// Outcome of extrapolating a scalar sweep: the estimate plus the change in
/// the final step, which serves as the convergence indicator.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolated<T> {
    pub value: T,
    pub last_change: T,
}

/// Extrapolate a scalar sweep `y(t_k)` on a decreasing schedule, linear in `t`.
/// With fewer than two members the last value is returned unextrapolated.
pub fn extrapolate_sweep<T: Real>(ts: &[T], ys: &[T]) -> Extrapolated<T> {
    assert_eq!(ts.len(), ys.len());
    let n = ys.len();
    if n < 2 {
        return Extrapolated { value: ys[n - 1], last_change: T::infinity() };
    }
    let value = richardson_linear(ts[n - 2], ys[n - 2], ts[n - 1], ys[n - 1]);
    Extrapolated { value, last_change: (ys[n - 1] - ys[n - 2]).abs() }
}

/// Extrapolate a scalar sweep on a geometric schedule, estimating the
/// convergence order from the last three members. Falls back to the plain
/// last value when the steps have already hit rounding noise or do not
/// contract. `last_change` is the size of the final correction, the honest
/// convergence indicator.
pub fn extrapolate_sweep_auto<T: Real>(ts: &[T], ys: &[T]) -> Extrapolated<T> {
    assert_eq!(ts.len(), ys.len());
    let n = ys.len();
    if n < 3 {
        return extrapolate_sweep(ts, ys);
    }
    let d1 = ys[n - 2] - ys[n - 3];
    let d2 = ys[n - 1] - ys[n - 2];
    let ratio_t = ts[n - 1] / ts[n - 2];
    let scale = ys[n - 1].abs().max(T::one());
    if d2.abs() <= T::of(1e-15) * scale {
        // Already at rounding level.
        return Extrapolated { value: ys[n - 1], last_change: d2.abs() };
    }
    let contraction = d2 / d1;
    if !(contraction > T::zero() && contraction < T::of(0.95)) {
        // Not a clean geometric tail; use the conservative linear step.
        return extrapolate_sweep(ts, ys);
    }
    // y ~ y0 + C t^p gives d2/d1 = ratio_t^p.
    let correction = d2 * contraction / (T::one() - contraction);
    let _ = ratio_t;
    Extrapolated { value: ys[n - 1] + correction, last_change: correction.abs() }
}

/// Check that a sweep is nodewise monotone in the given direction, up to `tol`.
/// Returns the first offending step and the worst signed violation.
pub fn monotone_violation<T: Real>(
    sweeps: &[Vec<T>],
    nonincreasing: bool,
    tol: T,
) -> Option<(usize, T)> {
    for step in 1..sweeps.len() {
        let mut worst = T::zero();
        for (a, b) in sweeps[step - 1].iter().zip(&sweeps[step]) {
            // nonincreasing: require b <= a + tol
            let v = if nonincreasing { *b - *a } else { *a - *b };
            if v > worst {
                worst = v;
            }
        }
        if worst > tol {
            return Some((step, worst));
        }
    }
    None
}
