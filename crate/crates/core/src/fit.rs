//! Least-squares diagnostics: log-log slope fits and constant fits.
//!
//! The asymptotic laws checked by this crate all have uncontrolled `o(1)`
//! corrections, so every fit reports a confidence half-width alongside the
//! point estimate and the caller decides whether the window was wide enough.

use crate::error::{Error, Result};
use crate::real::Real;

/// Result of a straight-line fit `y = a + b x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit<T> {
    pub intercept: T,
    pub slope: T,
    /// Standard error of the slope (zero when the fit is exact).
    pub slope_se: T,
    pub n: usize,
}

/// Ordinary least squares through `(x_i, y_i)`.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> LineFit<T> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!(n >= 2, "line fit needs at least two points");
    let nf = T::of(n as f64);
    let mx = xs.iter().copied().sum::<T>() / nf;
    let my = ys.iter().copied().sum::<T>() / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    let slope_se = if n > 2 {
        (ss_res / (T::of((n - 2) as f64) * sxx)).sqrt()
    } else {
        T::zero()
    };
    LineFit { intercept, slope, slope_se, n }
}

/// Slope of `log y` against `log x`; all samples must be positive.
///
/// `min_points` guards against windows too narrow to mean anything.
pub fn fit_loglog_slope<T: Real>(rs: &[T], vals: &[T], min_points: usize) -> Result<LineFit<T>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&r, &v) in rs.iter().zip(vals) {
        if r > T::zero() && v > T::zero() {
            xs.push(r.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < min_points {
        let (lo, hi) = window_of(rs);
        return Err(Error::WindowTooNarrow {
            lo,
            hi,
            found: xs.len(),
            need: min_points,
        });
    }
    Ok(fit_line(&xs, &ys))
}

/// Constant-model fit: mean value plus the max relative drift across the window.
#[derive(Debug, Clone, Copy)]
pub struct ConstantFit<T> {
    pub value: T,
    /// max |v_i - mean| / |mean|
    pub drift: T,
    pub n: usize,
}

pub fn fit_constant<T: Real>(vals: &[T], min_points: usize) -> Result<ConstantFit<T>> {
    if vals.len() < min_points {
        return Err(Error::WindowTooNarrow {
            lo: 0.0,
            hi: 0.0,
            found: vals.len(),
            need: min_points,
        });
    }
    let n = vals.len();
    let mean = vals.iter().copied().sum::<T>() / T::of(n as f64);
    let mut drift = T::zero();
    for &v in vals {
        let d = (v - mean).abs();
        if d > drift {
            drift = d;
        }
    }
    let denom = mean.abs().max(T::of(1e-300));
    Ok(ConstantFit { value: mean, drift: drift / denom, n })
}

fn window_of<T: Real>(rs: &[T]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &r in rs {
        let r = r.to_f64_lossy();
        if r < lo {
            lo = r;
        }
        if r > hi {
            hi = r;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_slope() {
        let rs: Vec<f64> = (1..=10).map(|i| 0.01 * i as f64).collect();
        let vals: Vec<f64> = rs.iter().map(|r| 3.0 * r.powf(1.7)).collect();
        let fit = fit_loglog_slope(&rs, &vals, 6).unwrap();
        assert!((fit.slope - 1.7).abs() < 1e-12);
        assert!(fit.slope_se < 1e-12);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let rs = [0.1f64, 0.2];
        let vals = [1.0f64, 2.0];
        assert!(matches!(
            fit_loglog_slope(&rs, &vals, 6),
            Err(Error::WindowTooNarrow { .. })
        ));
    }

    #[test]
    fn constant_fit_reports_drift() {
        let fit = fit_constant(&[1.0f64, 1.1, 0.9], 3).unwrap();
        assert!((fit.value - 1.0).abs() < 1e-12);
        assert!((fit.drift - 0.1).abs() < 1e-12);
    }
}
