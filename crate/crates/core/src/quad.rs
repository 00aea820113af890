//! Quadrature rules: Gauss-Legendre panels, half-sphere rules, and the
//! excised radial integrals used by the distributional identities.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_sweep_auto, Schedule};
use crate::real::Real;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of(n as f64);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut x = T::of(theta.cos());
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::of(1e-16) * x.abs().max(T::one()) {
                break;
            }
        }
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    // Guard against drift in the symmetric middle node for odd n.
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
        let (_, d) = legendre(n, T::zero());
        weights[n / 2] = T::of(2.0) / (d * d);
    }
    let _ = nf;
    (nodes, weights)
}

/// Legendre P_n and its derivative at x.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::of(k as f64);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = T::of(n as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Integrate f on [a, b] with an n-point Gauss-Legendre rule.
pub fn integrate_gl<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, n: usize) -> T {
    let (xs, ws) = gauss_legendre::<T>(n);
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let mut acc = T::zero();
    for (&x, &w) in xs.iter().zip(&ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate f on [a, b] splitting into dyadic panels refined toward `a`,
/// which keeps mild endpoint singularities (log terms, kinks) harmless.
pub fn integrate_dyadic<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, panels: usize, n: usize) -> T {
    assert!(b > a);
    let mut acc = T::zero();
    let mut hi = b;
    let len = b - a;
    for k in 1..=panels {
        let lo = if k == panels {
            a
        } else {
            a + len * T::of(0.5).powi(k as i32)
        };
        acc += integrate_gl(f, lo, hi, n);
        hi = lo;
    }
    acc
}

/// Quadrature rule on the upper half-sphere S^{N-1}_+.
///
/// N = 2 and N = 3 use tensorized Gauss rules in angular charts and are exact
/// to machine precision for the smooth integrands that appear here. Higher N
/// falls back to stratified Monte Carlo and carries its own error estimate.
#[derive(Debug, Clone)]
pub enum HemisphereRule {
    /// Half-circle $\theta \in (0, \pi)$, Gauss with `points` nodes.
    Gauss2 { points: usize },
    /// Upper half-sphere in R^3, Gauss in cos(polar) x uniform azimuth.
    Gauss3 { points: usize },
    /// Stratified Monte Carlo over the hemisphere in R^N, `strata` shells of
    /// `per_stratum` samples.
    Stratified { dim: usize, strata: usize, per_stratum: usize, seed: u64 },
}

impl HemisphereRule {
    /// Default rule for a given dimension.
    pub fn for_dim(dim: usize) -> Self {
        match dim {
            2 => HemisphereRule::Gauss2 { points: 64 },
            3 => HemisphereRule::Gauss3 { points: 64 },
            _ => HemisphereRule::Stratified { dim, strata: 32, per_stratum: 4096, seed: 7 },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HemisphereRule::Gauss2 { .. } => 2,
            HemisphereRule::Gauss3 { .. } => 3,
            HemisphereRule::Stratified { dim, .. } => *dim,
        }
    }

    /// Integral of `f(sigma)` over the half-sphere; `f` receives the unit
    /// vector's last coordinate (everything integrated here is zonal).
    /// Returns the estimate and a one-sigma error bound (zero for Gauss).
    pub fn integrate_zonal<T: Real>(&self, f: &dyn Fn(T) -> T) -> (T, T) {
        match self {
            HemisphereRule::Gauss2 { points } => {
                // sigma = (cos theta, sin theta), theta in (0, pi); sigma_N = sin theta.
                let v = integrate_gl(&|theta: T| f(theta.sin()), T::zero(), T::pi(), *points);
                (v, T::zero())
            }
            HemisphereRule::Gauss3 { points } => {
                // t = cos(polar angle) in (0,1), dS = 2 pi dt on the unit hemisphere.
                let v = integrate_gl(&|t: T| f(t), T::zero(), T::one(), *points);
                (v * T::of(2.0) * T::pi(), T::zero())
            }
            HemisphereRule::Stratified { dim, strata, per_stratum, seed } => {
                stratified_zonal::<T>(*dim, *strata, *per_stratum, *seed, f)
            }
        }
    }
}

/// Stratified MC over sigma_N in (0,1): the hemisphere is sliced into bands of
/// equal sigma_N-width; each band's surface measure is integrated exactly in
/// the zonal coordinate and sampled uniformly within the band.
fn stratified_zonal<T: Real>(
    dim: usize,
    strata: usize,
    per_stratum: usize,
    seed: u64,
    f: &dyn Fn(T) -> T,
) -> (T, T) {
    // Surface measure on S^{N-1}: dS = |S^{N-2}| (1-t^2)^{(N-3)/2} dt with t = sigma_N.
    let sphere_nm2 = unit_sphere_area::<T>(dim - 1);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut total = T::zero();
    let mut var = T::zero();
    for s in 0..strata {
        let lo = s as f64 / strata as f64;
        let hi = (s + 1) as f64 / strata as f64;
        // Band measure by high-order Gauss in t.
        let band = integrate_gl(
            &|t: T| (T::one() - t * t).powf(T::of((dim as f64 - 3.0) / 2.0)),
            T::of(lo),
            T::of(hi),
            16,
        ) * sphere_nm2;
        let mut mean = T::zero();
        let mut m2 = T::zero();
        for i in 0..per_stratum {
            let t = T::of(rng.gen_range(lo..hi));
            // importance weight: density within band proportional to (1-t^2)^{(N-3)/2}
            let w = (T::one() - t * t).powf(T::of((dim as f64 - 3.0) / 2.0));
            let val = f(t) * w;
            let delta = val - mean;
            mean += delta / T::of((i + 1) as f64);
            m2 += delta * (val - mean);
        }
        // normalize: E[f w] / E[w] * band; estimate E[w] by the same grid
        let wbar = integrate_gl(
            &|t: T| (T::one() - t * t).powf(T::of((dim as f64 - 3.0) / 2.0)),
            T::of(lo),
            T::of(hi),
            16,
        ) / T::of(hi - lo);
        total += mean / wbar * band;
        let n = T::of(per_stratum as f64);
        var += m2 / (n * (n - T::one())) * (band / wbar) * (band / wbar);
    }
    (total, var.sqrt())
}

/// Area of the unit sphere S^{m-1} in R^m.
pub fn unit_sphere_area<T: Real>(m: usize) -> T {
    // |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2)
    let half_m = m as f64 / 2.0;
    T::of(2.0 * std::f64::consts::PI.powf(half_m) / gamma_fn(half_m))
}

fn gamma_fn(x: f64) -> f64 {
    // Lanczos approximation, good to ~1e-13 for the small arguments used here.
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const C: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, &c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// The excised radial integral `\int_eps^b f(r) dr` evaluated on a dyadic
/// epsilon schedule and Richardson-extrapolated to eps -> 0.
///
/// Returns (extrapolated value, per-step values). Fails if the tail of the
/// sweep still moves by more than `tol` relative to the result scale.
pub fn excised_radial_limit<T: Real>(
    f: &dyn Fn(T) -> T,
    b: T,
    schedule: &Schedule<T>,
    tol: T,
) -> Result<(T, Vec<(T, T)>)> {
    assert!(schedule.len() >= 2, "need at least two excision radii");
    let mut steps = Vec::with_capacity(schedule.len());
    // Integrate outer part [eps_0, b] once, then accumulate ring integrals.
    let eps = schedule.values();
    let mut acc = integrate_dyadic(f, eps[0], b, 24, 16);
    steps.push((eps[0], acc));
    for k in 1..eps.len() {
        acc += integrate_dyadic(f, eps[k], eps[k - 1], 8, 16);
        steps.push((eps[k], acc));
    }
    let ts: Vec<T> = steps.iter().map(|s| s.0).collect();
    let ys: Vec<T> = steps.iter().map(|s| s.1).collect();
    let ext = extrapolate_sweep_auto(&ts, &ys);
    let scale = ext.value.abs().max(T::one());
    if ext.last_change > tol * scale {
        return Err(Error::QuadratureUnconverged {
            change: ext.last_change.to_f64_lossy(),
            tol: (tol * scale).to_f64_lossy(),
        });
    }
    Ok((ext.value, steps))
}
