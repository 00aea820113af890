//! Principal eigenpair of the operator on a bounded domain, its boundary
//! asymptotics, the comparison weight, and the boundary density.
//!
//! The positive eigenfunction behaves like `c1 * rho(x) |x|^{a-1}` toward the
//! singular boundary point, with `a` the positive characteristic exponent.
//! The constant `c1` depends on the eigenfunction normalization; the duality
//! identities downstream need the normalization in which `c1 = 1`, so the
//! fitted constant is computed here once and carried with the pair.



use crate::discretize::{GridFunction, Potential, SparseSystem};
use crate::error::{Error, Result};
use crate::fit::{fit_constant, fit_loglog_slope, ConstantFit, LineFit};
use crate::geometry::GradedMesh;
use crate::halfspace::{alpha_exponents, SpectralParams};
use crate::real::Real;
use crate::sparse::dot;

/// Principal eigenvalue and positive L2-normalized eigenfunction, plus the
/// fitted boundary constant.
#[derive(Debug, Clone)]
pub struct EigenPair<T> {
    pub ell: T,
    pub gamma: GridFunction<T>,
    pub iterations: usize,
    /// Constant fit of `gamma / (rho |x|^{a-1})` near the singular point:
    /// rescaling gamma by 1/c1_hat matches the half-space normalization.
    pub c1_hat: T,
}

impl<T: Real> EigenPair<T> {
    /// Eigenfunction rescaled so the fitted boundary constant is one; the
    /// weight the duality identities integrate against.
    pub fn boundary_normalized(&self) -> GridFunction<T> {
        self.gamma.scaled(self.c1_hat.recip())
    }
}

/// Default fit window `[lo, hi]` in distance to the singular point: small
/// enough to tame the uncontrolled o(1) corrections, widened if needed so at
/// least eight mesh rings fall inside.
pub fn default_fit_window<T: Real>(mesh: &GradedMesh<T>) -> (T, T) {
    let r = mesh.domain.r_omega();
    let lo = r * T::of(0.02);
    let mut hi = r * T::of(0.0625);
    loop {
        let count = mesh
            .axis_profile()
            .iter()
            .filter(|&&(_, rr)| rr >= lo && rr <= hi)
            .count();
        if count >= 8 || hi >= r * T::of(0.25) {
            return (lo, hi);
        }
        hi *= T::of(1.3);
    }
}

/// Inverse power iteration on the generalized problem `A x = ell M x` with
/// the lumped mass matrix, to a relative eigenvalue change of 1e-10.
pub fn principal_eigenpair<T: Real>(sys: &SparseSystem<T>) -> Result<EigenPair<T>> {
    assert!(
        matches!(sys.potential, Potential::Exact),
        "eigenpairs are defined for the exact potential"
    );
    sys.probe_spd(2024)?;
    let mesh = &sys.mesh;
    let n = mesh.len();
    let zero_bc = GridFunction::zeros(n);

    // Positive start shaped like the distance function.
    let mut x = GridFunction {
        values: (0..n).map(|i| if mesh.boundary[i] { T::zero() } else { mesh.rho[i] }).collect(),
    };
    normalize_lumped(&mut x, mesh);

    let mut ell_prev = T::infinity();
    let mut iterations = 0;
    let max_outer = 400;
    loop {
        iterations += 1;
        if iterations > max_outer {
            return Err(Error::NoConvergence {
                iters: max_outer,
                tol: 1e-10,
                residual: f64::NAN,
            });
        }
        let (mut y, _) = sys.solve_dirichlet(&x, &zero_bc)?;
        normalize_lumped(&mut y, mesh);
        let ell = rayleigh(sys, &y);
        let done = (ell - ell_prev).abs() <= T::of(1e-10) * ell.abs();
        ell_prev = ell;
        x = y;
        if done {
            break;
        }
    }

    // Sign-fix and positivity check.
    let interior_range = |g: &GridFunction<T>| {
        let (mut lo, mut hi) = (T::infinity(), -T::infinity());
        for (i, &v) in g.values.iter().enumerate() {
            if !mesh.boundary[i] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    };
    let (lo, hi) = interior_range(&x);
    if hi.abs() < lo.abs() {
        x = x.scaled(-T::one());
    }
    let (lo, hi) = interior_range(&x);
    if lo <= T::zero() || lo <= -T::of(1e-8) * hi {
        return Err(Error::NegativeMode {
            min: lo.to_f64_lossy(),
            max: hi.to_f64_lossy(),
        });
    }

    let ell = rayleigh(sys, &x);
    let mut pair = EigenPair { ell, gamma: x, iterations, c1_hat: T::one() };
    let (lo_w, hi_w) = default_fit_window(mesh);
    let sp = SpectralParams::new(sys.mu, mesh.domain.dim)?;
    if let Ok(fit) = boundary_constant_fit(&pair, mesh, &sp, lo_w, hi_w) {
        pair.c1_hat = fit.value;
    }
    Ok(pair)
}

fn normalize_lumped<T: Real>(x: &mut GridFunction<T>, mesh: &GradedMesh<T>) {
    let norm = x.l2_norm(mesh);
    if norm > T::zero() {
        let inv = norm.recip();
        for v in &mut x.values {
            *v *= inv;
        }
    }
}

/// Rayleigh quotient in the lumped metric.
pub fn rayleigh<T: Real>(sys: &SparseSystem<T>, u: &GridFunction<T>) -> T {
    let au = sys.apply_full(&u.values);
    let num = dot(&au, &u.values);
    let den: T = u
        .values
        .iter()
        .zip(&sys.mesh.weight)
        .map(|(&v, &w)| v * v * w)
        .sum();
    num / den
}

/// Least-squares slope of `log gamma` against `log r` along the ray through
/// the singular point (the chart axis), over `[r_min, r_max]`.
pub fn gamma_asymptotics_fit<T: Real>(
    pair: &EigenPair<T>,
    mesh: &GradedMesh<T>,
    r_min: T,
    r_max: T,
) -> Result<LineFit<T>> {
    let mut rs = Vec::new();
    let mut vs = Vec::new();
    for (node, r) in mesh.axis_profile() {
        if r >= r_min && r <= r_max {
            rs.push(r);
            vs.push(pair.gamma.values[node]);
        }
    }
    fit_loglog_slope(&rs, &vs, 6)
}

/// The eigenfunction's boundary constant: `gamma / (rho |x|^{a-1})` sampled
/// on the axis window and extrapolated linearly in `r` to its limit at the
/// singular point, which strips the leading correction of the window bias.
pub fn boundary_constant_fit<T: Real>(
    pair: &EigenPair<T>,
    mesh: &GradedMesh<T>,
    sp: &SpectralParams<T>,
    r_min: T,
    r_max: T,
) -> Result<ConstantFit<T>> {
    let mut rs = Vec::new();
    let mut ratios = Vec::new();
    for (node, r) in mesh.axis_profile() {
        if r >= r_min && r <= r_max {
            let envelope = mesh.rho[node] * r.powf(sp.alpha_plus - T::one());
            if envelope > T::zero() {
                rs.push(r);
                ratios.push(pair.gamma.values[node] / envelope);
            }
        }
    }
    let plain = fit_constant(&ratios, 6)?;
    let line = crate::fit::fit_line(&rs, &ratios);
    if line.intercept > T::zero() {
        Ok(ConstantFit { value: line.intercept, drift: plain.drift, n: plain.n })
    } else {
        Ok(plain)
    }
}

/// The comparison weight: solution of `L sigma = gamma / rho*` with zero
/// boundary data, its ratio to the eigenfunction, and the observed bound.
#[derive(Debug, Clone)]
pub struct WeightPair<T> {
    pub sigma: GridFunction<T>,
    pub eta: GridFunction<T>,
    /// Observed supremum of eta (finite by the two-sided comparison).
    pub c2_hat: T,
    /// Worst negative value of sigma - gamma (>= -tolerance when the
    /// comparison holds discretely).
    pub lower_defect: T,
}

/// Solve for the comparison weight. `rho* = min(1/ell, rho)` uses the
/// discrete eigenvalue from the same mesh.
pub fn weight_pair<T: Real>(
    sys: &SparseSystem<T>,
    pair: &EigenPair<T>,
) -> Result<WeightPair<T>> {
    let mesh = &sys.mesh;
    let inv_ell = pair.ell.recip();
    let rhs = GridFunction {
        values: (0..mesh.len())
            .map(|i| {
                let rho_star = mesh.rho[i].min(inv_ell);
                if mesh.boundary[i] || rho_star <= T::zero() {
                    T::zero()
                } else {
                    pair.gamma.values[i] / rho_star
                }
            })
            .collect(),
    };
    let zero_bc = GridFunction::zeros(mesh.len());
    let (sigma, _) = sys.solve_dirichlet(&rhs, &zero_bc)?;

    let mut eta = GridFunction::zeros(mesh.len());
    let mut c2_hat = T::zero();
    let mut lower_defect = T::zero();
    for i in 0..mesh.len() {
        if mesh.boundary[i] {
            eta.values[i] = T::one();
            continue;
        }
        let g = pair.gamma.values[i];
        let s = sigma.values[i];
        let e = s / g;
        eta.values[i] = e;
        c2_hat = c2_hat.max(e);
        lower_defect = lower_defect.min(s - g);
    }
    Ok(WeightPair { sigma, eta, c2_hat, lower_defect })
}

/// Boundary density `-d gamma/dn` recovered by one-sided differencing along
/// the inward normal at two offsets with extrapolation, plus the comparison
/// against the envelope `|x|^{a-1}`.
#[derive(Debug, Clone)]
pub struct BoundaryDensity<T> {
    /// Boundary node ids (origin excluded).
    pub nodes: Vec<usize>,
    pub beta: Vec<T>,
    /// Distance to the singular point per entry.
    pub radius: Vec<T>,
    /// Envelope ratio bounds over the comparison window.
    pub ratio_lo: T,
    pub ratio_hi: T,
}

impl<T: Real> BoundaryDensity<T> {
    /// Log-log slope of beta against |x| over a window.
    pub fn envelope_slope(&self, r_min: T, r_max: T) -> Result<LineFit<T>> {
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for (i, &r) in self.radius.iter().enumerate() {
            if r >= r_min && r <= r_max && self.beta[i] > T::zero() {
                rs.push(r);
                vs.push(self.beta[i]);
            }
        }
        fit_loglog_slope(&rs, &vs, 6)
    }
}

pub fn beta_density<T: Real>(
    pair: &EigenPair<T>,
    mesh: &GradedMesh<T>,
    mu: T,
) -> Result<BoundaryDensity<T>> {
    let (alpha_plus, _) = alpha_exponents(mu, mesh.domain.dim)?;
    let mut nodes = Vec::new();
    let mut beta = Vec::new();
    let mut radius = Vec::new();
    let t1 = mesh.ring_depth(1);
    let t2 = mesh.ring_depth(2);
    for bnode in mesh.boundary_nodes() {
        let n1 = mesh.inward_offset(bnode, 1)?;
        let n2 = mesh.inward_offset(bnode, 2)?;
        let g1 = pair.gamma.values[n1] / t1;
        let g2 = pair.gamma.values[n2] / t2;
        // linear extrapolation of gamma(x - t n)/t to t = 0
        let b = g1 + (g1 - g2) * t1 / (t2 - t1);
        nodes.push(bnode);
        beta.push(b);
        radius.push(mesh.radius[bnode]);
    }

    // Envelope comparison over the window [2h, R/4].
    let lo_w = mesh.h * T::of(2.0);
    let hi_w = mesh.domain.r_omega() * T::of(0.25);
    let mut ratio_lo = T::infinity();
    let mut ratio_hi = T::zero();
    for (i, &r) in radius.iter().enumerate() {
        if r >= lo_w && r <= hi_w {
            let ratio = beta[i] / r.powf(alpha_plus - T::one());
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
        }
    }
    Ok(BoundaryDensity { nodes, beta, radius, ratio_lo, ratio_hi })
}

/// Evaluate the boundary density as a nodal vector over all nodes
/// (zero off the boundary), for surface quadrature.
pub fn beta_as_field<T: Real>(density: &BoundaryDensity<T>, n: usize) -> Vec<T> {
    let mut field = vec![T::zero(); n];
    for (k, &node) in density.nodes.iter().enumerate() {
        field[node] = density.beta[k];
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TangentBall;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::sync::Arc;

    const BESSEL_J0_FIRST_ZERO: f64 = 2.404825557695773;

    fn disk_mesh(h: f64) -> Arc<GradedMesh<f64>> {
        let ball = TangentBall::new(2, 0.5).unwrap();
        Arc::new(GradedMesh::build(ball, h, 2.0).unwrap())
    }

    fn eigen(mesh: &Arc<GradedMesh<f64>>, mu: f64) -> (SparseSystem<f64>, EigenPair<f64>) {
        let sys = SparseSystem::assemble(mesh, mu, Potential::Exact).unwrap();
        let pair = principal_eigenpair(&sys).unwrap();
        (sys, pair)
    }

    #[test]
    fn disk_ground_eigenvalue_matches_bessel_zero() {
        let mesh = disk_mesh(0.02);
        let (sys, pair) = eigen(&mesh, 0.0);
        let exact = (BESSEL_J0_FIRST_ZERO / 0.5).powi(2);
        assert!(
            (pair.ell - exact).abs() <= 0.01 * exact,
            "ell {} vs {exact}",
            pair.ell
        );
        // positivity and normalization
        for i in 0..mesh.len() {
            if !mesh.boundary[i] {
                assert!(pair.gamma.values[i] > 0.0);
            }
        }
        let norm = pair.gamma.l2_norm(&mesh);
        assert!((norm - 1.0).abs() < 1e-10);
        // Rayleigh quotient agreement
        let rq = rayleigh(&sys, &pair.gamma);
        assert!((rq - pair.ell).abs() <= 1e-8 * pair.ell);
    }

    #[test]
    fn eigenvalue_error_shrinks_monotonically() {
        let exact = (BESSEL_J0_FIRST_ZERO / 0.5).powi(2);
        let mut errs = Vec::new();
        for h in [0.06, 0.03, 0.015] {
            let mesh = disk_mesh(h);
            let (_, pair) = eigen(&mesh, 0.0);
            errs.push((pair.ell - exact).abs());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "errors {errs:?}");
    }

    #[test]
    fn eigenvalue_monotone_in_mu() {
        let mesh = disk_mesh(0.04);
        let (_, p0) = eigen(&mesh, 0.0);
        let (_, p1) = eigen(&mesh, 1.0);
        assert!(p1.ell > p0.ell);
    }

    #[test]
    fn rayleigh_minimality_over_random_probes() {
        let mesh = disk_mesh(0.04);
        let (sys, pair) = eigen(&mesh, 0.5);
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let v = crate::discretize::tests::random_bump_combo(&mesh, &mut rng);
            let den: f64 = v
                .values
                .iter()
                .zip(&mesh.weight)
                .map(|(&x, &w)| x * x * w)
                .sum();
            if den < 1e-14 {
                continue;
            }
            let q = sys.quadratic_form(&v) / den;
            assert!(q >= pair.ell * (1.0 - 1e-6), "probe quotient {q} < {}", pair.ell);
        }
    }

    #[test]
    fn axis_slope_recovers_the_exponent() {
        for (mu, expect, tol) in [(0.0, 1.0, 0.05), (-0.5, 0.5f64.sqrt(), 0.03)] {
            let mesh = disk_mesh(0.02);
            let (_, pair) = eigen(&mesh, mu);
            let (lo, hi) = default_fit_window(&mesh);
            let fit = gamma_asymptotics_fit(&pair, &mesh, lo, hi).unwrap();
            assert!(
                (fit.slope - expect).abs() <= tol,
                "mu={mu}: slope {} vs {expect}",
                fit.slope
            );
        }
    }

    #[test]
    fn slope_is_normalization_invariant() {
        let mesh = disk_mesh(0.03);
        let (_, mut pair) = eigen(&mesh, 0.0);
        let (lo, hi) = default_fit_window(&mesh);
        let s1 = gamma_asymptotics_fit(&pair, &mesh, lo, hi).unwrap().slope;
        pair.gamma = pair.gamma.scaled(37.5);
        let s2 = gamma_asymptotics_fit(&pair, &mesh, lo, hi).unwrap().slope;
        assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let mesh = disk_mesh(0.03);
        let (_, pair) = eigen(&mesh, 0.0);
        assert!(matches!(
            gamma_asymptotics_fit(&pair, &mesh, 0.1, 0.100001),
            Err(Error::WindowTooNarrow { .. })
        ));
    }

    #[test]
    fn weight_pair_comparison() {
        let mesh = disk_mesh(0.03);
        let (sys, pair) = eigen(&mesh, 0.0);
        let wp = weight_pair(&sys, &pair).unwrap();
        assert!(wp.lower_defect >= -1e-6, "sigma >= gamma failed: {}", wp.lower_defect);
        assert!(wp.c2_hat.is_finite() && wp.c2_hat < 20.0, "c2_hat {}", wp.c2_hat);
        for i in 0..mesh.len() {
            assert!(wp.eta.values[i] >= 1.0 - 1e-6);
        }
        // linearity witness: doubling the right side doubles sigma, not eta's shape
        let rhs2 = GridFunction {
            values: (0..mesh.len())
                .map(|i| {
                    let rho_star = mesh.rho[i].min(1.0 / pair.ell);
                    if mesh.boundary[i] {
                        0.0
                    } else {
                        2.0 * pair.gamma.values[i] / rho_star
                    }
                })
                .collect(),
        };
        let zero = GridFunction::zeros(mesh.len());
        let (sigma2, _) = sys.solve_dirichlet(&rhs2, &zero).unwrap();
        for i in 0..mesh.len() {
            assert!((sigma2.values[i] - 2.0 * wp.sigma.values[i]).abs() <= 1e-8);
        }
    }

    #[test]
    fn beta_density_positive_and_flat_for_harmonic_case() {
        let mesh = disk_mesh(0.03);
        let (_, pair) = eigen(&mesh, 0.0);
        let bd = beta_density(&pair, &mesh, 0.0).unwrap();
        for &b in &bd.beta {
            assert!(b > 0.0);
        }
        // alpha_+ - 1 = 0: the density is comparable to a constant away from 0
        let lo = 2.0 * mesh.h;
        let hi = mesh.domain.r_omega() * 0.25;
        let mut mx: f64 = 0.0;
        let mut mn = f64::INFINITY;
        for (i, &r) in bd.radius.iter().enumerate() {
            if r >= lo && r <= hi {
                mx = mx.max(bd.beta[i]);
                mn = mn.min(bd.beta[i]);
            }
        }
        assert!(mx / mn <= 3.0, "far-boundary ratio {}", mx / mn);
        assert!(bd.ratio_lo > 0.0 && bd.ratio_hi.is_finite());
    }

    #[test]
    fn meridian_ball_eigenvalue_matches_the_closed_form() {
        // first Dirichlet eigenvalue of the ball of radius c is (pi/c)^2,
        // and its eigenfunction is zonal, so the meridian discretization
        // must reproduce it
        let ball = TangentBall::new(3, 0.5).unwrap();
        let mesh = Arc::new(GradedMesh::build(ball, 0.025, 2.0).unwrap());
        let sys = SparseSystem::assemble(&mesh, 0.0, Potential::Exact).unwrap();
        let pair = principal_eigenpair(&sys).unwrap();
        let exact = (std::f64::consts::PI / 0.5).powi(2);
        assert!(
            (pair.ell - exact).abs() <= 0.02 * exact,
            "ell {} vs {exact}",
            pair.ell
        );
    }

    #[test]
    fn beta_envelope_slope_for_strong_coupling() {
        // for mu = 3 the boundary density scales like |x|^{a_+ - 1} = |x|
        let mesh = disk_mesh(0.02);
        let (_, pair) = eigen(&mesh, 3.0);
        let bd = beta_density(&pair, &mesh, 3.0).unwrap();
        let fit = bd.envelope_slope(2.0 * mesh.h, 0.25).unwrap();
        assert!((fit.slope - 1.0).abs() <= 0.1, "slope {}", fit.slope);
    }

    #[test]
    fn boundary_constant_fit_matches_the_exact_disk_mode() {
        // For mu = 0 the eigenfunction is a Bessel mode with closed-form
        // boundary constant: c1 = Z J1(z0) z0 / c with Z the L2 normalizer
        // 1/(c sqrt(pi) J1(z0)), so c1 = z0/(c^2 sqrt(pi)).
        let c = 0.5;
        let exact_c1 = BESSEL_J0_FIRST_ZERO / (c * c * std::f64::consts::PI.sqrt());
        let mesh = disk_mesh(0.015);
        let (_, pair) = eigen(&mesh, 0.0);
        assert!(
            (pair.c1_hat - exact_c1).abs() <= 0.05 * exact_c1,
            "c1_hat {} vs {exact_c1}",
            pair.c1_hat
        );
    }
}
