//! Exact objects of the Hardy-Schrodinger operator on the half-space.
//!
//! The operator `L u = -lap(u) + mu/|x|^2 u` on R^N_+ with the potential
//! singularity at the boundary point 0 admits explicit separable solutions
//! `r^alpha psi1(sigma)` with `psi1(sigma) = sigma_N` the first Dirichlet
//! eigenfunction of the half-sphere. This module evaluates those solutions,
//! their characteristic exponents, the normalization constant `c_mu` of the
//! singular one, and verifies by quadrature that the singular solution
//! reproduces a Dirac mass at the origin in the weighted duality.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extrapolate::Schedule;
use crate::quad::{excised_radial_limit, HemisphereRule};
use crate::real::Real;

/// Coupling constant, dimension, and the derived exponent data.
#[derive(Debug, Clone, Copy)]
pub struct SpectralParams<T> {
    pub mu: T,
    pub dim: usize,
    /// Critical coupling -N^2/4; the operator is unbounded below past it.
    pub mu1: T,
    pub alpha_plus: T,
    pub alpha_minus: T,
    /// True exactly at the critical coupling, where the exponents collide.
    pub critical: bool,
}

impl<T: Real> SpectralParams<T> {
    pub fn new(mu: T, dim: usize) -> Result<Self> {
        assert!(dim >= 2, "dimension must be >= 2");
        let mu1 = critical_coupling::<T>(dim);
        if mu < mu1 {
            return Err(Error::MuBelowCritical {
                mu: mu.to_f64_lossy(),
                mu1: mu1.to_f64_lossy(),
                dim,
            });
        }
        let (alpha_plus, alpha_minus) = alpha_exponents(mu, dim)?;
        Ok(SpectralParams {
            mu,
            dim,
            mu1,
            alpha_plus,
            alpha_minus,
            critical: mu == mu1,
        })
    }

    /// sqrt(mu - mu1), half the gap between the exponents.
    pub fn exponent_gap_half(&self) -> T {
        (self.mu - self.mu1).max(T::zero()).sqrt()
    }
}

/// The critical coupling -N^2/4 (exactly representable for integer N).
pub fn critical_coupling<T: Real>(dim: usize) -> T {
    -T::of((dim * dim) as f64) / T::of(4.0)
}

/// Indicial polynomial of the separable ansatz: alpha^2 + (N-2) alpha - lambda - mu.
pub fn indicial<T: Real>(alpha: T, lambda: T, mu: T, dim: usize) -> T {
    alpha * alpha + T::of((dim - 2) as f64) * alpha - lambda - mu
}

/// Characteristic exponents of the ground angular mode:
/// `(2-N)/2 +- sqrt(mu + N^2/4)`.
pub fn alpha_exponents<T: Real>(mu: T, dim: usize) -> Result<(T, T)> {
    assert!(dim >= 2, "dimension must be >= 2");
    let mu1 = critical_coupling::<T>(dim);
    if mu < mu1 {
        return Err(Error::MuBelowCritical {
            mu: mu.to_f64_lossy(),
            mu1: mu1.to_f64_lossy(),
            dim,
        });
    }
    let half = T::of((2 - dim as i64) as f64) / T::of(2.0);
    let root = (mu - mu1).max(T::zero()).sqrt();
    Ok((half + root, half - root))
}

/// k-th Dirichlet eigenvalue of the Laplace-Beltrami operator on the
/// half-sphere: `k (N + k - 2)`.
pub fn mode_eigenvalue<T: Real>(k: i64, dim: usize) -> Result<T> {
    if k < 1 {
        return Err(Error::BadIndex { k });
    }
    assert!(dim >= 2, "dimension must be >= 2");
    Ok(T::of((k * (dim as i64 + k - 2)) as f64))
}

/// Angular mode index with its eigenvalue and characteristic exponents.
#[derive(Debug, Clone, Copy)]
pub struct HalfSphereMode<T> {
    pub k: i64,
    pub lambda: T,
    pub alpha_plus: T,
    pub alpha_minus: T,
}

impl<T: Real> HalfSphereMode<T> {
    pub fn new(k: i64, dim: usize, mu: T) -> Result<Self> {
        let lambda = mode_eigenvalue::<T>(k, dim)?;
        // Discriminant of the indicial polynomial for this mode.
        let quarter = T::of(((dim - 2) * (dim - 2)) as f64) / T::of(4.0);
        let disc = mu + lambda + quarter;
        if disc < T::zero() {
            return Err(Error::MuBelowCritical {
                mu: mu.to_f64_lossy(),
                mu1: (-lambda - quarter).to_f64_lossy(),
                dim,
            });
        }
        let half = T::of((2 - dim as i64) as f64) / T::of(2.0);
        let root = disc.sqrt();
        Ok(HalfSphereMode {
            k,
            lambda,
            alpha_plus: half + root,
            alpha_minus: half - root,
        })
    }
}

/// Point of the open half-space in spherical form: radius and the last
/// component of the unit direction (all objects here are zonal).
#[derive(Debug, Clone, Copy)]
pub struct HalfSpacePoint<T> {
    pub r: T,
    pub sigma_n: T,
}

impl<T: Real> HalfSpacePoint<T> {
    pub fn new(r: T, sigma_n: T) -> Self {
        assert!(r > T::zero(), "radius must be positive");
        assert!(
            sigma_n > T::zero() && sigma_n <= T::one(),
            "direction must point into the half-space"
        );
        HalfSpacePoint { r, sigma_n }
    }

    /// Point on the symmetry axis (sigma = e_N).
    pub fn on_axis(r: T) -> Self {
        HalfSpacePoint::new(r, T::one())
    }

    /// From Cartesian coordinates with positive last component.
    pub fn from_cartesian(x: &[T]) -> Self {
        let r = x.iter().map(|&c| c * c).sum::<T>().sqrt();
        let xn = *x.last().expect("empty coordinate vector");
        HalfSpacePoint::new(r, xn / r)
    }
}

/// First Dirichlet mode of the half-sphere, `psi1(sigma) = sigma_N`,
/// normalized to 1 at the pole.
pub fn psi1<T: Real>(p: &HalfSpacePoint<T>) -> T {
    p.sigma_n
}

/// The bounded positive separable solution `r^{alpha_+} psi1(sigma)`.
pub fn gamma_mu<T: Real>(p: &HalfSpacePoint<T>, sp: &SpectralParams<T>) -> T {
    p.r.powf(sp.alpha_plus) * p.sigma_n
}

/// The singular positive separable solution: `r^{alpha_-} psi1` above the
/// critical coupling, `r^{(2-N)/2} ln(1/r) psi1` at it (only for r < 1).
pub fn phi_mu<T: Real>(p: &HalfSpacePoint<T>, sp: &SpectralParams<T>) -> Result<T> {
    if sp.critical {
        if p.r >= T::one() {
            return Err(Error::CriticalRange { r: p.r.to_f64_lossy() });
        }
        Ok(p.r.powf(sp.alpha_minus) * p.r.recip().ln() * p.sigma_n)
    } else {
        Ok(p.r.powf(sp.alpha_minus) * p.sigma_n)
    }
}

/// Integral of psi1^2 over the half-sphere, with the N = 2, 3 closed forms
/// (pi/2 and 2 pi/3) asserted against the quadrature.
pub fn psi1_squared_integral<T: Real>(rule: &HemisphereRule) -> Result<T> {
    let (quad, mc_err) = rule.integrate_zonal(&|s: T| s * s);
    match rule.dim() {
        2 => check_against_closed_form(quad, T::pi() / T::of(2.0)),
        3 => check_against_closed_form(quad, T::of(2.0) * T::pi() / T::of(3.0)),
        _ => {
            let tol = T::of(1e-2) * quad.abs();
            if mc_err > tol {
                return Err(Error::QuadratureUnconverged {
                    change: mc_err.to_f64_lossy(),
                    tol: tol.to_f64_lossy(),
                });
            }
            Ok(quad)
        }
    }
}

fn check_against_closed_form<T: Real>(quad: T, exact: T) -> Result<T> {
    let tol = T::of(1e-10) * exact;
    if (quad - exact).abs() > tol {
        return Err(Error::QuadratureUnconverged {
            change: (quad - exact).abs().to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    Ok(exact)
}

/// Normalization constant of the singular solution in the weighted duality:
/// `2 sqrt(mu - mu1) \int psi1^2` above critical, `\int psi1^2` at critical.
pub fn c_mu<T: Real>(sp: &SpectralParams<T>, rule: &HemisphereRule) -> Result<T> {
    assert_eq!(rule.dim(), sp.dim, "quadrature rule dimension mismatch");
    let i = psi1_squared_integral::<T>(rule)?;
    if sp.critical {
        Ok(i)
    } else {
        Ok(T::of(2.0) * sp.exponent_gap_half() * i)
    }
}

// ---------------------------------------------------------------------------
// Radial test functions zeta(x) = g(|x|^2)
// ---------------------------------------------------------------------------

/// Compactly supported radial profile `g(s)`, `s = |x|^2`, with two
/// derivatives available in closed form.
///
/// For these profiles the drift term of the dual operator collapses to
/// `-4 alpha_+ g'(s)` with no 1/x_N left over, so the dual operator needs no
/// numerical differentiation near the boundary.
pub trait RadialProfile<T>: Send + Sync {
    fn g(&self, s: T) -> T;
    fn dg(&self, s: T) -> T;
    fn d2g(&self, s: T) -> T;
    /// Support bound: g vanishes for s >= s_max.
    fn s_max(&self) -> T;
}

/// `amp * (1 - s/s_max)_+^2`. Matches the classical test profile; its second
/// derivative jumps at the support edge, which the panel quadrature absorbs.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticBump<T> {
    pub s_max: T,
    pub amp: T,
}

impl<T: Real> RadialProfile<T> for QuadraticBump<T> {
    fn g(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() { self.amp * t * t } else { T::zero() }
    }
    fn dg(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() { -T::of(2.0) * self.amp * t / self.s_max } else { T::zero() }
    }
    fn d2g(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() { T::of(2.0) * self.amp / (self.s_max * self.s_max) } else { T::zero() }
    }
    fn s_max(&self) -> T {
        self.s_max
    }
}

/// `amp * (1 - s/s_max)_+^3`, C^2 across the support edge.
#[derive(Debug, Clone, Copy)]
pub struct CubicBump<T> {
    pub s_max: T,
    pub amp: T,
}

impl<T: Real> RadialProfile<T> for CubicBump<T> {
    fn g(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() { self.amp * t * t * t } else { T::zero() }
    }
    fn dg(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() { -T::of(3.0) * self.amp * t * t / self.s_max } else { T::zero() }
    }
    fn d2g(&self, s: T) -> T {
        let t = T::one() - s / self.s_max;
        if t > T::zero() {
            T::of(6.0) * self.amp * t / (self.s_max * self.s_max)
        } else {
            T::zero()
        }
    }
    fn s_max(&self) -> T {
        self.s_max
    }
}

/// A radial test function together with the closed forms the identities need.
#[derive(Clone)]
pub struct RadialTest<T> {
    profile: Arc<dyn RadialProfile<T>>,
}

impl<T: Real> RadialTest<T> {
    pub fn new(profile: Arc<dyn RadialProfile<T>>) -> Self {
        RadialTest { profile }
    }

    pub fn quadratic(s_max: T, amp: T) -> Self {
        RadialTest::new(Arc::new(QuadraticBump { s_max, amp }))
    }

    pub fn cubic(s_max: T, amp: T) -> Self {
        RadialTest::new(Arc::new(CubicBump { s_max, amp }))
    }

    pub fn s_max(&self) -> T {
        self.profile.s_max()
    }

    /// zeta at squared radius s.
    pub fn value_sq(&self, s: T) -> T {
        self.profile.g(s)
    }

    pub fn at_origin(&self) -> T {
        self.profile.g(T::zero())
    }

    /// grad zeta = factor * x with factor = 2 g'(s).
    pub fn gradient_factor(&self, s: T) -> T {
        T::of(2.0) * self.profile.dg(s)
    }

    /// -lap zeta = -(2 N g' + 4 s g'').
    pub fn neg_laplacian_sq(&self, s: T, dim: usize) -> T {
        -(T::of((2 * dim) as f64) * self.profile.dg(s) + T::of(4.0) * s * self.profile.d2g(s))
    }

    /// Dual operator on the half-space applied to zeta, as a function of s:
    /// `-lap zeta - (2/gamma)<grad gamma, grad zeta> = -lap zeta - 4 alpha_+ g'`.
    pub fn lstar_halfspace_sq(&self, s: T, sp: &SpectralParams<T>) -> T {
        self.neg_laplacian_sq(s, sp.dim) - T::of(4.0) * sp.alpha_plus * self.profile.dg(s)
    }
}

// ---------------------------------------------------------------------------
// The Dirac identity on the half-space
// ---------------------------------------------------------------------------

/// Quadrature plan for the identity: half-sphere rule, excision schedule for
/// the radial factor, and the convergence tolerance of the extrapolation.
#[derive(Debug, Clone)]
pub struct DiracQuadrature<T> {
    pub hemisphere: HemisphereRule,
    pub excision: Schedule<T>,
    pub tol: T,
}

impl<T: Real> DiracQuadrature<T> {
    pub fn standard(dim: usize) -> Self {
        DiracQuadrature {
            hemisphere: HemisphereRule::for_dim(dim),
            excision: Schedule::geometric(T::of(0.25), T::of(0.5), 14),
            tol: T::of(1e-7),
        }
    }
}

/// Both sides of the identity plus the relative residual and the
/// pre-extrapolation sweep of the excised radial integral.
#[derive(Debug, Clone)]
pub struct DiracCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    pub sweep: Vec<(T, T)>,
}

/// Verifies `\int phi_mu (L* zeta) d(gamma_mu dx) = c_mu zeta(0)` for a radial
/// test function by excised quadrature with extrapolation of the excision
/// radius to zero.
///
/// For radial zeta the integral separates: the angular factor is
/// `\int psi1^2 dS` and the radial factor is one-dimensional, with the weight
/// `r^{2-N} psi1^2` of the pairing cancelling the Jacobian exactly (an extra
/// `ln(1/r)` appears at the critical coupling).
pub fn dirac_identity_residual<T: Real>(
    zeta: &RadialTest<T>,
    sp: &SpectralParams<T>,
    quad: &DiracQuadrature<T>,
) -> Result<DiracCheck<T>> {
    let angular = psi1_squared_integral::<T>(&quad.hemisphere)?;
    let cmu = c_mu(sp, &quad.hemisphere)?;
    let rhs = cmu * zeta.at_origin();

    let b = zeta.s_max().sqrt();
    if sp.critical && b > T::one() {
        return Err(Error::CriticalRange { r: b.to_f64_lossy() });
    }
    let critical = sp.critical;
    let sp_copy = *sp;
    let zeta_c = zeta.clone();
    let radial = move |r: T| {
        let s = r * r;
        let base = r * zeta_c.lstar_halfspace_sq(s, &sp_copy);
        if critical { base * r.recip().ln() } else { base }
    };
    let (radial_val, sweep) = excised_radial_limit(&radial, b, &quad.excision, quad.tol)?;
    let lhs = angular * radial_val;
    let residual = (lhs - rhs).abs() / rhs.abs().max(T::one());
    Ok(DiracCheck { lhs, rhs, residual, sweep })
}

// ---------------------------------------------------------------------------
// Residual of the separable solutions under the operator itself
// ---------------------------------------------------------------------------

/// Which separable field to push through the spherical form of the operator.
#[derive(Debug, Clone, Copy)]
pub enum Separable<T> {
    /// The bounded solution r^{alpha_+} psi1.
    Gamma,
    /// The singular solution (log branch at the critical coupling).
    Phi,
    /// A probe power r^{a} psi1 that is not expected to solve the equation.
    Power(T),
}

/// Evaluates `-u_rr - (N-1)/r u_r - lap' u / r^2 + mu u / r^2` for the chosen
/// separable field from closed-form derivatives and returns |result|. Exact
/// solutions cancel to rounding; a probe power returns
/// `|indicial(a)| r^{a-2} psi1`.
pub fn separable_residual<T: Real>(
    p: &HalfSpacePoint<T>,
    sp: &SpectralParams<T>,
    kind: Separable<T>,
) -> T {
    let n1 = T::of((sp.dim - 1) as f64);
    let r = p.r;
    let psi = p.sigma_n;
    match kind {
        Separable::Phi if sp.critical => {
            // u = r^beta ln(1/r) psi, beta = (2-N)/2.
            let beta = sp.alpha_minus;
            let l = r.recip().ln();
            let u = r.powf(beta) * l * psi;
            let u_r = r.powf(beta - T::one()) * (beta * l - T::one()) * psi;
            let u_rr = r.powf(beta - T::of(2.0))
                * (beta * (beta - T::one()) * l - (T::of(2.0) * beta - T::one()))
                * psi;
            let lap_ang = -n1 * u; // lap' psi1 = -(N-1) psi1
            (-u_rr - n1 / r * u_r - lap_ang / (r * r) + sp.mu * u / (r * r)).abs()
        }
        Separable::Gamma | Separable::Phi | Separable::Power(_) => {
            let a = match kind {
                Separable::Gamma => sp.alpha_plus,
                Separable::Phi => sp.alpha_minus,
                Separable::Power(a) => a,
            };
            let u = r.powf(a) * psi;
            let u_r = a * r.powf(a - T::one()) * psi;
            let u_rr = a * (a - T::one()) * r.powf(a - T::of(2.0)) * psi;
            let lap_ang = -n1 * u;
            (-u_rr - n1 / r * u_r - lap_ang / (r * r) + sp.mu * u / (r * r)).abs()
        }
    }
}

/// Pointwise witness of the pairing weight: above the critical coupling
/// `gamma_mu * phi_mu = r^{2-N} psi1^2`.
pub fn pairing_weight_identity<T: Real>(p: &HalfSpacePoint<T>, sp: &SpectralParams<T>) -> (T, T) {
    let product = gamma_mu(p, sp) * phi_mu(p, sp).expect("noncritical pairing");
    let closed = p.r.powf(T::of((2 - sp.dim as i64) as f64)) * p.sigma_n * p.sigma_n;
    (product, closed)
}
