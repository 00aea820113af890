//! Kernel constructions on the bounded domain: the regularized Poisson
//! solution and its limit, the vanishing of the kernel at the singular
//! boundary point, the reduced-measure gap, and the singular kernel built by
//! exhaustion with explicit half-space data.

use std::sync::Arc;

use crate::discretize::{GridFunction, Potential, SparseSystem};
use crate::error::{Error, Result};
use crate::extrapolate::{monotone_violation, richardson_linear, Schedule};
use crate::fit::{fit_constant, fit_loglog_slope, ConstantFit, LineFit};
use crate::geometry::GradedMesh;
use crate::halfspace::{c_mu, phi_mu, HalfSpacePoint, RadialTest, SpectralParams};
use crate::quad::HemisphereRule;
use crate::pairing::DualityWeight;
use crate::real::Real;

/// Boundary measure as a smooth density away from the singular point plus an
/// atom there, realized by a unit-mass mollifier of prescribed width.
#[derive(Debug, Clone)]
pub struct BoundaryDatum<T> {
    /// Nodal density on boundary nodes (zero elsewhere and at the origin).
    pub density: Vec<T>,
    pub atom_mass: T,
    pub atom_width: T,
}

impl<T: Real> BoundaryDatum<T> {
    pub fn zero(mesh: &GradedMesh<T>) -> Self {
        BoundaryDatum {
            density: vec![T::zero(); mesh.len()],
            atom_mass: T::zero(),
            atom_width: T::zero(),
        }
    }

    /// Density from a function of the boundary point.
    pub fn from_fn(mesh: &GradedMesh<T>, f: impl Fn([T; 2]) -> T) -> Self {
        let mut density = vec![T::zero(); mesh.len()];
        for node in mesh.boundary_nodes() {
            density[node] = f(mesh.coords[node]);
        }
        BoundaryDatum { density, atom_mass: T::zero(), atom_width: T::zero() }
    }

    /// Unit-mass cosine bump centered at boundary arclength `center` (measured
    /// from the singular point along the chart), of width `width`, scaled to
    /// total mass `mass`. Checks that the mesh resolves the bump.
    pub fn bump(
        mesh: &GradedMesh<T>,
        center: T,
        width: T,
        mass: T,
    ) -> Result<Self> {
        let c = mesh.domain.radius;
        let mut density = vec![T::zero(); mesh.len()];
        let mut covered = 0usize;
        for node in mesh.boundary_nodes() {
            // arclength from the origin along the boundary circle
            let arc = mesh.phi[node] * c;
            let t = (arc - center) / width;
            if t.abs() < T::of(0.5) {
                let ct = (T::pi() * t).cos();
                density[node] = ct * ct;
                covered += 1;
            }
        }
        if covered < 3 {
            return Err(Error::DataUnresolved {
                detail: format!(
                    "bump of width {} covers {} boundary nodes; need >= 3",
                    width, covered
                ),
            });
        }
        let mut datum =
            BoundaryDatum { density, atom_mass: T::zero(), atom_width: T::zero() };
        datum.normalize_mass(mesh, mass);
        Ok(datum)
    }

    /// Pure atom at the singular point: realized as a unit-mass bump of width
    /// `width` centered at the origin when the datum is materialized.
    pub fn atom(mesh: &GradedMesh<T>, mass: T, width: T) -> Self {
        BoundaryDatum {
            density: vec![T::zero(); mesh.len()],
            atom_mass: mass,
            atom_width: width,
        }
    }

    pub fn with_atom(mut self, mass: T, width: T) -> Self {
        self.atom_mass = mass;
        self.atom_width = width;
        self
    }

    fn normalize_mass(&mut self, mesh: &GradedMesh<T>, mass: T) {
        let total: T = self
            .density
            .iter()
            .zip(&mesh.bdry_weight)
            .map(|(&d, &w)| d * w)
            .sum();
        if total > T::zero() {
            let scale = mass / total;
            for d in &mut self.density {
                *d *= scale;
            }
        }
    }

    /// Materialize as nodal boundary values: the density plus the mollified
    /// atom (a unit-mass bump at the origin times the atom mass).
    pub fn realize(&self, mesh: &GradedMesh<T>) -> Result<GridFunction<T>> {
        let mut values = GridFunction { values: self.density.clone() };
        if self.atom_mass != T::zero() {
            let bump =
                BoundaryDatum::bump(mesh, T::zero(), self.atom_width, self.atom_mass)?;
            for (v, b) in values.values.iter_mut().zip(&bump.density) {
                *v += *b;
            }
        }
        Ok(values)
    }

    pub fn scaled(&self, a: T) -> Self {
        BoundaryDatum {
            density: self.density.iter().map(|&d| d * a).collect(),
            atom_mass: self.atom_mass * a,
            atom_width: self.atom_width,
        }
    }
}

/// Zero-boundary solve against an interior density (the Green operator).
pub fn green_solve<T: Real>(
    sys: &SparseSystem<T>,
    nu: &GridFunction<T>,
) -> Result<GridFunction<T>> {
    let zero = GridFunction::zeros(sys.mesh.len());
    let (u, _) = sys.solve_dirichlet(nu, &zero)?;
    Ok(u)
}

/// Solve `-lap u + mu V_eps u = 0` with the datum's density as boundary
/// values (atom must be zero: atoms only enter through mollified limits).
pub fn truncated_poisson<T: Real>(
    mesh: &Arc<GradedMesh<T>>,
    mu: T,
    eps: T,
    datum: &BoundaryDatum<T>,
) -> Result<GridFunction<T>> {
    assert!(datum.atom_mass == T::zero(), "atoms are realized through widths");
    let sys = SparseSystem::assemble(mesh, mu, Potential::Truncated { eps })?;
    let bdry = datum.realize(mesh)?;
    let zero = GridFunction::zeros(mesh.len());
    let (u, _) = sys.solve_dirichlet(&zero, &bdry)?;
    Ok(u)
}

/// A truncation sweep and its extrapolated limit; the members are retained.
#[derive(Debug, Clone)]
pub struct PoissonLimit<T> {
    pub eps: Vec<T>,
    pub members: Vec<GridFunction<T>>,
    pub limit: GridFunction<T>,
}

/// Drive the truncation to its monotone limit. The sweep must be nodewise
/// nonincreasing for positive coupling and nondecreasing for negative
/// coupling (constant at zero); violations abort the construction.
pub fn poisson_limit<T: Real>(
    mesh: &Arc<GradedMesh<T>>,
    mu: T,
    datum: &BoundaryDatum<T>,
    schedule: &Schedule<T>,
) -> Result<PoissonLimit<T>> {
    assert!(schedule.len() >= 4, "need at least four truncation radii");
    let bdry = datum.realize(mesh)?;
    let zero = GridFunction::zeros(mesh.len());
    let mut members = Vec::with_capacity(schedule.len());
    for &eps in schedule.values() {
        let sys = SparseSystem::assemble(mesh, mu, Potential::Truncated { eps })?;
        let (u, _) = sys.solve_dirichlet(&zero, &bdry)?;
        members.push(u);
    }
    if mu != T::zero() {
        let sweeps: Vec<Vec<T>> = members.iter().map(|m| m.values.clone()).collect();
        let scale = members
            .iter()
            .map(|m| m.max().abs())
            .fold(T::zero(), T::max)
            .max(T::one());
        let tol = T::of(1e-8) * scale;
        if let Some((step, violation)) =
            monotone_violation(&sweeps, mu > T::zero(), tol)
        {
            return Err(Error::NonMonotoneSequence {
                step,
                violation: violation.to_f64_lossy(),
            });
        }
    }
    let n = members.len();
    let mut limit = members[n - 1].clone();
    let (t1, t2) = (schedule.values()[n - 2], schedule.values()[n - 1]);
    for i in 0..limit.values.len() {
        limit.values[i] = richardson_linear(
            t1,
            members[n - 2].values[i],
            t2,
            members[n - 1].values[i],
        );
    }
    Ok(PoissonLimit { eps: schedule.values().to_vec(), members, limit })
}

/// One test function's worth of the commutation identity between the
/// plain-harmonic extension and the weighted duality:
/// `\int (L* zeta - mu V zeta) K[lambda] dGamma = \int zeta d(beta lambda)`.
#[derive(Debug, Clone)]
pub struct DualCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

/// Verify the commutation identity for the harmonic extension of a datum.
/// `harmonic` must solve the zero-coupling problem with the same data; at
/// zero coupling it coincides with the Poisson limit itself.
pub fn harmonic_dual_identity<T: Real>(
    mesh: &GradedMesh<T>,
    mu: T,
    weight: &DualityWeight<T>,
    datum: &BoundaryDatum<T>,
    harmonic: &GridFunction<T>,
    tests: &[RadialTest<T>],
) -> Result<Vec<DualCheck<T>>> {
    let lambda = datum.realize_density(mesh)?;
    let mut out = Vec::with_capacity(tests.len());
    for zeta in tests {
        let lhs = weight.dual_pairing(mesh, harmonic, zeta, Some(mu));
        let rhs = weight.boundary_pairing(mesh, &lambda.values, zeta);
        let residual = (lhs - rhs).abs() / rhs.abs().max(T::of(1e-12));
        out.push(DualCheck { lhs, rhs, residual });
    }
    Ok(out)
}

impl<T: Real> BoundaryDatum<T> {
    /// The realized nodal density (atom included via its mollifier).
    pub fn realize_density(&self, mesh: &GradedMesh<T>) -> Result<GridFunction<T>> {
        self.realize(mesh)
    }
}

/// Record of the kernel-vanishing probe: solutions with a unit-mass bump at
/// the singular point, at shrinking widths, evaluated at interior probes.
#[derive(Debug, Clone)]
pub struct VanishingRecord<T> {
    pub widths: Vec<T>,
    /// probe values, one row per width
    pub values: Vec<Vec<T>>,
    /// empirical decay rate of the first probe (log-log slope in width)
    pub rate: T,
}

/// `mu > 0` only: values must decrease strictly toward zero as widths shrink.
pub fn kernel_vanishing_at_origin<T: Real>(
    mesh: &Arc<GradedMesh<T>>,
    mu: T,
    widths: &[T],
    probes: &[[T; 2]],
    eps_schedule: &Schedule<T>,
) -> Result<VanishingRecord<T>> {
    assert!(mu > T::zero(), "the kernel column vanishes only for positive coupling");
    let mut values = Vec::new();
    for &w in widths {
        let datum = BoundaryDatum::atom(mesh, T::one(), w);
        let lim = poisson_limit(mesh, mu, &datum, eps_schedule)?;
        values.push(
            probes
                .iter()
                .map(|&p| mesh.interpolate(&lim.limit.values, p))
                .collect::<Vec<T>>(),
        );
    }
    let first: Vec<T> = values.iter().map(|row| row[0]).collect();
    for k in 1..first.len() {
        if first[k] >= first[k - 1] {
            return Err(Error::NoDecay {
                values: first.iter().map(|v| v.to_f64_lossy()).collect(),
            });
        }
    }
    let rate = fit_loglog_slope(widths, &first, 2)?.slope;
    Ok(VanishingRecord { widths: widths.to_vec(), values, rate })
}

/// Lost-mass record: solutions with and without an atom of mass k at the
/// singular point, their difference at interior probes per mollifier width.
#[derive(Debug, Clone)]
pub struct ReducedMeasureGap<T> {
    pub widths: Vec<T>,
    pub gap: Vec<Vec<T>>,
}

/// For positive coupling the atom contributes nothing in the limit: the gap
/// tends to zero, which is the reduced measure discarding the atom.
pub fn reduced_measure_gap<T: Real>(
    mesh: &Arc<GradedMesh<T>>,
    mu: T,
    datum: &BoundaryDatum<T>,
    widths: &[T],
    probes: &[[T; 2]],
    eps_schedule: &Schedule<T>,
) -> Result<ReducedMeasureGap<T>> {
    let base = BoundaryDatum {
        density: datum.density.clone(),
        atom_mass: T::zero(),
        atom_width: T::zero(),
    };
    let base_lim = poisson_limit(mesh, mu, &base, eps_schedule)?;
    let mut gap = Vec::new();
    for &w in widths {
        if datum.atom_mass == T::zero() {
            gap.push(vec![T::zero(); probes.len()]);
            continue;
        }
        let with_atom = base.clone().with_atom(datum.atom_mass, w);
        let lim = poisson_limit(mesh, mu, &with_atom, eps_schedule)?;
        gap.push(
            probes
                .iter()
                .map(|&p| {
                    mesh.interpolate(&lim.limit.values, p)
                        - mesh.interpolate(&base_lim.limit.values, p)
                })
                .collect(),
        );
    }
    Ok(ReducedMeasureGap { widths: widths.to_vec(), gap })
}

/// The singular kernel candidate from the exhaustion construction, with its
/// sweep, axis diagnostics, and the mass bound of the weighted integral.
#[derive(Debug, Clone)]
pub struct SingularKernel<T> {
    pub eps: Vec<T>,
    pub members: Vec<GridFunction<T>>,
    pub limit: GridFunction<T>,
    /// ell * \int u0 gamma dx (L2-normalized weight)
    pub mass_lhs: T,
    /// the half-space constant it must dominate
    pub mass_rhs: T,
}

/// Solve on the domain minus a shrinking ball at the singular point, with the
/// explicit half-space singular solution as data on the excised sphere and
/// zero on the rest of the boundary; the sweep is nodewise nonincreasing and
/// its limit is the kernel candidate.
pub fn singular_kernel<T: Real>(
    sys: &SparseSystem<T>,
    pair: &crate::spectral::EigenPair<T>,
    schedule: &Schedule<T>,
) -> Result<SingularKernel<T>> {
    assert!(matches!(sys.potential, Potential::Exact));
    let mesh = &sys.mesh;
    let sp = SpectralParams::new(sys.mu, mesh.domain.dim)?;
    let eps_min = schedule.smallest();
    // the excision must stay mesh-resolved: 5 local spacings at radius eps
    let local = mesh.h
        * (eps_min / mesh.domain.r_omega())
            .powf(T::one() - mesh.q.recip());
    if eps_min < T::of(5.0) * local {
        return Err(Error::MeshTooCoarse {
            detail: format!(
                "smallest excision {} is under five local spacings ({})",
                eps_min,
                (T::of(5.0) * local)
            ),
        });
    }

    let n = mesh.len();
    let load = vec![T::zero(); n];
    let mut members: Vec<GridFunction<T>> = Vec::with_capacity(schedule.len());
    for &eps in schedule.values() {
        let mut constrained: Vec<Option<T>> = vec![None; n];
        for i in 0..n {
            if mesh.radius[i] <= eps {
                // data on the excised sphere, taken from the half-space solution
                let v = if mesh.radius[i] == T::zero() || mesh.coords[i][1] <= T::zero() {
                    T::zero()
                } else {
                    let p = HalfSpacePoint::new(
                        mesh.radius[i],
                        mesh.coords[i][1] / mesh.radius[i],
                    );
                    phi_mu(&p, &sp)?
                };
                constrained[i] = Some(v);
            } else if mesh.boundary[i] {
                constrained[i] = Some(T::zero());
            }
        }
        let (u, _) = sys.solve_custom(&constrained, &load)?;
        members.push(u);
    }

    // nonincreasing on the common solved region
    for k in 1..members.len() {
        let eps_prev = schedule.values()[k - 1];
        let mut worst = T::zero();
        for i in 0..n {
            if mesh.radius[i] > eps_prev {
                let v = members[k].values[i] - members[k - 1].values[i];
                worst = worst.max(v);
            }
        }
        let scale = members[k - 1].max().abs().max(T::one());
        if worst > T::of(1e-8) * scale {
            return Err(Error::NonMonotoneSequence {
                step: k,
                violation: worst.to_f64_lossy(),
            });
        }
    }

    // nodewise extrapolation where both last members are solved
    let m = members.len();
    let (e1, e2) = (schedule.values()[m - 2], schedule.values()[m - 1]);
    let mut limit = members[m - 1].clone();
    for i in 0..n {
        if mesh.radius[i] > e1 {
            limit.values[i] = richardson_linear(
                e1,
                members[m - 2].values[i],
                e2,
                members[m - 1].values[i],
            );
        }
    }
    // positivity of the candidate: the true limit is an infimum of positive
    // fields, so the extrapolated value may undershoot zero only within its
    // own correction size
    let scale = limit.max().abs().max(T::one());
    let mut worst = T::zero();
    for i in 0..n {
        if !mesh.boundary[i] && mesh.radius[i] > e1 {
            let correction =
                (members[m - 2].values[i] - members[m - 1].values[i]).abs();
            let allowed = correction + T::of(1e-8) * scale;
            let defect = -limit.values[i] - allowed;
            worst = worst.max(defect);
        }
    }
    if worst > T::zero() {
        return Err(Error::NonMonotoneSequence {
            step: m,
            violation: worst.to_f64_lossy(),
        });
    }

    // mass lower bound in the weighted measure (L2-normalized weight);
    // the constant degenerates to (N/2 - 1) \int psi1^2 at the critical
    // coupling (trivial in the plane)
    let rule = HemisphereRule::for_dim(mesh.domain.dim);
    let psi_sq = crate::halfspace::psi1_squared_integral::<T>(&rule)?;
    let mass_rhs = if sp.critical {
        (T::of(mesh.domain.dim as f64) / T::of(2.0) - T::one()) * psi_sq
    } else {
        T::of(2.0) * sp.exponent_gap_half() * psi_sq
    };
    let mut mass_lhs = T::zero();
    for i in 0..n {
        mass_lhs += limit.values[i] * pair.gamma.values[i] * mesh.weight[i];
    }
    mass_lhs *= pair.ell;
    if mass_lhs < mass_rhs * T::of(0.95) {
        return Err(Error::MassBoundFailed {
            got: mass_lhs.to_f64_lossy(),
            need: mass_rhs.to_f64_lossy(),
        });
    }

    Ok(SingularKernel { eps: schedule.values().to_vec(), members, limit, mass_lhs, mass_rhs })
}

impl<T: Real> SingularKernel<T> {
    /// Log-log slope of `u0 / rho` along the axis: the singular exponent
    /// minus one.
    pub fn axis_slope(
        &self,
        mesh: &GradedMesh<T>,
        r_min: T,
        r_max: T,
    ) -> Result<LineFit<T>> {
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for (node, r) in mesh.axis_profile() {
            if r >= r_min && r <= r_max && mesh.rho[node] > T::zero() {
                rs.push(r);
                vs.push(self.limit.values[node] / mesh.rho[node]);
            }
        }
        fit_loglog_slope(&rs, &vs, 6)
    }

    /// Constant fit of `u0 / (rho |x|^{a_- - 1})` along the axis (log-
    /// corrected at the critical coupling): the kernel normalization, one by
    /// construction.
    pub fn normalization_ratio(
        &self,
        mesh: &GradedMesh<T>,
        sp: &SpectralParams<T>,
        r_min: T,
        r_max: T,
    ) -> Result<ConstantFit<T>> {
        let mut ratios = Vec::new();
        for (node, r) in mesh.axis_profile() {
            if r >= r_min && r <= r_max && mesh.rho[node] > T::zero() {
                let envelope = if sp.critical {
                    mesh.rho[node]
                        * r.powf(-T::of(sp.dim as f64) / T::of(2.0))
                        * (r.ln().abs() + T::one())
                } else {
                    mesh.rho[node] * r.powf(sp.alpha_minus - T::one())
                };
                ratios.push(self.limit.values[node] / envelope);
            }
        }
        fit_constant(&ratios, 6)
    }
}

/// Residual of the Dirac identity for a kernel candidate in the weighted
/// duality of the bounded domain.
pub fn singular_dirac_identity<T: Real>(
    mesh: &GradedMesh<T>,
    weight: &DualityWeight<T>,
    candidate: &GridFunction<T>,
    sp: &SpectralParams<T>,
    tests: &[RadialTest<T>],
) -> Result<Vec<DualCheck<T>>> {
    let rule = HemisphereRule::for_dim(sp.dim);
    let cmu = c_mu(sp, &rule)?;
    let mut out = Vec::with_capacity(tests.len());
    for zeta in tests {
        let lhs = weight.dual_pairing(mesh, candidate, zeta, None);
        let rhs = cmu * zeta.at_origin();
        let residual = (lhs - rhs).abs() / rhs.abs().max(T::of(1e-12));
        out.push(DualCheck { lhs, rhs, residual });
    }
    Ok(out)
}
