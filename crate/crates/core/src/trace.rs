//! Very weak solutions with measure boundary data and the recovery of their
//! boundary trace: window densities through layer integrals, the mass at the
//! singular point, and the singular-part coefficient through the ratio law.

use std::sync::Arc;

use crate::discretize::{GridFunction, Potential, SparseSystem};
use crate::error::{Error, Result};
use crate::extrapolate::Schedule;
use crate::fit::{fit_constant, fit_line, ConstantFit};
use crate::geometry::GradedMesh;
use crate::halfspace::{c_mu, RadialTest, SpectralParams};
use crate::kernels::{green_solve, poisson_limit, singular_kernel, BoundaryDatum, DualCheck};
use crate::pairing::DualityWeight;
use crate::quad::HemisphereRule;
use crate::real::Real;
use crate::spectral::{principal_eigenpair, EigenPair};

/// Data of the very weak problem: an interior density, a boundary density
/// away from the singular point, and an atom mass there.
#[derive(Debug, Clone)]
pub struct WeakProblemData<T> {
    pub nu: GridFunction<T>,
    pub lam: BoundaryDatum<T>,
    pub atom_k: T,
}

impl<T: Real> WeakProblemData<T> {
    pub fn boundary_only(lam: BoundaryDatum<T>, atom_k: T) -> Self
    where
        T: Real,
    {
        WeakProblemData { nu: GridFunction { values: Vec::new() }, lam, atom_k }
    }
}

/// Everything needed to build and test weak solutions for one (mesh, mu):
/// assembled operator, eigenpair, duality weight, kernel candidate, and the
/// truncation schedule.
pub struct WeakSolver<T: Real> {
    pub mesh: Arc<GradedMesh<T>>,
    pub mu: T,
    pub sp: SpectralParams<T>,
    pub sys: SparseSystem<T>,
    pub pair: EigenPair<T>,
    pub weight: DualityWeight<T>,
    /// Potential-truncation schedule (mesh-independent).
    pub eps_schedule: Schedule<T>,
    /// Excision schedule for the exhaustion, kept mesh-resolved.
    pub excision: Schedule<T>,
    singular: GridFunction<T>,
    largest_excision: T,
}

/// Largest geometric excision schedule starting at `start` whose smallest
/// member keeps a safety margin above the five-local-spacings resolution
/// floor; right at the floor the discretized sphere is jagged enough to break
/// the sweep's monotonicity.
pub fn resolved_excision<T: Real>(mesh: &GradedMesh<T>, start: T, ratio: T) -> Schedule<T> {
    let mut values = vec![start];
    loop {
        let next = *values.last().unwrap() * ratio;
        let local = mesh.h * (next / mesh.domain.r_omega()).powf(T::one() - mesh.q.recip());
        if next < T::of(6.0) * local || values.len() >= 8 {
            break;
        }
        values.push(next);
    }
    Schedule::from_values(values)
}

impl<T: Real> WeakSolver<T> {
    pub fn new(mesh: Arc<GradedMesh<T>>, mu: T, eps_schedule: Schedule<T>) -> Result<Self> {
        let sp = SpectralParams::new(mu, mesh.domain.dim)?;
        let sys = SparseSystem::assemble(&mesh, mu, Potential::Exact)?;
        let pair = principal_eigenpair(&sys)?;
        let weight = DualityWeight::new(&sys, &pair)?;
        let excision = resolved_excision(&mesh, T::of(0.16) * mesh.domain.radius / T::of(0.5), T::of(0.5));
        let ker = singular_kernel(&sys, &pair, &excision)?;
        let largest_excision = excision.values()[0].max(eps_schedule.values()[0]);
        Ok(WeakSolver {
            mesh,
            mu,
            sp,
            sys,
            pair,
            weight,
            eps_schedule,
            excision,
            singular: ker.limit,
            largest_excision,
        })
    }

    /// The kernel candidate carried by this solver.
    pub fn singular_part(&self) -> &GridFunction<T> {
        &self.singular
    }

    /// Superposition `u = G[nu] + K[lam] + k phi`.
    pub fn weak_solution(&self, data: &WeakProblemData<T>) -> Result<GridFunction<T>> {
        let mut u = GridFunction::zeros(self.mesh.len());
        if !data.nu.values.is_empty() {
            let g = green_solve(&self.sys, &data.nu)?;
            u.axpy(T::one(), &g);
        }
        let has_density = data.lam.density.iter().any(|&d| d != T::zero());
        if has_density {
            let lam_only = BoundaryDatum {
                density: data.lam.density.clone(),
                atom_mass: T::zero(),
                atom_width: T::zero(),
            };
            let k = poisson_limit(&self.mesh, self.mu, &lam_only, &self.eps_schedule)?;
            u.axpy(T::one(), &k.limit);
        }
        if data.atom_k != T::zero() {
            u.axpy(data.atom_k, &self.singular);
        }
        Ok(u)
    }

    /// Residual of the representation identity per test function:
    /// `\int u L* zeta dGamma = \int zeta nu dGamma + \int zeta d(beta lam)
    ///  + k c zeta(0)`.
    pub fn representation_residual(
        &self,
        u: &GridFunction<T>,
        data: &WeakProblemData<T>,
        tests: &[RadialTest<T>],
    ) -> Result<Vec<DualCheck<T>>> {
        let rule = HemisphereRule::for_dim(self.mesh.domain.dim);
        let cmu = c_mu(&self.sp, &rule)?;
        let mut out = Vec::with_capacity(tests.len());
        for zeta in tests {
            let lhs = self.weight.dual_pairing(&self.mesh, u, zeta, None);
            let mut rhs = data.atom_k * cmu * zeta.at_origin();
            if !data.nu.values.is_empty() {
                rhs += self.weight.volume_pairing(&self.mesh, &data.nu, zeta);
            }
            rhs += self
                .weight
                .boundary_pairing(&self.mesh, &data.lam.density, zeta);
            let residual = (lhs - rhs).abs() / rhs.abs().max(T::of(1e-12));
            out.push(DualCheck { lhs, rhs, residual });
        }
        Ok(out)
    }

    /// Both sides of the weighted absolute-value and positive-part
    /// inequalities for the solution of `L u = f, u = h on the boundary`
    /// built as `G[gamma f] + K[h]`.
    pub fn kato_residual(
        &self,
        f: &GridFunction<T>,
        h: &BoundaryDatum<T>,
        zeta: &RadialTest<T>,
    ) -> Result<KatoCheck<T>> {
        kato_hypothesis(self.mesh.domain.dim, &self.sp)?;
        // u solves L u = f with boundary values h
        let mut u = green_solve(&self.sys, f)?;
        let has_h = h.density.iter().any(|&d| d != T::zero());
        if has_h {
            let k = poisson_limit(&self.mesh, self.mu, h, &self.eps_schedule)?;
            u.axpy(T::one(), &k.limit);
        }

        let abs_u = GridFunction {
            values: u.values.iter().map(|&v| v.abs()).collect(),
        };
        let pos_u = GridFunction {
            values: u.values.iter().map(|&v| v.max(T::zero())).collect(),
        };
        let sgn_f = GridFunction {
            values: u
                .values
                .iter()
                .zip(&f.values)
                .map(|(&uv, &fv)| fv * sign_of(uv))
                .collect(),
        };
        let sgn_pos_f = GridFunction {
            values: u
                .values
                .iter()
                .zip(&f.values)
                .map(|(&uv, &fv)| if uv > T::zero() { fv } else { T::zero() })
                .collect(),
        };
        let abs_h: Vec<T> = h.density.iter().map(|&d| d.abs()).collect();
        let pos_h: Vec<T> = h.density.iter().map(|&d| d.max(T::zero())).collect();

        let abs_lhs = self.weight.dual_pairing(&self.mesh, &abs_u, zeta, None);
        let abs_rhs = self.weight.volume_pairing(&self.mesh, &sgn_f, zeta)
            + self.weight.boundary_pairing(&self.mesh, &abs_h, zeta);
        let pos_lhs = self.weight.dual_pairing(&self.mesh, &pos_u, zeta, None);
        let pos_rhs = self.weight.volume_pairing(&self.mesh, &sgn_pos_f, zeta)
            + self.weight.boundary_pairing(&self.mesh, &pos_h, zeta);
        Ok(KatoCheck { abs_lhs, abs_rhs, pos_lhs, pos_rhs, solution: u })
    }

    /// Recover the boundary trace of a numerically harmonic positive field:
    /// window densities by layer integrals, the mass at the singular point by
    /// excised sphere integrals, and the singular coefficient by the ratio
    /// law.
    pub fn boundary_trace(
        &self,
        u: &GridFunction<T>,
        windows: &[(T, T)],
        gate_tol: T,
    ) -> Result<TraceRecord<T>> {
        // admissibility gate: interior residual away from the excised scales
        let zero = GridFunction::zeros(self.mesh.len());
        let skip = self.largest_excision * T::of(1.5);
        let res = self.sys.interior_residual(u, &zero, skip);
        if res > gate_tol {
            return Err(Error::TraceDivergent {
                values: vec![res.to_f64_lossy()],
            });
        }

        let mesh = &self.mesh;
        // three layer depths, shallow but resolved
        let candidates = [T::of(0.02), T::of(0.045), T::of(0.09)];
        let mut window_estimates = Vec::new();
        for &(phi_lo, phi_hi) in windows {
            // direction cone spanned by the window
            let a = mesh.domain.boundary_point(phi_lo);
            let b = mesh.domain.boundary_point(phi_hi);
            let th_lo = a[1].atan2(a[0]);
            let th_hi = b[1].atan2(b[0]);
            let (th_lo, th_hi) = if th_lo <= th_hi { (th_lo, th_hi) } else { (th_hi, th_lo) };
            // the window functions vanish near the singular point: cut the
            // cone at half the window's distance to it, else the cone vertex
            // would drag in the singular scales
            let r_cut = (a[0] * a[0] + a[1] * a[1])
                .sqrt()
                .min((b[0] * b[0] + b[1] * b[1]).sqrt())
                * T::of(0.5);
            let mut layers = Vec::new();
            for &frac in &candidates {
                let delta = mesh.domain.radius * frac;
                let layer = mesh.boundary_layer(delta)?;
                let mut acc = T::zero();
                for (pos, &node) in layer.nodes.iter().enumerate() {
                    let th = mesh.direction_angle(node);
                    if th >= th_lo && th <= th_hi && mesh.radius[node] >= r_cut {
                        acc += u.values[node] * layer.weights[pos];
                    }
                }
                layers.push((layer.depth, acc));
            }
            let ds: Vec<T> = layers.iter().map(|l| l.0).collect();
            let vs: Vec<T> = layers.iter().map(|l| l.1).collect();
            let fitted = fit_line(&ds, &vs);
            window_estimates.push(WindowTrace {
                phi_lo,
                phi_hi,
                layers,
                mass: fitted.intercept,
            });
        }

        // mass at the singular point: excised sphere integrals of u against
        // the boundary density extension gamma/rho*
        let inv_ell = self.pair.ell.recip();
        let mut eps_list = Vec::new();
        let mut mass_list = Vec::new();
        for &eps in self.eps_schedule.values() {
            let rule = mesh.sphere_arc_rule(eps, 48);
            let mut acc = T::zero();
            for (p, w) in rule {
                let uval = mesh.interpolate(&u.values, p);
                let gval = mesh.interpolate(&self.weight.gamma.values, p);
                let rho_star = mesh.domain.rho(p).min(inv_ell);
                if rho_star > T::zero() {
                    acc += uval * gval / rho_star * w;
                }
            }
            eps_list.push(eps);
            mass_list.push(acc);
        }
        // divergence check: consistent growth as eps shrinks
        let grows = mass_list.windows(2).all(|w| w[1] > w[0] * T::of(1.5))
            && mass_list.last().copied().unwrap_or(T::zero())
                > mass_list[0] * T::of(4.0);
        if grows {
            return Err(Error::TraceDivergent {
                values: mass_list.iter().map(|v| v.to_f64_lossy()).collect(),
            });
        }
        let ext = crate::extrapolate::extrapolate_sweep_auto(&eps_list, &mass_list);
        let m_u = ext.value.max(T::zero());

        let k_hat = self.singular_ratio_fit(u, None)?;

        Ok(TraceRecord {
            windows: window_estimates,
            eps: eps_list,
            masses: mass_list,
            m_u,
            k_hat: k_hat.value,
            k_drift: k_hat.drift,
        })
    }

    /// Constant-model fit of the ratio law along the axis: above the critical
    /// coupling `u/(rho r^{a_- - 1})`, at it `-r^{N/2} u/(rho ln r)`.
    pub fn singular_ratio_fit(
        &self,
        u: &GridFunction<T>,
        window: Option<(T, T)>,
    ) -> Result<ConstantFit<T>> {
        let mesh = &self.mesh;
        let (lo, hi) = window.unwrap_or_else(|| crate::spectral::default_fit_window(mesh));
        let mut ratios = Vec::new();
        for (node, r) in mesh.axis_profile() {
            if r < lo || r > hi || mesh.rho[node] <= T::zero() {
                continue;
            }
            let ratio = if self.sp.critical {
                let n_half = T::of(mesh.domain.dim as f64) / T::of(2.0);
                -(r.powf(n_half) * u.values[node]) / (mesh.rho[node] * r.ln())
            } else {
                u.values[node] / (mesh.rho[node] * r.powf(self.sp.alpha_minus - T::one()))
            };
            ratios.push(ratio);
        }
        fit_constant(&ratios, 6)
    }
}

/// The comparison inequalities hold for N >= 3, or N = 2 strictly above the
/// critical coupling; the planar critical case is excluded.
pub fn kato_hypothesis<T: Real>(dim: usize, sp: &SpectralParams<T>) -> Result<()> {
    if dim == 2 && sp.critical {
        return Err(Error::HypothesisViolated);
    }
    Ok(())
}

fn sign_of<T: Real>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Both inequalities of the weighted comparison: absolute value and positive
/// part, with the solution they were evaluated on.
#[derive(Debug, Clone)]
pub struct KatoCheck<T> {
    pub abs_lhs: T,
    pub abs_rhs: T,
    pub pos_lhs: T,
    pub pos_rhs: T,
    pub solution: GridFunction<T>,
}

#[derive(Debug, Clone)]
pub struct WindowTrace<T> {
    pub phi_lo: T,
    pub phi_hi: T,
    pub layers: Vec<(T, T)>,
    /// Extrapolated layer integral: the recovered window mass.
    pub mass: T,
}

/// Recovered boundary trace: window masses, the excised-sphere mass record,
/// and the fitted singular coefficient.
#[derive(Debug, Clone)]
pub struct TraceRecord<T> {
    pub windows: Vec<WindowTrace<T>>,
    pub eps: Vec<T>,
    pub masses: Vec<T>,
    pub m_u: T,
    pub k_hat: T,
    pub k_drift: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TangentBall;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn solver(h: f64, mu: f64) -> WeakSolver<f64> {
        let ball = TangentBall::new(2, 0.5).unwrap();
        let mesh = Arc::new(GradedMesh::build(ball, h, 2.0).unwrap());
        let sched = Schedule::geometric(0.16, 0.5, 4);
        WeakSolver::new(mesh, mu, sched).unwrap()
    }

    #[test]
    fn superposition_is_additive() {
        let ws = solver(0.03, 0.0);
        let mesh = &ws.mesh;
        let nu = GridFunction::from_fn(mesh, |x| 1.0 + x[1]);
        let lam = BoundaryDatum::bump(mesh, 0.5, 0.3, 1.0).unwrap();
        let data = WeakProblemData { nu: nu.clone(), lam: lam.clone(), atom_k: 1.0 };
        let u = ws.weak_solution(&data).unwrap();

        let only_nu = WeakProblemData {
            nu: nu.clone(),
            lam: BoundaryDatum::zero(mesh),
            atom_k: 0.0,
        };
        let only_lam = WeakProblemData {
            nu: GridFunction { values: Vec::new() },
            lam,
            atom_k: 0.0,
        };
        let only_k = WeakProblemData {
            nu: GridFunction { values: Vec::new() },
            lam: BoundaryDatum::zero(mesh),
            atom_k: 1.0,
        };
        let mut sum = ws.weak_solution(&only_nu).unwrap();
        sum.axpy(1.0, &ws.weak_solution(&only_lam).unwrap());
        sum.axpy(1.0, &ws.weak_solution(&only_k).unwrap());
        for i in 0..mesh.len() {
            assert!((u.values[i] - sum.values[i]).abs() <= 1e-9);
        }

        // pure atom data returns the kernel candidate itself
        let just_k = ws.weak_solution(&only_k).unwrap();
        for i in 0..mesh.len() {
            assert!((just_k.values[i] - ws.singular_part().values[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn representation_identity_zero_data() {
        let ws = solver(0.04, 0.0);
        let data = WeakProblemData {
            nu: GridFunction { values: Vec::new() },
            lam: BoundaryDatum::zero(&ws.mesh),
            atom_k: 0.0,
        };
        let u = ws.weak_solution(&data).unwrap();
        let tests = [RadialTest::quadratic(0.5, 1.0)];
        let checks = ws.representation_residual(&u, &data, &tests).unwrap();
        assert!(checks[0].lhs.abs() < 1e-12 && checks[0].rhs.abs() < 1e-12);
    }

    #[test]
    fn representation_identity_mixed_data() {
        let ws = solver(0.02, 0.0);
        let mesh = &ws.mesh;
        let nu = GridFunction::from_fn(mesh, |x| 0.5 + x[0] * x[0]);
        let lam = BoundaryDatum::bump(mesh, 0.5, 0.3, 1.0).unwrap();
        let data = WeakProblemData { nu, lam, atom_k: 0.5 };
        let u = ws.weak_solution(&data).unwrap();
        let tests = [
            RadialTest::quadratic(0.5, 1.0),
            RadialTest::cubic(0.8, 1.0),
        ];
        for chk in ws.representation_residual(&u, &data, &tests).unwrap() {
            assert!(
                chk.residual <= 0.10,
                "representation residual {} (lhs {} rhs {})",
                chk.residual,
                chk.lhs,
                chk.rhs
            );
        }
        // doubling the data doubles both sides
        let data2 = WeakProblemData {
            nu: data.nu.scaled(2.0),
            lam: data.lam.scaled(2.0),
            atom_k: 1.0,
        };
        let u2 = ws.weak_solution(&data2).unwrap();
        let c1 = &ws.representation_residual(&u, &data, &tests).unwrap()[0];
        let c2 = &ws.representation_residual(&u2, &data2, &tests).unwrap()[0];
        assert!((c2.lhs - 2.0 * c1.lhs).abs() <= 1e-6 * c1.lhs.abs().max(1.0));
        assert!((c2.rhs - 2.0 * c1.rhs).abs() <= 1e-6 * c1.rhs.abs().max(1.0));
    }

    #[test]
    fn kato_inequality_nonnegative_data_near_equality() {
        let ws = solver(0.02, 0.0);
        let mesh = &ws.mesh;
        let f = GridFunction::from_fn(mesh, |x| 1.0 + x[1]);
        let h = BoundaryDatum::bump(mesh, 0.5, 0.3, 1.0).unwrap();
        let zeta = RadialTest::quadratic(0.5, 1.0);
        let chk = ws.kato_residual(&f, &h, &zeta).unwrap();
        // nonnegative data: solution nonnegative, inequality saturates
        assert!(chk.solution.min() >= -1e-8);
        let scale = chk.abs_rhs.abs().max(1.0);
        assert!(chk.abs_lhs <= chk.abs_rhs + 0.02 * scale);
        assert!((chk.abs_lhs - chk.abs_rhs).abs() <= 0.02 * scale);
        assert!(chk.pos_lhs <= chk.pos_rhs + 0.02 * scale);
    }

    #[test]
    fn kato_inequality_sign_changing_data() {
        let ws = solver(0.02, 0.0);
        let mesh = &ws.mesh;
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..5 {
            let a: f64 = rng.gen_range(0.5..2.0);
            let b: f64 = rng.gen_range(0.5..2.0);
            let cx: f64 = rng.gen_range(-0.2..0.2);
            let f = GridFunction::from_fn(mesh, |x| {
                a * (-((x[0] - cx).powi(2) + (x[1] - 0.3).powi(2)) / 0.02).exp()
                    - b * (-((x[0] + cx).powi(2) + (x[1] - 0.7).powi(2)) / 0.02).exp()
            });
            let h = BoundaryDatum::zero(mesh);
            let zeta = RadialTest::quadratic(rng.gen_range(0.3..0.9), 1.0);
            let chk = ws.kato_residual(&f, &h, &zeta).unwrap();
            let scale = chk.abs_lhs.abs().max(chk.abs_rhs.abs()).max(0.1);
            assert!(
                chk.abs_lhs <= chk.abs_rhs + 0.02 * scale,
                "abs: {} vs {}",
                chk.abs_lhs,
                chk.abs_rhs
            );
            assert!(
                chk.pos_lhs <= chk.pos_rhs + 0.02 * scale,
                "pos: {} vs {}",
                chk.pos_lhs,
                chk.pos_rhs
            );
        }
    }

    #[test]
    fn kato_hypothesis_is_enforced() {
        let crit = SpectralParams::new(-1.0, 2).unwrap();
        assert!(matches!(
            kato_hypothesis(2, &crit),
            Err(Error::HypothesisViolated)
        ));
        let ok3 = SpectralParams::new(-2.25, 3).unwrap();
        assert!(kato_hypothesis(3, &ok3).is_ok());
    }

    #[test]
    fn critical_coupling_probe_reports_rather_than_regularizes() {
        // at the critical coupling the discrete form loses positivity on
        // this mesh; the construction must fail loudly, not patch it
        let ball = TangentBall::new(2, 0.5).unwrap();
        let mesh = Arc::new(GradedMesh::build(ball, 0.04, 2.0).unwrap());
        let sched = Schedule::geometric(0.16, 0.5, 3);
        match WeakSolver::<f64>::new(mesh, -1.0, sched) {
            Err(Error::NotSpd { .. }) | Err(Error::NegativeMode { .. }) => {}
            Err(other) => panic!("expected an SPD diagnostic, got {other:?}"),
            Ok(_) => panic!("expected an SPD diagnostic, construction succeeded"),
        }
    }

    #[test]
    fn trace_of_poisson_part_recovers_window_mass() {
        let ws = solver(0.02, 0.0);
        let mesh = &ws.mesh;
        let lam = BoundaryDatum::bump(mesh, 0.55, 0.3, 1.0).unwrap();
        let data = WeakProblemData {
            nu: GridFunction { values: Vec::new() },
            lam: lam.clone(),
            atom_k: 0.0,
        };
        let u = ws.weak_solution(&data).unwrap();
        // window around the bump: arclength 0.55 +- 0.3 => phi in [0.5, 1.7]
        let rec = ws.boundary_trace(&u, &[(0.5, 1.7)], 1e-4).unwrap();
        let mass = rec.windows[0].mass;
        assert!((mass - 1.0).abs() <= 0.10, "window mass {mass}");
        // the mass at the singular point tends to zero
        assert!(rec.m_u.abs() <= 0.2, "m_u {}", rec.m_u);
        // no singular part
        assert!(rec.k_hat.abs() <= 0.2, "k_hat {}", rec.k_hat);
    }

    #[test]
    fn weak_solutions_of_nonnegative_data_are_nonnegative() {
        let ws = solver(0.03, 1.0);
        let mesh = &ws.mesh;
        let nu = GridFunction::from_fn(mesh, |x| 0.3 + x[1]);
        let lam = BoundaryDatum::bump(mesh, 0.6, 0.3, 1.5).unwrap();
        let data = WeakProblemData { nu, lam, atom_k: 0.5 };
        let u = ws.weak_solution(&data).unwrap();
        let scale = u.max();
        assert!(u.min() >= -1e-8 * scale, "min {}", u.min());
    }

    #[test]
    fn kato_zero_data_is_zero() {
        let ws = solver(0.04, 0.0);
        let f = GridFunction::zeros(ws.mesh.len());
        let h = BoundaryDatum::zero(&ws.mesh);
        let zeta = RadialTest::quadratic(0.5, 1.0);
        let chk = ws.kato_residual(&f, &h, &zeta).unwrap();
        assert!(chk.abs_lhs.abs() < 1e-12 && chk.abs_rhs.abs() < 1e-12);
        assert!(chk.pos_lhs.abs() < 1e-12 && chk.pos_rhs.abs() < 1e-12);
    }

    #[test]
    fn trace_gate_rejects_non_harmonic_fields() {
        let ws = solver(0.04, 0.0);
        let garbage = GridFunction::from_fn(&ws.mesh, |x| (20.0 * x[0]).sin() + x[1]);
        assert!(matches!(
            ws.boundary_trace(&garbage, &[(1.0, 2.0)], 1e-3),
            Err(Error::TraceDivergent { .. })
        ));
    }

    #[test]
    fn trace_of_singular_part() {
        let ws = solver(0.02, 0.0);
        let u = ws.singular_part().clone();
        let rec = ws.boundary_trace(&u, &[(1.2, 2.2)], 1e-4).unwrap();
        // far windows see nothing
        assert!(rec.windows[0].mass.abs() <= 0.1, "far mass {}", rec.windows[0].mass);
        // the singular mass is positive and the coefficient is one
        assert!(rec.m_u > 0.0);
        assert!((rec.k_hat - 1.0).abs() <= 0.15, "k_hat {}", rec.k_hat);

        // doubling the field doubles the singular mass
        let rec2 = ws.boundary_trace(&u.scaled(2.0), &[(1.2, 2.2)], 1e-4).unwrap();
        assert!((rec2.m_u - 2.0 * rec.m_u).abs() <= 0.05 * rec.m_u.abs().max(1e-6));
        assert!((rec2.k_hat - 2.0 * rec.k_hat).abs() <= 0.1);
    }
}
