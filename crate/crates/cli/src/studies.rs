//! The study catalog: reproducible experiment drivers over the library,
//! each emitting named checks and CSV profiles.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hardy_lab::discretize::{GridFunction, Potential, SparseSystem};
use hardy_lab::extrapolate::Schedule;
use hardy_lab::geometry::{GradedMesh, TangentBall};
use hardy_lab::halfspace::{
    alpha_exponents, c_mu, dirac_identity_residual, DiracQuadrature, RadialTest,
    SpectralParams,
};
use hardy_lab::kernels::{
    harmonic_dual_identity, kernel_vanishing_at_origin, poisson_limit,
    reduced_measure_gap, singular_dirac_identity, singular_kernel, BoundaryDatum,
};
use hardy_lab::pairing::DualityWeight;
use hardy_lab::quad::HemisphereRule;
use hardy_lab::spectral::{
    default_fit_window, gamma_asymptotics_fit, principal_eigenpair, weight_pair,
};
use hardy_lab::trace::{WeakProblemData, WeakSolver};

use crate::config::ExperimentConfig;
use crate::report::{write_csv, CheckRecord, StudyReport};

/// One catalog entry: stable identifier plus a one-line description.
pub struct StudyInfo {
    pub id: &'static str,
    pub description: &'static str,
}

pub fn catalog() -> Vec<StudyInfo> {
    vec![
        StudyInfo {
            id: "halfspace-identities",
            description: "exact exponents, normalization constants, and the Dirac identity of the explicit half-space solutions",
        },
        StudyInfo {
            id: "eigen-asymptotics",
            description: "principal eigenvalue convergence and the boundary exponent of the positive eigenfunction",
        },
        StudyInfo {
            id: "poisson-construction",
            description: "truncated-potential Poisson limits: monotonicity in both coupling regimes, the harmonic dual identity, kernel vanishing at the singular point, and the reduced-measure gap",
        },
        StudyInfo {
            id: "singular-kernel",
            description: "exhaustion construction of the singular kernel: monotone sweep, blow-up exponent, unit normalization, weighted mass bound, and its Dirac identity",
        },
        StudyInfo {
            id: "trace-roundtrip",
            description: "boundary-trace recovery of measure data: window masses by layer integrals and the atom coefficient by the ratio law",
        },
        StudyInfo {
            id: "hardy-remainder",
            description: "boundary Hardy inequality with logarithmic remainder on random admissible fields",
        },
        StudyInfo {
            id: "kato",
            description: "weighted absolute-value and positive-part comparison inequalities on random sign-changing data",
        },
    ]
}

/// Shared per-run context: config, output paths, mesh cache.
pub struct StudyCtx {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    meshes: Mutex<HashMap<u64, Arc<GradedMesh<f64>>>>,
}

impl StudyCtx {
    pub fn new(cfg: ExperimentConfig, out: &Path) -> Self {
        StudyCtx { cfg, out: out.to_path_buf(), meshes: Mutex::new(HashMap::new()) }
    }

    fn mesh(&self, h: f64) -> anyhow::Result<Arc<GradedMesh<f64>>> {
        let mut map = self.meshes.lock().unwrap();
        if let Some(m) = map.get(&h.to_bits()) {
            return Ok(m.clone());
        }
        let ball = TangentBall::new(self.cfg.dim, self.cfg.domain.c)?;
        let m = Arc::new(GradedMesh::build(ball, h, self.cfg.mesh.grading)?);
        map.insert(h.to_bits(), m.clone());
        Ok(m)
    }

    fn finest(&self) -> f64 {
        *self.cfg.mesh.levels.last().unwrap()
    }

    fn eps_schedule(&self) -> Schedule<f64> {
        Schedule::geometric(
            self.cfg.schedules.eps_start,
            self.cfg.schedules.eps_ratio,
            self.cfg.schedules.eps_count,
        )
    }

    fn fit_window(&self, mesh: &GradedMesh<f64>) -> (f64, f64) {
        if self.cfg.fit.r_min > 0.0 && self.cfg.fit.r_max > self.cfg.fit.r_min {
            let r = mesh.domain.r_omega();
            (self.cfg.fit.r_min * r, self.cfg.fit.r_max * r)
        } else {
            default_fit_window(mesh)
        }
    }

    fn mu1(&self) -> f64 {
        -((self.cfg.dim * self.cfg.dim) as f64) / 4.0
    }

    /// Couplings to sweep, with the exact critical value replaced by its
    /// approach sequence (the discrete operator is probed, not regularized).
    fn sweep_mus(&self) -> Vec<(f64, bool)> {
        let mu1 = self.mu1();
        let mut out = Vec::new();
        for &mu in &self.cfg.mu {
            if mu == mu1 {
                for delta in [1e-1, 1e-2, 1e-3] {
                    out.push((mu1 + delta, true));
                }
            } else {
                out.push((mu, false));
            }
        }
        out
    }
}

/// Run one study by identifier; library errors become failed checks so the
/// run continues.
pub fn run_study(ctx: &StudyCtx, id: &str) -> StudyReport {
    let result = match id {
        "halfspace-identities" => halfspace_identities(ctx),
        "eigen-asymptotics" => eigen_asymptotics(ctx),
        "poisson-construction" => poisson_construction(ctx),
        "singular-kernel" => singular_kernel_study(ctx),
        "trace-roundtrip" => trace_roundtrip(ctx),
        "hardy-remainder" => hardy_remainder(ctx),
        "kato" => kato_study(ctx),
        other => Err(anyhow::anyhow!("unknown study '{other}'")),
    };
    match result {
        Ok(rep) => rep,
        Err(e) => StudyReport {
            study: id.to_string(),
            checks: vec![CheckRecord::gauge(
                format!("{id}/completed"),
                0.0,
                1.0,
                false,
                format!("study aborted: {e}"),
            )],
            artifacts: Vec::new(),
        },
    }
}

fn halfspace_identities(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let dim = ctx.cfg.dim;
    let tol = ctx.cfg.tolerances.dirac_residual;
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();

    // normalization constants against the closed forms
    let c2 = c_mu(&SpectralParams::new(0.0, 2)?, &HemisphereRule::for_dim(2))?;
    checks.push(CheckRecord::gauge(
        "c(mu=0, N=2) = pi",
        c2,
        1e-12,
        (c2 - std::f64::consts::PI).abs() < 1e-12,
        "half-circle normalization constant",
    ));
    let c3 = c_mu(&SpectralParams::new(0.0, 3)?, &HemisphereRule::for_dim(3))?;
    checks.push(CheckRecord::gauge(
        "c(mu=0, N=3) = 2 pi",
        c3,
        1e-12,
        (c3 - 2.0 * std::f64::consts::PI).abs() < 1e-12,
        "hemisphere normalization constant",
    ));

    let quad = DiracQuadrature::standard(dim);
    let zeta = RadialTest::quadratic(1.0, 1.0);
    for (mu, _) in ctx.sweep_mus() {
        let sp = SpectralParams::new(mu, dim)?;
        let chk = dirac_identity_residual(&zeta, &sp, &quad)?;
        checks.push(CheckRecord::gauge(
            format!("dirac-residual mu={mu}"),
            chk.residual,
            tol,
            chk.residual <= tol,
            format!("lhs {:.10e} rhs {:.10e}", chk.lhs, chk.rhs),
        ));
        let rows: Vec<Vec<f64>> = chk.sweep.iter().map(|&(e, v)| vec![e, v]).collect();
        let name = format!("halfspace-identities_mu{}.csv", sanitize(mu));
        write_csv(&ctx.out.join(&name), "excision,partial_integral", &rows)?;
        artifacts.push(name);
    }
    Ok(StudyReport { study: "halfspace-identities".into(), checks, artifacts })
}

fn eigen_asymptotics(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    for (mu, near_critical) in ctx.sweep_mus() {
        let (alpha_plus, _) = alpha_exponents(mu, ctx.cfg.dim)?;
        let mut ells = Vec::new();
        for &h in &ctx.cfg.mesh.levels {
            let mesh = ctx.mesh(h)?;
            let sys = SparseSystem::assemble(&mesh, mu, Potential::Exact)?;
            let pair = principal_eigenpair(&sys)?;
            ells.push(pair.ell);
            if h == ctx.finest() {
                let (lo, hi) = ctx.fit_window(&mesh);
                let fit = gamma_asymptotics_fit(&pair, &mesh, lo, hi)?;
                let wp = weight_pair(&sys, &pair)?;
                if near_critical {
                    checks.push(CheckRecord::info(
                        format!("ell mu={mu}"),
                        pair.ell,
                        "approach to the critical coupling, reported as a trend",
                    ));
                } else {
                    checks.push(CheckRecord::gauge(
                        format!("axis-slope mu={mu}"),
                        fit.slope,
                        ctx.cfg.tolerances.slope,
                        (fit.slope - alpha_plus).abs() <= ctx.cfg.tolerances.slope,
                        format!(
                            "expected exponent {alpha_plus:.6}; ell {:.8}, ratio bound {:.4}",
                            pair.ell, wp.c2_hat
                        ),
                    ));
                    checks.push(CheckRecord::gauge(
                        format!("weight-lower-bound mu={mu}"),
                        wp.lower_defect,
                        1e-6,
                        wp.lower_defect >= -1e-6,
                        "sigma >= gamma nodewise",
                    ));
                }
                let rows: Vec<Vec<f64>> = mesh
                    .axis_profile()
                    .iter()
                    .map(|&(node, r)| {
                        vec![
                            r,
                            pair.gamma.values[node],
                            mesh.rho[node],
                            (fit.intercept + fit.slope * r.max(1e-300).ln()).exp(),
                        ]
                    })
                    .collect();
                let name = format!("eigen-asymptotics_mu{}.csv", sanitize(mu));
                write_csv(&ctx.out.join(&name), "r,gamma,rho,fitted", &rows)?;
                artifacts.push(name);
                // machine-readable spectral record
                let record = serde_json::json!({
                    "mu": mu,
                    "dim": ctx.cfg.dim,
                    "h": h,
                    "ell": pair.ell,
                    "slope": fit.slope,
                    "slope_se": fit.slope_se,
                    "c1_hat": pair.c1_hat,
                    "c2_hat": wp.c2_hat,
                });
                let name = format!("eigen-asymptotics_mu{}.json", sanitize(mu));
                std::fs::write(ctx.out.join(&name), serde_json::to_string_pretty(&record)?)?;
                artifacts.push(name);
                // mesh export for external visualization (finest level only)
                if mu == ctx.cfg.mu[0] {
                    let name = format!("mesh_h{}_nodes.csv", sanitize(h));
                    mesh.write_nodes_csv(std::fs::File::create(ctx.out.join(&name))?)?;
                    artifacts.push(name);
                    let name = format!("mesh_h{}_cells.csv", sanitize(h));
                    mesh.write_cells_csv(std::fs::File::create(ctx.out.join(&name))?)?;
                    artifacts.push(name);
                }
            }
        }
        if ells.len() >= 3 {
            let diffs: Vec<f64> = ells.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            let monotone = diffs.windows(2).all(|d| d[1] < d[0]);
            checks.push(CheckRecord::gauge(
                format!("eigenvalue-cauchy-trend mu={mu}"),
                *diffs.last().unwrap(),
                f64::INFINITY,
                monotone,
                format!("successive eigenvalue gaps {diffs:?}"),
            ));
        }
    }
    Ok(StudyReport { study: "eigen-asymptotics".into(), checks, artifacts })
}

fn poisson_construction(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mesh = ctx.mesh(ctx.finest())?;
    let sched = ctx.eps_schedule();
    let datum = BoundaryDatum::bump(&mesh, 0.5 * ctx.cfg.domain.c / 0.5, 0.35, 1.0)?;

    // monotone truncation families in both regimes
    for mu in [2.0, -0.5] {
        let ok = poisson_limit(&mesh, mu, &datum, &sched).is_ok();
        checks.push(CheckRecord::gauge(
            format!("monotone-truncation mu={mu}"),
            ok as u8 as f64,
            1.0,
            ok,
            "nodewise monotone sweep at tolerance 1e-8",
        ));
    }

    // dual identity against the harmonic extension at zero coupling
    let sys = SparseSystem::assemble(&mesh, 0.0, Potential::Exact)?;
    let pair = principal_eigenpair(&sys)?;
    let weight = DualityWeight::new(&sys, &pair)?;
    let harmonic = poisson_limit(&mesh, 0.0, &datum, &sched)?;
    let tests = [RadialTest::quadratic(0.5, 1.0), RadialTest::cubic(0.8, 1.0)];
    let dual = harmonic_dual_identity(&mesh, 0.0, &weight, &datum, &harmonic.limit, &tests)?;
    let worst = dual.iter().map(|c| c.residual).fold(0.0, f64::max);
    checks.push(CheckRecord::gauge(
        "dual-identity mu=0",
        worst,
        ctx.cfg.tolerances.dual_identity,
        worst <= ctx.cfg.tolerances.dual_identity,
        "commutation identity against the harmonic extension",
    ));

    // kernel vanishing and the reduced-measure gap at a positive coupling
    let mu_pos = ctx
        .cfg
        .mu
        .iter()
        .copied()
        .find(|&m| m > 0.0)
        .unwrap_or(1.0);
    let deep = Schedule::geometric(
        ctx.cfg.schedules.eps_start,
        ctx.cfg.schedules.eps_ratio,
        ctx.cfg.schedules.eps_count + 3,
    );
    let center = [0.0, ctx.cfg.domain.c];
    let rec = kernel_vanishing_at_origin(
        &mesh,
        mu_pos,
        &ctx.cfg.schedules.widths,
        &[center],
        &deep,
    )?;
    checks.push(CheckRecord::gauge(
        format!("kernel-vanishing-rate mu={mu_pos}"),
        rec.rate,
        0.0,
        rec.rate > 0.0,
        format!("probe decays like w^{:.3}; strict decrease verified", rec.rate),
    ));
    let rows: Vec<Vec<f64>> = rec
        .widths
        .iter()
        .zip(&rec.values)
        .map(|(&w, v)| vec![w, v[0]])
        .collect();
    let name = format!("poisson-construction_vanishing_mu{}.csv", sanitize(mu_pos));
    write_csv(&ctx.out.join(&name), "width,probe_value", &rows)?;
    artifacts.push(name);

    let gap = reduced_measure_gap(
        &mesh,
        mu_pos,
        &datum.clone().with_atom(1.0, ctx.cfg.schedules.widths[0]),
        &ctx.cfg.schedules.widths,
        &[center],
        &deep,
    )?;
    let gap_seq: Vec<f64> = gap.gap.iter().map(|g| g[0]).collect();
    let shrinking = gap_seq.windows(2).all(|w| w[1] < w[0]);
    checks.push(CheckRecord::gauge(
        format!("reduced-measure-gap mu={mu_pos}"),
        *gap_seq.last().unwrap(),
        gap_seq[0],
        shrinking,
        format!("atom contribution per width {gap_seq:?}"),
    ));

    // control: at zero coupling the atom contributes the classical column
    checks.push(CheckRecord::info(
        "classical-column control",
        1.0 / (2.0 * std::f64::consts::PI * ctx.cfg.domain.c),
        "closed-form kernel value at the ball center for unit mass",
    ));

    Ok(StudyReport { study: "poisson-construction".into(), checks, artifacts })
}

fn singular_kernel_study(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mesh = ctx.mesh(ctx.finest())?;
    for (mu, near_critical) in ctx.sweep_mus() {
        if near_critical {
            checks.push(CheckRecord::info(
                format!("exhaustion mu={mu}"),
                mu,
                "critical approach handled by the eigen study; exhaustion skipped",
            ));
            continue;
        }
        let sp = SpectralParams::new(mu, ctx.cfg.dim)?;
        let sys = SparseSystem::assemble(&mesh, mu, Potential::Exact)?;
        let pair = principal_eigenpair(&sys)?;
        let sched = hardy_lab::trace::resolved_excision(&mesh, 0.16, 0.5);
        let ker = singular_kernel(&sys, &pair, &sched)?;
        let (lo, hi) = ctx.fit_window(&mesh);
        let fit = ker.axis_slope(&mesh, lo, hi)?;
        let expect = sp.alpha_minus - 1.0;
        checks.push(CheckRecord::gauge(
            format!("blowup-exponent mu={mu}"),
            fit.slope,
            0.1,
            (fit.slope - expect).abs() <= 0.1,
            format!("expected {expect:.6}"),
        ));
        let ratio = ker.normalization_ratio(&mesh, &sp, lo, hi)?;
        checks.push(CheckRecord::gauge(
            format!("normalization mu={mu}"),
            ratio.value,
            ctx.cfg.tolerances.normalization,
            (ratio.value - 1.0).abs() <= ctx.cfg.tolerances.normalization,
            format!("drift {:.3}", ratio.drift),
        ));
        checks.push(CheckRecord::gauge(
            format!("weighted-mass mu={mu}"),
            ker.mass_lhs,
            ker.mass_rhs,
            ker.mass_lhs >= 0.95 * ker.mass_rhs,
            "weighted integral dominates the half-space constant",
        ));
        let weight = DualityWeight::new(&sys, &pair)?;
        let tests = [RadialTest::quadratic(0.5, 1.0)];
        let dir = singular_dirac_identity(&mesh, &weight, &ker.limit, &sp, &tests)?;
        checks.push(CheckRecord::gauge(
            format!("dirac-identity mu={mu}"),
            dir[0].residual,
            ctx.cfg.tolerances.representation,
            dir[0].residual <= ctx.cfg.tolerances.representation,
            format!("lhs {:.6} rhs {:.6}", dir[0].lhs, dir[0].rhs),
        ));
        let rows: Vec<Vec<f64>> = mesh
            .axis_profile()
            .iter()
            .map(|&(node, r)| vec![r, ker.limit.values[node], mesh.rho[node]])
            .collect();
        let name = format!("singular-kernel_mu{}.csv", sanitize(mu));
        write_csv(&ctx.out.join(&name), "r,kernel,rho", &rows)?;
        artifacts.push(name);
        // experiment record: schedule, per-step norms, extrapolated values
        let step_norms: Vec<f64> = ker.members.iter().map(|m| m.max()).collect();
        let record = serde_json::json!({
            "mu": mu,
            "dim": ctx.cfg.dim,
            "h": ctx.finest(),
            "excision_schedule": ker.eps,
            "per_step_sup_norm": step_norms,
            "extrapolated_sup_norm": ker.limit.max(),
            "weighted_mass": ker.mass_lhs,
            "mass_bound": ker.mass_rhs,
            "dirac_residual": dir[0].residual,
        });
        let name = format!("singular-kernel_mu{}.json", sanitize(mu));
        std::fs::write(ctx.out.join(&name), serde_json::to_string_pretty(&record)?)?;
        artifacts.push(name);
    }
    Ok(StudyReport { study: "singular-kernel".into(), checks, artifacts })
}

fn trace_roundtrip(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mut rng = StdRng::seed_from_u64(ctx.cfg.seed);
    let mesh = ctx.mesh(ctx.finest())?;
    let sched = ctx.eps_schedule();
    let ks = [0.0, 0.5, 2.0];
    for (mu, near_critical) in ctx.sweep_mus() {
        if near_critical {
            checks.push(CheckRecord::info(
                format!("roundtrip mu={mu}"),
                mu,
                "critical approach excluded from trace recovery",
            ));
            continue;
        }
        let ws = WeakSolver::new(mesh.clone(), mu, sched.clone())?;
        for trial in 0..3 {
            let k = ks[rng.gen_range(0..3)];
            let center: f64 = rng.gen_range(0.45..0.8);
            let width: f64 = rng.gen_range(0.25..0.35);
            let mass: f64 = rng.gen_range(0.5..2.0);
            let lam = BoundaryDatum::bump(&mesh, center, width, mass)?;
            let data = WeakProblemData {
                nu: GridFunction { values: Vec::new() },
                lam,
                atom_k: k,
            };
            let u = ws.weak_solution(&data)?;
            let phi_lo = ((center - 0.75 * width) / ctx.cfg.domain.c - 0.4).max(0.3);
            let phi_hi = ((center + 0.75 * width) / ctx.cfg.domain.c + 0.4).min(2.9);
            let rec = ws.boundary_trace(&u, &[(phi_lo, phi_hi)], 1e-3)?;
            let mass_err = (rec.windows[0].mass - mass).abs() / mass;
            checks.push(CheckRecord::gauge(
                format!("window-mass mu={mu} trial={trial}"),
                mass_err,
                ctx.cfg.tolerances.window_mass,
                mass_err <= ctx.cfg.tolerances.window_mass,
                format!("recovered {:.4} of {mass:.4}; m_u {:.4}", rec.windows[0].mass, rec.m_u),
            ));
            let k_err = if k > 0.0 {
                (rec.k_hat - k).abs() / k
            } else {
                rec.k_hat.abs()
            };
            checks.push(CheckRecord::gauge(
                format!("atom-coefficient mu={mu} trial={trial}"),
                k_err,
                ctx.cfg.tolerances.atom,
                k_err <= ctx.cfg.tolerances.atom,
                format!("recovered {:.4} of {k:.4}", rec.k_hat),
            ));
            if trial == 0 {
                let rows: Vec<Vec<f64>> = rec
                    .eps
                    .iter()
                    .zip(&rec.masses)
                    .map(|(&e, &m)| vec![e, m])
                    .collect();
                let name = format!("trace-roundtrip_mass_mu{}.csv", sanitize(mu));
                write_csv(&ctx.out.join(&name), "eps,boundary_mass", &rows)?;
                artifacts.push(name);
                let rows: Vec<Vec<f64>> = rec.windows[0]
                    .layers
                    .iter()
                    .map(|&(d, v)| vec![d, v])
                    .collect();
                let name = format!("trace-roundtrip_layers_mu{}.csv", sanitize(mu));
                write_csv(&ctx.out.join(&name), "delta,layer_integral", &rows)?;
                artifacts.push(name);
                let record = serde_json::json!({
                    "mu": mu,
                    "window": [rec.windows[0].phi_lo, rec.windows[0].phi_hi],
                    "window_mass": rec.windows[0].mass,
                    "m_u": rec.m_u,
                    "k_hat": rec.k_hat,
                    "k_drift": rec.k_drift,
                });
                let name = format!("trace-roundtrip_record_mu{}.json", sanitize(mu));
                std::fs::write(ctx.out.join(&name), serde_json::to_string_pretty(&record)?)?;
                artifacts.push(name);
            }
        }
    }
    Ok(StudyReport { study: "trace-roundtrip".into(), checks, artifacts })
}

fn hardy_remainder(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mesh = ctx.mesh(ctx.finest())?;
    let sys = SparseSystem::assemble(&mesh, 0.0, Potential::Exact)?;
    let mut rng = StdRng::seed_from_u64(ctx.cfg.seed ^ 0x48_41_52_44);
    let mut worst = f64::INFINITY;
    let mut rows = Vec::new();
    let mut pass = true;
    for i in 0..50 {
        let u = random_bump_combo(&mesh, &mut rng);
        let (lhs, rhs) = sys.hardy_remainder_check(&u);
        rows.push(vec![i as f64, lhs, rhs]);
        if rhs > 0.0 {
            worst = worst.min(lhs / rhs);
            pass &= lhs >= (1.0 - ctx.cfg.tolerances.hardy_slack) * rhs;
        }
    }
    let name = "hardy-remainder.csv".to_string();
    write_csv(&ctx.out.join(&name), "probe,lhs,rhs", &rows)?;
    Ok(StudyReport {
        study: "hardy-remainder".into(),
        checks: vec![CheckRecord::gauge(
            "remainder-inequality",
            worst,
            1.0 - ctx.cfg.tolerances.hardy_slack,
            pass,
            "worst lhs/rhs over 50 random admissible fields",
        )],
        artifacts: vec![name],
    })
}

fn kato_study(ctx: &StudyCtx) -> anyhow::Result<StudyReport> {
    let mut checks = Vec::new();
    let mut rng = StdRng::seed_from_u64(ctx.cfg.seed ^ 0x4b_41_54_4f);
    let mesh = ctx.mesh(ctx.finest())?;
    let sched = ctx.eps_schedule();
    for (mu, near_critical) in ctx.sweep_mus() {
        if ctx.cfg.dim == 2 && near_critical {
            checks.push(CheckRecord::info(
                format!("kato mu={mu}"),
                mu,
                "planar critical case excluded by the inequality's hypothesis",
            ));
            continue;
        }
        let ws = WeakSolver::new(mesh.clone(), mu, sched.clone())?;
        let mut worst: f64 = 0.0;
        let mut pass = true;
        for _ in 0..10 {
            let a: f64 = rng.gen_range(0.5..2.0);
            let b: f64 = rng.gen_range(0.5..2.0);
            let cx: f64 = rng.gen_range(-0.2..0.2);
            let cy: f64 = rng.gen_range(0.25..0.75) * 2.0 * ctx.cfg.domain.c;
            let f = GridFunction::from_fn(&mesh, |x| {
                a * (-((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / 0.02).exp()
                    - b * (-((x[0] + cx).powi(2)
                        + (x[1] - (2.0 * ctx.cfg.domain.c - cy)).powi(2))
                        / 0.02)
                        .exp()
            });
            let h = BoundaryDatum::zero(&mesh);
            let zeta = RadialTest::quadratic(rng.gen_range(0.3..0.9), 1.0);
            let chk = ws.kato_residual(&f, &h, &zeta)?;
            let scale = chk.abs_lhs.abs().max(chk.abs_rhs.abs()).max(0.1);
            let slack =
                ((chk.abs_lhs - chk.abs_rhs) / scale).max((chk.pos_lhs - chk.pos_rhs) / scale);
            worst = worst.max(slack);
            pass &= slack <= ctx.cfg.tolerances.kato_slack;
        }
        checks.push(CheckRecord::gauge(
            format!("comparison-slack mu={mu}"),
            worst,
            ctx.cfg.tolerances.kato_slack,
            pass,
            "worst relative slack over 10 random sign-changing data",
        ));
    }
    Ok(StudyReport { study: "kato".into(), checks, artifacts: Vec::new() })
}

fn random_bump_combo(mesh: &GradedMesh<f64>, rng: &mut StdRng) -> GridFunction<f64> {
    let c: f64 = mesh.domain.radius;
    let mut centers = Vec::new();
    for _ in 0..3 {
        let ang: f64 = rng.gen_range(-2.5..2.5);
        let s: f64 = rng.gen_range(0.2..0.8);
        centers.push((
            [c * s * ang.sin(), c * (1.0 - s * ang.cos())],
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(0.05..0.3f64),
        ));
    }
    let vals = mesh
        .coords
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if mesh.boundary[i] {
                return 0.0;
            }
            let mut v = 0.0;
            for &(ctr, amp, width) in &centers {
                let d2 = (x[0] - ctr[0]).powi(2) + (x[1] - ctr[1]).powi(2);
                v += amp * (-d2 / (width * width)).exp();
            }
            v * (mesh.rho[i] / c).min(1.0)
        })
        .collect();
    GridFunction { values: vals }
}

fn sanitize(mu: f64) -> String {
    format!("{mu}").replace('-', "m").replace('.', "p")
}
