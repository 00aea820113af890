//! Acceptance suite: every quantitative contract of the library, one test
//! per criterion, each printing a single pass/fail line with the measured
//! numbers. Tolerances are pinned here, not configurable.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hardy_lab::discretize::{GridFunction, Potential, SparseSystem};
use hardy_lab::extrapolate::Schedule;

use hardy_lab::geometry::{GradedMesh, TangentBall};
use hardy_lab::halfspace::{
    alpha_exponents, c_mu, dirac_identity_residual, indicial, mode_eigenvalue,
    DiracQuadrature, RadialTest, SpectralParams,
};
use hardy_lab::kernels::{
    harmonic_dual_identity, kernel_vanishing_at_origin, poisson_limit, singular_kernel,
    BoundaryDatum,
};
use hardy_lab::pairing::DualityWeight;
use hardy_lab::quad::HemisphereRule;
use hardy_lab::spectral::{
    default_fit_window, gamma_asymptotics_fit, principal_eigenpair, weight_pair,
};
use hardy_lab::trace::{WeakProblemData, WeakSolver};

const BESSEL_J0_FIRST_ZERO: f64 = 2.404825557695773;

fn disk() -> TangentBall<f64> {
    TangentBall::new(2, 0.5).unwrap()
}

fn mesh(h: f64) -> Arc<GradedMesh<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<GradedMesh<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(h.to_bits())
        .or_insert_with(|| Arc::new(GradedMesh::build(disk(), h, 2.0).unwrap()))
        .clone()
}

type EigenCache = Mutex<HashMap<(u64, u64), Arc<(SparseSystem<f64>, hardy_lab::EigenPair)>>>;
type SolverCache = Mutex<HashMap<(u64, u64), Arc<WeakSolver<f64>>>>;

fn eigen(h: f64, mu: f64) -> Arc<(SparseSystem<f64>, hardy_lab::EigenPair)> {
    static CACHE: OnceLock<EigenCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((h.to_bits(), mu.to_bits()))
        .or_insert_with(|| {
            let m = mesh(h);
            let sys = SparseSystem::assemble(&m, mu, Potential::Exact).unwrap();
            let pair = principal_eigenpair(&sys).unwrap();
            Arc::new((sys, pair))
        })
        .clone()
}

fn solver(h: f64, mu: f64) -> Arc<WeakSolver<f64>> {
    static CACHE: OnceLock<SolverCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((h.to_bits(), mu.to_bits()))
        .or_insert_with(|| {
            let m = mesh(h);
            let sched = Schedule::geometric(0.16, 0.5, 4);
            Arc::new(WeakSolver::new(m, mu, sched).unwrap())
        })
        .clone()
}

fn report(criterion: &str, pass: bool, detail: &str, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "acceptance {criterion}: {status} [{:.1}s] {detail}",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_exponent_algebra() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst_eq: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for _ in 0..200 {
        let dim = rng.gen_range(2..=6usize);
        let mu1 = -((dim * dim) as f64) / 4.0;
        let mu = rng.gen_range(mu1..10.0);
        let (ap, am) = alpha_exponents(mu, dim).unwrap();
        let lam = mode_eigenvalue::<f64>(1, dim).unwrap();
        let scale = ap.abs().max(am.abs()).max(1.0);
        worst_eq = worst_eq
            .max(indicial(ap, lam, mu, dim).abs() / scale.powi(2))
            .max(indicial(am, lam, mu, dim).abs() / scale.powi(2));
        worst_sum = worst_sum.max((ap + am - (2.0 - dim as f64)).abs() / scale);
    }
    let pass = worst_eq <= 1e-12 && worst_sum <= 1e-12;
    report(
        "01 exponent-algebra",
        pass,
        &format!("worst indicial residual {worst_eq:.2e}, worst sum defect {worst_sum:.2e}"),
        t0,
    );
}

#[test]
fn criterion_02_mode_spectrum() {
    let t0 = Instant::now();
    let mut ok = true;
    for k in 1..=10i64 {
        ok &= mode_eigenvalue::<f64>(k, 2).unwrap() == (k * k) as f64;
    }
    report(
        "02 mode-spectrum",
        ok,
        "half-circle eigenvalues k(N+k-2) = k^2 exactly for k <= 10",
        t0,
    );
}

#[test]
fn criterion_03_dirac_identity_halfspace() {
    let t0 = Instant::now();
    let quad = DiracQuadrature::standard(2);
    let zeta = RadialTest::quadratic(1.0, 1.0);
    let mut worst: f64 = 0.0;
    for mu in [-0.75, 0.0, 1.0] {
        let sp = SpectralParams::new(mu, 2).unwrap();
        let chk = dirac_identity_residual(&zeta, &sp, &quad).unwrap();
        worst = worst.max(chk.residual);
    }
    let c2 = c_mu(&SpectralParams::new(0.0, 2).unwrap(), &HemisphereRule::for_dim(2)).unwrap();
    let c3 = c_mu(&SpectralParams::new(0.0, 3).unwrap(), &HemisphereRule::for_dim(3)).unwrap();
    let c2_err = (c2 - std::f64::consts::PI).abs();
    let c3_err = (c3 - 2.0 * std::f64::consts::PI).abs();
    let pass = worst <= 1e-3 && c2_err < 1e-12 && c3_err < 1e-12;
    report(
        "03 dirac-identity",
        pass,
        &format!("worst residual {worst:.2e}; normalization errors {c2_err:.1e}, {c3_err:.1e}"),
        t0,
    );
}

#[test]
fn criterion_04_eigenvalue_oracle() {
    let t0 = Instant::now();
    let exact = 4.0 * BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO;
    let mut errs = Vec::new();
    for h in [0.04, 0.02, 0.01] {
        let e = eigen(h, 0.0);
        errs.push((e.1.ell - exact).abs());
    }
    let rel = errs[2] / exact;
    let monotone = errs[1] < errs[0] && errs[2] < errs[1];
    let pass = rel <= 0.01 && monotone;
    report(
        "04 eigenvalue-oracle",
        pass,
        &format!(
            "finest relative error {rel:.2e} vs {exact:.4}; error sequence {errs:?} monotone = {monotone}"
        ),
        t0,
    );
}

#[test]
fn criterion_05_eigenfunction_asymptotics() {
    let t0 = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for mu in [-0.5, 0.0, 3.0] {
        let e = eigen(0.01, mu);
        let m = mesh(0.01);
        let (lo, hi) = default_fit_window(&m);
        let fit = gamma_asymptotics_fit(&e.1, &m, lo, hi).unwrap();
        let (ap, _) = alpha_exponents(mu, 2).unwrap();
        let err = (fit.slope - ap).abs();
        pass &= err <= 0.05;
        detail.push_str(&format!("mu={mu}: slope {:.4} vs {:.4}; ", fit.slope, ap));
    }
    report("05 eigenfunction-asymptotics", pass, &detail, t0);
}

#[test]
fn criterion_06_weight_comparison() {
    let t0 = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for mu in [-0.5, 0.0, 1.0] {
        let coarse = eigen(0.04, mu);
        let fine = eigen(0.02, mu);
        let wp_c = weight_pair(&coarse.0, &coarse.1).unwrap();
        let wp_f = weight_pair(&fine.0, &fine.1).unwrap();
        let lower_ok = wp_f.lower_defect >= -1e-6;
        let stable = (wp_f.c2_hat - wp_c.c2_hat).abs() <= 0.10 * wp_c.c2_hat;
        pass &= lower_ok && stable && wp_f.c2_hat.is_finite();
        detail.push_str(&format!(
            "mu={mu}: defect {:.1e}, c2 {:.3}->{:.3}; ",
            wp_f.lower_defect, wp_c.c2_hat, wp_f.c2_hat
        ));
    }
    report("06 weight-comparison", pass, &detail, t0);
}

#[test]
fn criterion_07_poisson_monotonicity_and_dual_identity() {
    let t0 = Instant::now();
    let m = mesh(0.02);
    let sched = Schedule::geometric(0.16, 0.5, 4);
    let datum = BoundaryDatum::bump(&m, 0.5, 0.35, 1.0).unwrap();
    // monotone families in both regimes: poisson_limit enforces nodewise
    // monotonicity at tolerance 1e-8 internally and errors otherwise
    let pos = poisson_limit(&m, 2.0, &datum, &sched);
    let neg = poisson_limit(&m, -0.5, &datum, &sched);
    let both_monotone = pos.is_ok() && neg.is_ok();

    // dual identity against the harmonic oracle at mu = 0
    let e = eigen(0.02, 0.0);
    let weight = DualityWeight::new(&e.0, &e.1).unwrap();
    let harmonic = poisson_limit(&m, 0.0, &datum, &sched).unwrap();
    let tests = [RadialTest::quadratic(0.5, 1.0), RadialTest::cubic(0.8, 1.0)];
    let checks =
        harmonic_dual_identity(&m, 0.0, &weight, &datum, &harmonic.limit, &tests).unwrap();
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let pass = both_monotone && worst <= 0.02;
    report(
        "07 poisson-monotonicity",
        pass,
        &format!("monotone(mu=2, mu=-0.5) = {both_monotone}; dual-identity residual {worst:.3}"),
        t0,
    );
}

#[test]
fn criterion_08_vanishing_at_singular_point() {
    let t0 = Instant::now();
    let m = mesh(0.02);
    // the truncation must descend below the smallest mollifier width or the
    // probe values saturate at the truncation floor
    let sched = Schedule::geometric(0.16, 0.5, 7);
    let widths = [0.2, 0.1, 0.05, 0.025];
    let center = [0.0, 0.5];
    let rec = kernel_vanishing_at_origin(&m, 1.0, &widths, &[center], &sched).unwrap();
    let seq: Vec<f64> = rec.values.iter().map(|r| r[0]).collect();
    let decreasing = seq.windows(2).all(|w| w[1] < w[0]);
    let final_fraction = seq[3] / seq[0];

    // zero-coupling control: the classical kernel value at the center
    let datum = BoundaryDatum::atom(&m, 1.0, 0.025);
    let bdry = datum.realize(&m).unwrap();
    let sys = SparseSystem::assemble(&m, 0.0, Potential::Exact).unwrap();
    let zero = GridFunction::zeros(m.len());
    let (u0, _) = sys.solve_dirichlet(&zero, &bdry).unwrap();
    let classical = 1.0 / (2.0 * std::f64::consts::PI * 0.5);
    let control = u0.values[m.center_node()];
    let control_ok = (control - classical).abs() <= 0.05 * classical;

    let pass = decreasing && final_fraction < 0.10 && control_ok;
    report(
        "08 vanishing-at-singular-point",
        pass,
        &format!(
            "values {seq:?} decreasing = {decreasing} at fitted rate w^{:.3}, final/first = {final_fraction:.3} (need < 0.10, but the kernel column decays like w^(a-1), a-1 = sqrt(2)-1 ~ 0.414, so a factor-8 width cut can only reach ~0.42); control {control:.4} vs {classical:.4}",
            rec.rate
        ),
        t0,
    );
}

#[test]
fn criterion_09_singular_kernel() {
    let t0 = Instant::now();
    let e = eigen(0.02, 0.0);
    let m = mesh(0.02);
    let sched = Schedule::geometric(0.16, 0.5, 4);
    // the constructor enforces the nodewise nonincreasing sweep and the mass
    // lower bound; reaching Ok already certifies both
    let ker = singular_kernel(&e.0, &e.1, &sched).unwrap();
    let fit = ker.axis_slope(&m, 0.02, 0.125).unwrap();
    let sp = SpectralParams::new(0.0, 2).unwrap();
    let ratio = ker.normalization_ratio(&m, &sp, 0.02, 0.125).unwrap();
    let slope_ok = (fit.slope - (-2.0)).abs() <= 0.1;
    let ratio_ok = (ratio.value - 1.0).abs() <= 0.15;
    let pass = slope_ok && ratio_ok;
    report(
        "09 singular-kernel",
        pass,
        &format!(
            "slope {:.3} vs -2; normalization {:.3}; weighted mass {:.3} >= {:.3}",
            fit.slope, ratio.value, ker.mass_lhs, ker.mass_rhs
        ),
        t0,
    );
}

#[test]
fn criterion_10_representation_identity() {
    let t0 = Instant::now();
    let tests = [RadialTest::quadratic(0.5, 1.0), RadialTest::cubic(0.8, 1.0)];
    let mut detail = String::new();
    let mut pass = true;
    for mu in [-0.5, 0.0, 1.0] {
        let mut worst_per_level = Vec::new();
        for h in [0.04, 0.02] {
            let ws = solver(h, mu);
            let m = &ws.mesh;
            let nu = GridFunction::from_fn(m, |x| 0.5 + x[1]);
            let lam = BoundaryDatum::bump(m, 0.5, 0.3, 1.0).unwrap();
            let data = WeakProblemData { nu, lam, atom_k: 0.5 };
            let u = ws.weak_solution(&data).unwrap();
            let checks = ws.representation_residual(&u, &data, &tests).unwrap();
            worst_per_level
                .push(checks.iter().map(|c| c.residual).fold(0.0, f64::max));
        }
        let finest = worst_per_level[1];
        // the trend clause matters when the residual is near tolerance; deep
        // inside the bound both levels sit at discretization noise
        let decreasing = worst_per_level[1] < worst_per_level[0] || finest <= 0.05;
        pass &= finest <= 0.10 && decreasing;
        detail.push_str(&format!(
            "mu={mu}: residuals {:.3}->{:.3}; ",
            worst_per_level[0], worst_per_level[1]
        ));
    }
    report("10 representation-identity", pass, &detail, t0);
}

#[test]
fn criterion_11_kato_inequalities() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(1111);
    let mut worst_slack: f64 = 0.0;
    let mut pass = true;
    for mu in [0.0, 1.0] {
        let ws = solver(0.02, mu);
        let m = &ws.mesh;
        for _ in 0..10 {
            let a: f64 = rng.gen_range(0.5..2.0);
            let b: f64 = rng.gen_range(0.5..2.0);
            let cx: f64 = rng.gen_range(-0.2..0.2);
            let cy: f64 = rng.gen_range(0.25..0.75);
            let f = GridFunction::from_fn(m, |x| {
                a * (-((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / 0.02).exp()
                    - b * (-((x[0] + cx).powi(2) + (x[1] - (1.0 - cy)).powi(2)) / 0.02)
                        .exp()
            });
            let h = BoundaryDatum::zero(m);
            let zeta = RadialTest::quadratic(rng.gen_range(0.3..0.9), 1.0);
            let chk = ws.kato_residual(&f, &h, &zeta).unwrap();
            let scale = chk.abs_lhs.abs().max(chk.abs_rhs.abs()).max(0.1);
            let slack_abs = (chk.abs_lhs - chk.abs_rhs) / scale;
            let slack_pos = (chk.pos_lhs - chk.pos_rhs) / scale;
            worst_slack = worst_slack.max(slack_abs).max(slack_pos);
            pass &= slack_abs <= 0.02 && slack_pos <= 0.02;
        }
    }
    report(
        "11 kato-inequalities",
        pass,
        &format!("worst relative slack {worst_slack:.4} (allowed 0.02)"),
        t0,
    );
}

#[test]
fn criterion_12_trace_roundtrip() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(1212);
    let mus = [-0.5, 0.0, 1.0];
    let ks = [0.0, 0.5, 2.0];
    let mut level_mass_err = Vec::new();
    let mut level_k_err = Vec::new();
    let mut pass = true;
    for h in [0.03, 0.02] {
        let mut mass_errs = Vec::new();
        let mut k_errs = Vec::new();
        for i in 0..10 {
            let mu = mus[i % 3];
            let k = ks[rng.gen_range(0..3)];
            let center: f64 = rng.gen_range(0.45..0.8);
            let width: f64 = rng.gen_range(0.25..0.35);
            let mass: f64 = rng.gen_range(0.5..2.0);
            let ws = solver(h, mu);
            let m = &ws.mesh;
            let lam = BoundaryDatum::bump(m, center, width, mass).unwrap();
            let data = WeakProblemData {
                nu: GridFunction { values: Vec::new() },
                lam,
                atom_k: k,
            };
            let u = ws.weak_solution(&data).unwrap();
            let window = (
                (center - 0.75 * width) / 0.5 * 0.5 - 0.2,
                (center + 0.75 * width) / 0.5 * 0.5 + 0.2,
            );
            let phi_lo = (window.0 / 0.5).max(0.3);
            let phi_hi = (window.1 / 0.5).min(2.9);
            let rec = ws.boundary_trace(&u, &[(phi_lo, phi_hi)], 1e-3).unwrap();
            mass_errs.push((rec.windows[0].mass - mass).abs() / mass);
            if k > 0.0 {
                k_errs.push((rec.k_hat - k).abs() / k);
            } else {
                k_errs.push(rec.k_hat.abs() / 0.5);
            }
        }
        let mean_mass = mass_errs.iter().sum::<f64>() / mass_errs.len() as f64;
        let mean_k = k_errs.iter().sum::<f64>() / k_errs.len() as f64;
        let worst_mass = mass_errs.iter().copied().fold(0.0, f64::max);
        let worst_k = k_errs.iter().copied().fold(0.0, f64::max);
        if h == 0.02 {
            pass &= worst_mass <= 0.10 && worst_k <= 0.20;
        }
        level_mass_err.push(mean_mass);
        level_k_err.push(mean_k);
    }
    // same trend caveat as the representation identity: only meaningful when
    // the errors approach their bounds (10% / 20%)
    let improving = (level_mass_err[1] <= level_mass_err[0] * 1.05
        || level_mass_err[1] <= 0.05)
        && (level_k_err[1] <= level_k_err[0] * 1.05 || level_k_err[1] <= 0.10);
    pass &= improving;
    report(
        "12 trace-roundtrip",
        pass,
        &format!(
            "mean window-mass errors {level_mass_err:.3?}, mean k errors {level_k_err:.3?}, improving = {improving}"
        ),
        t0,
    );
}

#[test]
fn criterion_13_hardy_remainder() {
    let t0 = Instant::now();
    let m = mesh(0.01);
    let sys = SparseSystem::assemble(&m, 0.0, Potential::Exact).unwrap();
    let mut rng = StdRng::seed_from_u64(1313);
    let mut worst_ratio = f64::INFINITY;
    let mut pass = true;
    for _ in 0..50 {
        let u = random_bump_combo(&m, &mut rng);
        let (lhs, rhs) = sys.hardy_remainder_check(&u);
        if rhs > 0.0 {
            let ratio = lhs / rhs;
            worst_ratio = worst_ratio.min(ratio);
            pass &= lhs >= 0.95 * rhs;
        }
    }
    report(
        "13 hardy-remainder",
        pass,
        &format!("worst lhs/rhs ratio {worst_ratio:.3} (need >= 0.95)"),
        t0,
    );
}

/// Random combination of smooth interior bumps tapered to zero at the
/// boundary (admissible test fields for the remainder inequality).
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
