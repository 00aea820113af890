//! Experiment configuration: a single TOML file with a versioned schema,
//! validated field by field before anything runs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const KNOWN_STUDIES: [&str; 7] = [
    "halfspace-identities",
    "eigen-asymptotics",
    "poisson-construction",
    "singular-kernel",
    "trace-roundtrip",
    "hardy-remainder",
    "kato",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Schema version of this config format.
    #[serde(default = "default_version")]
    pub version: u32,
    pub id: String,
    /// Studies to run, in order. An empty list is a valid no-op run.
    #[serde(default)]
    pub studies: Vec<String>,
    /// Couplings to sweep.
    #[serde(default = "default_mu")]
    pub mu: Vec<f64>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Global seed governing every randomized probe.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Concurrent study workers.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_out")]
    pub out_dir: String,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub schedules: ScheduleConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConfig {
    #[serde(default = "default_kind")]
    pub kind: String,
    /// Ball radius; the ball is centered at (0, c) and touches the boundary
    /// hyperplane at the origin.
    #[serde(default = "default_c")]
    pub c: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig { kind: default_kind(), c: default_c() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshConfig {
    /// Nominal spacings, strictly decreasing (coarse to fine).
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    #[serde(default = "default_grading")]
    pub grading: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { levels: default_levels(), grading: default_grading() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(default = "default_eps_start")]
    pub eps_start: f64,
    #[serde(default = "default_eps_ratio")]
    pub eps_ratio: f64,
    #[serde(default = "default_eps_count")]
    pub eps_count: usize,
    /// Mollifier widths for atom realizations, decreasing.
    #[serde(default = "default_widths")]
    pub widths: Vec<f64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            eps_start: default_eps_start(),
            eps_ratio: default_eps_ratio(),
            eps_count: default_eps_count(),
            widths: default_widths(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    /// Fit window in distance to the singular point, as fractions of the
    /// domain diameter; zero means the mesh-adapted default.
    #[serde(default)]
    pub r_min: f64,
    #[serde(default)]
    pub r_max: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { r_min: 0.0, r_max: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "d_dirac")]
    pub dirac_residual: f64,
    #[serde(default = "d_slope")]
    pub slope: f64,
    #[serde(default = "d_dual")]
    pub dual_identity: f64,
    #[serde(default = "d_norm")]
    pub normalization: f64,
    #[serde(default = "d_rep")]
    pub representation: f64,
    #[serde(default = "d_kato")]
    pub kato_slack: f64,
    #[serde(default = "d_mass")]
    pub window_mass: f64,
    #[serde(default = "d_atom")]
    pub atom: f64,
    #[serde(default = "d_hardy")]
    pub hardy_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

fn default_version() -> u32 {
    1
}
fn default_mu() -> Vec<f64> {
    vec![0.0]
}
fn default_dim() -> usize {
    2
}
fn default_seed() -> u64 {
    7
}
fn default_workers() -> usize {
    2
}
fn default_out() -> String {
    "out".to_string()
}
fn default_kind() -> String {
    "tangent-ball".to_string()
}
fn default_c() -> f64 {
    0.5
}
fn default_levels() -> Vec<f64> {
    vec![0.04, 0.02]
}
fn default_grading() -> f64 {
    2.0
}
fn default_eps_start() -> f64 {
    0.16
}
fn default_eps_ratio() -> f64 {
    0.5
}
fn default_eps_count() -> usize {
    4
}
fn default_widths() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}
fn d_dirac() -> f64 {
    1e-3
}
fn d_slope() -> f64 {
    0.05
}
fn d_dual() -> f64 {
    0.02
}
fn d_norm() -> f64 {
    0.15
}
fn d_rep() -> f64 {
    0.10
}
fn d_kato() -> f64 {
    0.02
}
fn d_mass() -> f64 {
    0.10
}
fn d_atom() -> f64 {
    0.20
}
fn d_hardy() -> f64 {
    0.05
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| "parsing config TOML")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            bail!("invalid config: id: must not be empty");
        }
        for s in &self.studies {
            if !KNOWN_STUDIES.contains(&s.as_str()) {
                bail!(
                    "invalid config: studies: unknown study '{s}'; known: {}",
                    KNOWN_STUDIES.join(", ")
                );
            }
        }
        if self.dim != 2 && self.dim != 3 {
            bail!("invalid config: dim: must be 2 or 3, got {}", self.dim);
        }
        if self.domain.kind != "tangent-ball" {
            bail!(
                "invalid config: domain.kind: only 'tangent-ball' is supported, got '{}'",
                self.domain.kind
            );
        }
        if !(self.domain.c > 0.0 && self.domain.c <= 0.5) {
            bail!("invalid config: domain.c: must lie in (0, 0.5], got {}", self.domain.c);
        }
        if self.mesh.levels.is_empty() {
            bail!("invalid config: mesh.levels: must not be empty");
        }
        if !self.mesh.levels.windows(2).all(|w| w[1] < w[0]) {
            bail!("invalid config: mesh.levels: must be strictly decreasing");
        }
        if self.mesh.grading < 1.0 {
            bail!("invalid config: mesh.grading: must be >= 1, got {}", self.mesh.grading);
        }
        if !(self.schedules.eps_ratio > 0.0 && self.schedules.eps_ratio < 1.0) {
            bail!(
                "invalid config: schedules.eps_ratio: geometric schedules need a ratio in (0, 1), got {}",
                self.schedules.eps_ratio
            );
        }
        if self.schedules.eps_count < 4 {
            bail!(
                "invalid config: schedules.eps_count: need at least 4 terms, got {}",
                self.schedules.eps_count
            );
        }
        if !self.schedules.widths.windows(2).all(|w| w[1] < w[0]) {
            bail!("invalid config: schedules.widths: must be strictly decreasing");
        }
        let mu1 = -((self.dim * self.dim) as f64) / 4.0;
        for &mu in &self.mu {
            if mu < mu1 {
                bail!("invalid config: mu: {mu} is below the critical constant {mu1}");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("dirac_residual", t.dirac_residual),
            ("slope", t.slope),
            ("dual_identity", t.dual_identity),
            ("normalization", t.normalization),
            ("representation", t.representation),
            ("kato_slack", t.kato_slack),
            ("window_mass", t.window_mass),
            ("atom", t.atom),
            ("hardy_slack", t.hardy_slack),
        ] {
            if v <= 0.0 {
                bail!("invalid config: tolerances.{name}: must be positive, got {v}");
            }
        }
        if self.workers == 0 {
            bail!("invalid config: workers: must be >= 1");
        }
        Ok(())
    }
}
