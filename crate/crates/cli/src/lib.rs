//! Library surface of the experiment runner: config schema, report types,
//! and the study catalog. The binary in `main.rs` is a thin shell over this.

pub mod config;
pub mod report;
pub mod studies;

use std::path::PathBuf;

use anyhow::{Context, Result};

use config::ExperimentConfig;
use report::{RunReport, Status};
use studies::{run_study, StudyCtx};

/// Execute every requested study, write `report.json` and the CSV artifacts
/// under the config's output directory, and return the assembled report.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunReport> {
    let out = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&out)
        .with_context(|| format!("creating output directory {}", out.display()))?;

    let ctx = StudyCtx::new(cfg.clone(), &out);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("building worker pool")?;
    // studies run concurrently; the report keeps config order
    let reports: Vec<_> = pool.install(|| {
        use rayon::prelude::*;
        cfg.studies
            .par_iter()
            .map(|id| run_study(&ctx, id))
            .collect()
    });

    let report = RunReport::summarize(cfg.clone(), reports);
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out.join("report.json"), json)?;
    Ok(report)
}

/// Render one check as the runner's log line.
pub fn format_check(study: &str, check: &report::CheckRecord) -> String {
    let tag = match check.status {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "info",
    };
    format!(
        "[{}] {} {}: value {:.6e} (threshold {:.3e}) {}",
        study, tag, check.name, check.value, check.threshold, check.detail
    )
}
