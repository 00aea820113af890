//! Machine-readable run reports: one JSON document per run plus per-study
//! CSV profiles.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One named check: measured value against its threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub status: Status,
    pub detail: String,
}

impl CheckRecord {
    pub fn gauge(name: impl Into<String>, value: f64, threshold: f64, pass: bool, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold,
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn info(name: impl Into<String>, value: f64, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold: f64::NAN,
            status: Status::Skipped,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub checks: Vec<CheckRecord>,
    /// CSV artifacts written under the output directory.
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentStamp {
    pub timestamp_unix: u64,
    pub os: String,
    pub arch: String,
    pub version: String,
}

impl EnvironmentStamp {
    pub fn now() -> Self {
        EnvironmentStamp {
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub environment: EnvironmentStamp,
    pub config: ExperimentConfig,
    pub studies: Vec<StudyReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn summarize(config: ExperimentConfig, studies: Vec<StudyReport>) -> Self {
        let mut summary = Summary::default();
        for s in &studies {
            for c in &s.checks {
                match c.status {
                    Status::Pass => summary.pass += 1,
                    Status::Fail => summary.fail += 1,
                    Status::Skipped => summary.skipped += 1,
                }
            }
        }
        RunReport {
            environment: EnvironmentStamp::now(),
            config,
            studies,
            summary,
        }
    }
}

/// Write a numeric table with a header row.
pub fn write_csv(
    path: &std::path::Path,
    header: &str,
    rows: &[Vec<f64>],
) -> std::io::Result<()> {
    use std::io::Write;
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    Ok(())
}
