//! Configuration-driven experiment runner.
//!
//! `hardy-lab run <config.toml> [--out DIR] [--seed N] [--workers N]` executes
//! the studies requested by the config, writes a JSON report plus per-study
//! CSV profiles, and exits nonzero when any non-skipped check fails.
//! `hardy-lab list` prints the study catalog.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};

use hardy_lab_cli::config::ExperimentConfig;
use hardy_lab_cli::studies::catalog;
use hardy_lab_cli::{execute, format_check};

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(cmd) = args.first() else {
        print_usage();
        return Ok(ExitCode::from(2));
    };
    match cmd.as_str() {
        "list" => {
            for s in catalog() {
                println!("{:<24} {}", s.id, s.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        "run" => {
            let (config_path, overrides) = parse_run_args(&args[1..])?;
            let mut cfg = ExperimentConfig::load(&config_path)?;
            if let Some(out) = overrides.out {
                cfg.out_dir = out;
            }
            if let Some(seed) = overrides.seed {
                cfg.seed = seed;
            }
            if let Some(workers) = overrides.workers {
                cfg.workers = workers;
            }
            cfg.validate()?;
            let report = execute(&cfg)?;
            for study in &report.studies {
                for check in &study.checks {
                    println!("{}", format_check(&study.study, check));
                }
            }
            let failed = report.summary.fail;
            println!(
                "{}: {} pass, {} fail, {} skipped -> {}",
                cfg.id,
                report.summary.pass,
                failed,
                report.summary.skipped,
                Path::new(&cfg.out_dir).join("report.json").display()
            );
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        other => {
            eprintln!("unknown command '{other}'");
            print_usage();
            Ok(ExitCode::from(2))
        }
    }
}

struct Overrides {
    out: Option<String>,
    seed: Option<u64>,
    workers: Option<usize>,
}

fn parse_run_args(args: &[String]) -> Result<(PathBuf, Overrides)> {
    let mut config_path = None;
    let mut overrides = Overrides { out: None, seed: None, workers: None };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--out" => {
                overrides.out =
                    Some(it.next().context("--out needs a directory")?.clone());
            }
            "--seed" => {
                overrides.seed = Some(
                    it.next()
                        .context("--seed needs a value")?
                        .parse()
                        .context("--seed must be an integer")?,
                );
            }
            "--workers" => {
                overrides.workers = Some(
                    it.next()
                        .context("--workers needs a value")?
                        .parse()
                        .context("--workers must be an integer")?,
                );
            }
            other if config_path.is_none() => {
                config_path = Some(PathBuf::from(other));
            }
            other => bail!("unexpected argument '{other}'"),
        }
    }
    Ok((config_path.context("run needs a config file path")?, overrides))
}

fn print_usage() {
    eprintln!("usage: hardy-lab run <config.toml> [--out DIR] [--seed N] [--workers N]");
    eprintln!("       hardy-lab list");
}
