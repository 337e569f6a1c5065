//! Command-line front end of the vacuum static space lab.
//!
//! A [`RunConfig`] names a pipeline; [`run`] executes it and returns a
//! [`RunReport`] whose check records carry residuals, tolerances and
//! verdicts. Reports serialize to JSON following `schema/run_report.schema.json`;
//! ODE traces are written as CSV.

pub mod config;
pub mod pipelines;
pub mod report;
pub mod suite;

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use vss_core::catalog::{self, lookup};

pub use config::{CliError, Command, RunConfig};
pub use report::{CheckRecord, Expect, RunReport, Verdict};

use pipelines::{Outcome, Trace};

/// Executes `cfg`, writing the JSON report and CSV trace when requested.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = match cfg.command {
        Command::Verify => pipelines::verify(&space(cfg)?, cfg)?,
        Command::Identities => pipelines::identities(&space(cfg)?, cfg)?,
        Command::OdeTrace => pipelines::ode_trace(cfg)?,
        Command::OdeClassify => pipelines::ode_classify(cfg)?,
        Command::SdsScan => pipelines::sds_scan(cfg)?,
        Command::Suite => {
            let (checks, summary) = suite::run_suite(cfg);
            Outcome {
                checks,
                summary,
                trace: None,
            }
        }
        Command::Catalog => Outcome {
            checks: Vec::new(),
            summary: json!({
                "spaces": catalog::catalog().iter().map(|s| s.summary()).collect::<Vec<_>>(),
            }),
            trace: None,
        },
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if let (Some(path), Some(trace)) = (&cfg.csv, &outcome.trace) {
        match trace {
            Trace::Ode(rows) => write_csv(path, rows)?,
            Trace::Scan(rows) => write_csv(path, rows)?,
        }
    }
    let report = RunReport::new(cfg.clone(), outcome.checks, outcome.summary, elapsed_ms);
    if let Some(path) = &cfg.json {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(report)
}

fn space(cfg: &RunConfig) -> Result<catalog::SpaceSpec, CliError> {
    let name = cfg
        .space
        .as_deref()
        .ok_or_else(|| CliError::InvalidParams("--space is required".into()))?;
    Ok(lookup(name)?)
}

/// CSV with a header row, `.` decimals and shortest round-trip floats.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
