//! Scenario runner behind the `galilei` command.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! or configuration errors (no report is written in that case).

pub mod anchors;
pub mod checks;
pub mod report;
pub mod scenario;
pub mod suite;
pub mod tolerances;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use report::{CheckRecord, RunReport, Status};
pub use scenario::{Kind, Scenario};
pub use suite::Suite;
use tolerances::Tolerances;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Schema or usage problem, located by a dotted path into the input.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn at(path: impl Into<String>, message: impl ToString) -> Self {
        Self { path: path.into(), message: message.to_string() }
    }
}

/// Runs one parsed scenario with tolerances layered as module defaults,
/// then `suite`, then the scenario's own overrides, then `cli`.
pub fn run_scenario(
    s: &Scenario,
    suite: &BTreeMap<String, f64>,
    cli: &BTreeMap<String, f64>,
) -> Result<Vec<CheckRecord>, ConfigError> {
    let tol = Tolerances::resolve([("suite", suite), ("tolerances", &s.tolerances), ("--tol", cli)])?;
    checks::run_payload(&s.payload, &tol)
}

/// Parses and runs scenario text; `expected` pins the kind requested on the
/// command line.
pub fn verify_text(text: &str, expected: Option<Kind>, cli: &BTreeMap<String, f64>) -> Result<RunReport, ConfigError> {
    let start = Instant::now();
    let s = Scenario::parse(text)?;
    if let Some(k) = expected {
        if k != s.kind {
            return Err(ConfigError::at("kind", format!("scenario is `{}` but `{}` was requested", s.kind.as_str(), k.as_str())));
        }
    }
    let checks = run_scenario(&s, &BTreeMap::new(), cli)?;
    Ok(RunReport::new(s.kind.as_str().to_string(), s.digest, checks, elapsed_ms(start)))
}

pub fn verify_file(path: &Path, expected: Option<Kind>, cli: &BTreeMap<String, f64>) -> Result<RunReport, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::at(path.display().to_string(), e))?;
    verify_text(&text, expected, cli)
}

/// Runs every scenario of `suite` (concurrently) and assembles the records
/// in scenario order, each name prefixed by its scenario label.
pub fn run_suite(suite: Suite, cli: &BTreeMap<String, f64>) -> Result<RunReport, ConfigError> {
    let start = Instant::now();
    let suite_tols = suite.tolerances();
    let entries = suite.entries();
    let results: Vec<(String, Vec<CheckRecord>)> = entries
        .par_iter()
        .map(|(label, value)| {
            let s = Scenario::from_value(value.clone()).map_err(|e| ConfigError::at(format!("{label}.{}", e.path), e.message))?;
            let mut recs = run_scenario(&s, &suite_tols, cli)?;
            for r in &mut recs {
                r.name = format!("{label}/{}", r.name);
            }
            Ok((s.digest, recs))
        })
        .collect::<Result<_, ConfigError>>()?;
    let digest_input: String = results.iter().map(|(d, _)| d.as_str()).collect::<Vec<_>>().join("\n");
    let checks = results.into_iter().flat_map(|(_, r)| r).collect();
    Ok(RunReport::new(
        format!("suite:{}", suite.as_str()),
        report::sha256_hex(digest_input.as_bytes()),
        checks,
        elapsed_ms(start),
    ))
}

pub fn exit_code(report: &RunReport) -> i32 {
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
