use std::collections::BTreeMap;

use galilei_core::VerificationReport;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::anchors::Anchor;

/// Violations listed per record before the rest are summarized.
const MAX_DETAILS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Informational: the result holds but a guard flagged it.
    Warn,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: Anchor,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub metrics: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub non_physical: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: Anchor) -> Self {
        Self {
            name: name.into(),
            anchor,
            status: Status::Pass,
            tolerance: None,
            metrics: BTreeMap::new(),
            non_physical: false,
            details: Vec::new(),
        }
    }

    pub fn from_report(name: impl Into<String>, anchor: Anchor, r: &VerificationReport) -> Self {
        let mut rec = Self::new(name, anchor);
        rec.tolerance = r.tolerance;
        for (k, v) in &r.metrics {
            rec.metrics.insert(k.clone(), Value::from(*v));
        }
        for v in &r.violations {
            rec.detail(v.clone());
        }
        rec.status = if r.passed { Status::Pass } else { Status::Fail };
        rec
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn metric(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }

    pub fn detail(&mut self, text: impl Into<String>) {
        match self.details.len() {
            n if n < MAX_DETAILS => self.details.push(text.into()),
            n if n == MAX_DETAILS => self.details.push("further violations omitted".into()),
            _ => {}
        }
    }

    /// Fails the record with `why` unless `ok`.
    pub fn require(mut self, ok: bool, why: impl FnOnce() -> String) -> Self {
        if !ok {
            self.status = Status::Fail;
            self.detail(why());
        }
        self
    }

    pub fn warn_if(mut self, flag: bool, why: &str) -> Self {
        if flag && self.status == Status::Pass {
            self.status = Status::Warn;
            self.detail(why);
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub target: String,
    pub scenario_digest: String,
    pub status: Status,
    pub check_count: usize,
    pub checks: Vec<CheckRecord>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(target: String, scenario_digest: String, checks: Vec<CheckRecord>, wall_time_ms: f64) -> Self {
        let status = if checks.iter().any(CheckRecord::failed) { Status::Fail } else { Status::Pass };
        Self {
            tool: "galilei",
            version: env!("CARGO_PKG_VERSION"),
            target,
            scenario_digest,
            status,
            check_count: checks.len(),
            checks,
            wall_time_ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
