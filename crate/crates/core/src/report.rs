//! Structured pass/fail records shared by every verification routine.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Named scalar measurements (defect norms, coefficients, counts).
    pub metrics: BTreeMap<String, f64>,
    /// Human-readable description of every violation found.
    pub violations: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            passed: true,
            tolerance: None,
            metrics: BTreeMap::new(),
            violations: Vec::new(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    /// Record a violation; the report fails from then on.
    pub fn violation(&mut self, what: impl Into<String>) {
        self.passed = false;
        self.violations.push(what.into());
    }

    /// Keep the larger of the stored and new value under `name`.
    pub fn max_metric(&mut self, name: &str, value: f64) {
        let slot = self.metrics.entry(name.to_string()).or_insert(0.0);
        if value > *slot || value.is_nan() {
            *slot = value;
        }
    }
}
