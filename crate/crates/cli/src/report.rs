//! Run reports and pass/fail checks.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use cpdq_core::Constants;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliResult;
use crate::format::{g17, write_file};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// Passes when `value <= tolerance`.
    Le,
    /// Passes when `value >= tolerance`.
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparator: Comparator,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparator: Comparator, tolerance: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            value,
            tolerance,
            comparator,
            passed: false,
        };
        c.evaluate();
        c
    }

    pub fn le(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparator::Le, tolerance)
    }

    pub fn ge(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparator::Ge, tolerance)
    }

    /// A yes/no outcome, recorded as a violation count against 0.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::le(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    fn evaluate(&mut self) {
        // NaN never passes
        self.passed = match self.comparator {
            Comparator::Le => self.value <= self.tolerance,
            Comparator::Ge => self.value >= self.tolerance,
        };
    }

    /// Same measurement against a tolerance of 0 (or infinity for `Ge`).
    pub fn tightened(&self) -> Self {
        let tol = match self.comparator {
            Comparator::Le => 0.0,
            Comparator::Ge => f64::INFINITY,
        };
        Self::new(self.name.clone(), self.value, self.comparator, tol)
    }

    pub fn describe(&self) -> String {
        let op = match self.comparator {
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        };
        format!(
            "{} = {} {} {} [{}]",
            self.name,
            g17(self.value),
            op,
            g17(self.tolerance),
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// The deterministic part of a run's output; timing is kept apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    /// The config as parsed, defaults filled in.
    pub scenario: Value,
    pub constants: Constants,
    pub checks: Vec<Check>,
    pub results: BTreeMap<String, Value>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    pub fn new(kind: &str, scenario: Value, constants: Constants) -> Self {
        Self {
            kind: kind.to_string(),
            scenario,
            constants,
            checks: Vec::new(),
            results: BTreeMap::new(),
            artifacts: Vec::new(),
            warnings: Vec::new(),
            passed: true,
            elapsed: Duration::ZERO,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("result serializes");
        self.results.insert(key.to_string(), v);
    }

    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and `timing.json` into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        write_file(&dir.join("report.json"), &self.to_json())?;
        let timing = serde_json::json!({ "elapsed_seconds": self.elapsed.as_secs_f64() });
        write_file(&dir.join("timing.json"), &format!("{timing}\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparators() {
        assert!(Check::le("a", 1e-9, 1e-8).passed);
        assert!(!Check::le("a", f64::NAN, 1.0).passed);
        assert!(Check::ge("b", 3.0, 1.0).passed);
        assert!(!Check::le("a", 1e-9, 1e-8).tightened().passed);
        assert!(!Check::ge("b", 3.0, 1.0).tightened().passed);
        assert!(Check::flag("c", true).passed && !Check::flag("c", false).passed);
    }

    #[test]
    fn timing_stays_out_of_the_report() {
        let mut r = RunReport::new("bounds", Value::Null, Constants::natural());
        r.elapsed = Duration::from_millis(1234);
        assert!(!r.to_json().contains("1.234"));
    }
}
