//! Check records and the run report written as JSON.

use serde::{Deserialize, Serialize};
use vss_core::identities::IdentityCheck;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: &str = "1.0";

/// How a measured value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    /// `value ≤ tol`
    AtMost,
    /// `value > tol`
    Exceeds,
    /// `value < tol`
    Below,
}

impl Expect {
    pub fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Expect::AtMost => value <= tol,
            Expect::Exceeds => value > tol,
            Expect::Below => value < tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    /// Measured value: the largest residual for `at_most` checks.
    #[serde(with = "lossless_float")]
    pub max_residual: f64,
    pub tol: f64,
    pub expect: Expect,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CheckRecord {
    pub fn measure(name: impl Into<String>, anchor: &str, value: f64, tol: f64, expect: Expect) -> Self {
        let verdict = if expect.holds(value, tol) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            paper_anchor: anchor.to_string(),
            max_residual: value,
            tol,
            expect,
            verdict,
            reason: None,
        }
    }

    pub fn residual(name: impl Into<String>, anchor: &str, value: f64, tol: f64) -> Self {
        Self::measure(name, anchor, value, tol, Expect::AtMost)
    }

    pub fn skipped(name: impl Into<String>, anchor: &str, tol: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            paper_anchor: anchor.to_string(),
            max_residual: 0.0,
            tol,
            expect: Expect::AtMost,
            verdict: Verdict::Skipped,
            reason: Some(reason.into()),
        }
    }

    /// A pipeline stage that could not run.
    pub fn error(name: impl Into<String>, anchor: &str, message: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            paper_anchor: anchor.to_string(),
            max_residual: f64::INFINITY,
            tol: 0.0,
            expect: Expect::AtMost,
            verdict: Verdict::Fail,
            reason: Some(message.into()),
        }
    }

    pub fn from_identity(prefix: &str, check: &IdentityCheck, expect: Expect) -> Self {
        let name = format!("{prefix}/{}", check.name);
        match (&check.skipped, check.passed) {
            (Some(reason), true) => Self::skipped(name, &check.anchor, check.tol, reason.clone()),
            (reason, _) => {
                let mut rec = Self::measure(name, &check.anchor, check.max_residual, check.tol, expect);
                if let Some(r) = reason {
                    rec.verdict = Verdict::Fail;
                    rec.reason = Some(r.clone());
                }
                rec
            }
        }
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// JSON has no infinities; they are written as strings and read back.
mod lossless_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub tool: Tool,
    pub config: RunConfig,
    /// Sorted by name.
    pub checks: Vec<CheckRecord>,
    pub totals: Totals,
    pub passed: bool,
    /// Command-specific results.
    pub summary: serde_json::Value,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(config: RunConfig, mut checks: Vec<CheckRecord>, summary: serde_json::Value, elapsed_ms: f64) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
        let totals = Totals {
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            skipped: count(Verdict::Skipped),
        };
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            tool: Tool {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            config,
            passed: totals.failed == 0,
            checks,
            totals,
            summary,
            timing: Timing { elapsed_ms },
        }
    }

    /// 0 when every check passed or was skipped, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = match c.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::Skipped => "SKIP",
                };
                let op = match c.expect {
                    Expect::AtMost => "<=",
                    Expect::Exceeds => ">",
                    Expect::Below => "<",
                };
                let mut line = format!(
                    "{tag} {:<52} {:>12.3e} {op} {:<9.1e} [{}]",
                    c.name, c.max_residual, c.tol, c.paper_anchor
                );
                if let Some(r) = &c.reason {
                    line.push_str(&format!(" ({r})"));
                }
                line
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_expectation() {
        assert_eq!(CheckRecord::residual("a", "x", 1e-10, 1e-9).verdict, Verdict::Pass);
        assert_eq!(CheckRecord::residual("a", "x", f64::NAN, 1e-9).verdict, Verdict::Fail);
        assert_eq!(
            CheckRecord::measure("a", "x", -3.0, -2.5, Expect::Below).verdict,
            Verdict::Pass
        );
        assert_eq!(
            CheckRecord::measure("a", "x", 0.0, 0.0, Expect::Exceeds).verdict,
            Verdict::Fail
        );
    }

    #[test]
    fn infinite_residual_round_trips() {
        let rec = CheckRecord::error("broken", "x", "boom");
        let text = serde_json::to_string(&rec).unwrap();
        assert!(text.contains("\"inf\""));
        let back: CheckRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
    }
}
