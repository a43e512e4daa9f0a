use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent when the case is skipped (zero member,
    /// boundary case).
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Measurement {
    pub fn new(case: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Measurement {
            case: case.into(),
            lhs,
            rhs,
            ratio: Some(lhs / rhs),
            note: None,
        }
    }

    pub fn skipped(case: impl Into<String>, lhs: f64, rhs: f64, note: impl Into<String>) -> Self {
        Measurement {
            case: case.into(),
            lhs,
            rhs,
            ratio: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Exploratory run: numbers are reported, no verdict is drawn.
    Withheld,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub threshold: Option<f64>,
    pub rule: String,
    #[serde(default)]
    pub reasons: Vec<String>,
}

impl Verdict {
    pub fn new(pass: bool, threshold: Option<f64>, rule: impl Into<String>) -> Self {
        Verdict {
            status: if pass { Status::Pass } else { Status::Fail },
            threshold,
            rule: rule.into(),
            reasons: Vec::new(),
        }
    }

    pub fn because(mut self, reason: impl Into<String>) -> Self {
        self.reasons.push(reason.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub seed: u64,
    pub config: Value,
    pub measurements: Vec<Measurement>,
    /// Largest recorded ratio; `None` when every case was skipped.
    pub measured_constant: Option<f64>,
    pub verdict: Verdict,
    /// Fitted or derived scalars (δ, C, bands, margins, ...).
    pub derived: BTreeMap<String, f64>,
}

impl ExperimentReport {
    pub fn new(
        experiment_id: impl Into<String>,
        seed: u64,
        config: Value,
        measurements: Vec<Measurement>,
        verdict: Verdict,
        derived: BTreeMap<String, f64>,
    ) -> Self {
        let measured_constant = sup_ratio(&measurements);
        ExperimentReport {
            experiment_id: experiment_id.into(),
            seed,
            config,
            measurements,
            measured_constant,
            verdict,
            derived,
        }
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.measurements.iter().filter_map(|m| m.ratio)
    }

    /// Canonical JSON: object keys sorted, two-space indentation, trailing
    /// newline. Non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is always serializable");
        let mut s = serde_json::to_string_pretty(&value).expect("value is always serializable");
        s.push('\n');
        s
    }
}

/// Exact fold `max` over the recorded ratios.
pub fn sup_ratio(measurements: &[Measurement]) -> Option<f64> {
    measurements
        .iter()
        .filter_map(|m| m.ratio)
        .fold(None, |acc, r| {
            Some(acc.map_or(r, |a: f64| if r > a || r.is_nan() { r } else { a }))
        })
}

/// `(min, max)` of the recorded ratios.
pub fn ratio_band(measurements: &[Measurement]) -> Option<(f64, f64)> {
    let mut it = measurements.iter().filter_map(|m| m.ratio);
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), r| (lo.min(r), hi.max(r))))
}
