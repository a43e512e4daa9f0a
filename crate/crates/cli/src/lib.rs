//! Configuration-driven runner for herzlab experiments.
//!
//! A config is a strict JSON document:
//!
//! ```json
//! {
//!   "version": "1",
//!   "experiment": "lemma2_duality_check",
//!   "inputs": { "q": {"form": "constant", "c": 3.0, "n": 1} },
//!   "output": { "prefix": "reports", "formats": ["json", "csv"] }
//! }
//! ```
//!
//! Reports are written to `<dir>/<experiment_id>-<seed>.{json,csv}`, where
//! `<dir>` is `output.prefix`, else `$HERZLAB_OUTPUT_DIR`, else the
//! working directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use herzlab_core::verify::{self, ExperimentReport, Status};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const CONFIG_VERSION: &str = "1";
pub const OUTPUT_DIR_ENV: &str = "HERZLAB_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] herzlab_core::Error),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory.
    #[serde(default)]
    pub prefix: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            prefix: None,
            formats: all_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: String,
    pub experiment: String,
    pub inputs: Value,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Apply `key=value` with a dotted key. The value is parsed as JSON when
/// possible and taken as a string otherwise. Missing objects are created.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        CliError::config(format!(
            "override `{assignment}` is not of the form key=value"
        ))
    })?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::config(format!(
            "override key `{key}` is malformed"
        )));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    for seg in key.split('.') {
        cur = match cur {
            Value::Object(map) => map.entry(seg).or_insert(Value::Null),
            Value::Array(items) => {
                let i: usize = seg.parse().map_err(|_| {
                    CliError::config(format!("`{seg}` in `{key}` is not an array index"))
                })?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| {
                    CliError::config(format!("index {i} in `{key}` is out of range ({len})"))
                })?
            }
            Value::Null => {
                *cur = Value::Object(Default::default());
                match cur {
                    Value::Object(map) => map.entry(seg).or_insert(Value::Null),
                    _ => unreachable!(),
                }
            }
            _ => return Err(CliError::config(format!("`{key}` descends into a scalar"))),
        };
    }
    *cur = value;
    Ok(())
}

/// Read, override and strictly parse a config; the inputs are checked
/// against the experiment's schema.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: ExperimentConfig =
        serde_json::from_value(doc).map_err(|e| CliError::config(e.to_string()))?;
    if cfg.version != CONFIG_VERSION {
        return Err(CliError::config(format!(
            "version: expected \"{CONFIG_VERSION}\", found \"{}\"",
            cfg.version
        )));
    }
    if !verify::is_known(&cfg.experiment) {
        return Err(CliError::config(format!(
            "experiment: unknown id `{}`",
            cfg.experiment
        )));
    }
    if cfg.output.formats.is_empty() {
        return Err(CliError::config(
            "output.formats: must name at least one format",
        ));
    }
    verify::validate_experiment(&cfg.experiment, &cfg.inputs)?;
    Ok(cfg)
}

/// One CSV row per measurement: `case,lhs,rhs,ratio,note`.
pub fn report_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["case", "lhs", "rhs", "ratio", "note"])
        .expect("in-memory write");
    for m in &report.measurements {
        w.write_record([
            m.case.clone(),
            m.lhs.to_string(),
            m.rhs.to_string(),
            m.ratio.map_or_else(String::new, |r| r.to_string()),
            m.note.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .prefix
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Write the requested formats; returns the written paths.
pub fn write_report(
    report: &ExperimentReport,
    dir: &Path,
    formats: &[Format],
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let stem = format!("{}-{}", report.experiment_id, report.seed);
    let mut written = Vec::new();
    for f in formats {
        let (ext, body) = match f {
            Format::Json => ("json", report.to_json()),
            Format::Csv => ("csv", report_csv(report)),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        fs::write(&path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

pub fn summary(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment: {}", report.experiment_id);
    match report.experiment_id.as_str() {
        "norm" => {
            let _ = writeln!(
                s,
                "value = {:.8} (err {:.1e})",
                report.derived["value"], report.derived["err_estimate"]
            );
        }
        "operator" => {
            for m in &report.measurements {
                let _ = writeln!(s, "{}: {:.10} (err {:.1e})", m.case, m.lhs, m.rhs);
            }
        }
        _ => {
            let measured = report.ratios().count();
            let _ = writeln!(
                s,
                "cases: {} ({} measured, {} skipped)",
                report.measurements.len(),
                measured,
                report.measurements.len() - measured
            );
            match report.measured_constant {
                Some(c) => {
                    let _ = writeln!(s, "measured constant: {c:.10}");
                }
                None => {
                    let _ = writeln!(s, "measured constant: none");
                }
            }
            for (k, v) in &report.derived {
                let _ = writeln!(s, "  {k} = {v}");
            }
        }
    }
    let status = match report.verdict.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Withheld => "WITHHELD",
    };
    let threshold = report
        .verdict
        .threshold
        .map_or_else(String::new, |t| format!(", threshold {t}"));
    let _ = writeln!(s, "verdict: {status} ({}{threshold})", report.verdict.rule);
    for r in &report.verdict.reasons {
        let _ = writeln!(s, "  - {r}");
    }
    s
}

pub fn exit_code(report: &ExperimentReport) -> i32 {
    match report.verdict.status {
        Status::Pass | Status::Withheld => 0,
        Status::Fail => 2,
    }
}

/// Run a parsed config and write its reports.
pub fn execute(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<PathBuf>), CliError> {
    let report = verify::run_experiment(&cfg.experiment, &cfg.inputs)?;
    let files = write_report(&report, &output_dir(cfg), &cfg.output.formats)?;
    Ok((report, files))
}

pub fn catalog_listing() -> String {
    let mut s = String::new();
    for e in verify::catalog() {
        let _ = writeln!(s, "{} — {}\n    {}", e.id, e.anchor, e.description);
    }
    s
}
