use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Counts, Theory, TrialMetrics};
use crate::error::{Error, Result};
use crate::experiment::ExperimentConfig;
use crate::protocol::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the flat table. Stable across versions of this schema.
pub const FLAT_COLUMNS: [&str; 15] = [
    "trial",
    "N",
    "mode",
    "attack",
    "rounds",
    "sifted_bits",
    "matched_rate",
    "qber",
    "ad_clicks",
    "ad_violations",
    "ad_violation_rate",
    "eve_guesses",
    "eve_correct",
    "eve_accuracy",
    "verdict",
];

/// Aggregate over all trials for one screening-set size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mode: String,
    pub attack: String,
    pub totals: Counts,
    pub sift_rate: f64,
    pub qber: Option<f64>,
    pub ad_violation_rate: Option<f64>,
    pub probe_violation_rate: Option<f64>,
    pub eve_accuracy: Option<f64>,
    pub eve_accuracy_analyzing: Option<f64>,
    pub conclusive_rate: Option<f64>,
    pub verdicts: BTreeMap<Verdict, u64>,
    pub theory: Theory,
}

impl Summary {
    pub fn from_rows<'a>(n: usize, rows: impl IntoIterator<Item = &'a TrialMetrics>) -> Result<Self> {
        let mut totals = Counts::default();
        let mut verdicts = BTreeMap::new();
        let mut mode = String::new();
        let mut attack = String::new();
        for r in rows.into_iter().filter(|r| r.n == n) {
            totals += r.counts;
            *verdicts.entry(r.verdict).or_insert(0) += 1;
            mode.clone_from(&r.mode);
            attack.clone_from(&r.attack);
        }
        Ok(Self {
            n,
            mode,
            attack,
            sift_rate: totals.sift_rate(),
            qber: totals.qber(),
            ad_violation_rate: totals.ad_violation_rate(),
            probe_violation_rate: totals.probe_violation_rate(),
            eve_accuracy: totals.eve_accuracy(),
            eve_accuracy_analyzing: totals.eve_accuracy_analyzing(),
            conclusive_rate: totals.conclusive_rate(),
            totals,
            verdicts,
            theory: Theory::for_n(n)?,
        })
    }
}

/// Outcome of one run-time assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub trials: usize,
    pub rounds_per_trial: usize,
    pub summaries: Vec<Summary>,
    pub rows: Vec<TrialMetrics>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn summary(&self, n: usize) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn security_curve(&self) -> SecurityCurve {
        SecurityCurve {
            points: self
                .summaries
                .iter()
                .map(|s| CurvePoint {
                    n: s.n,
                    sift_rate: s.sift_rate,
                    qber_under_attack: s.qber,
                    conclusive_rate: s.conclusive_rate,
                    ad_violation_rate: s.ad_violation_rate,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub sift_rate: f64,
    pub qber_under_attack: Option<f64>,
    pub conclusive_rate: Option<f64>,
    pub ad_violation_rate: Option<f64>,
}

/// Key rate and attack-suppression metrics as functions of `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityCurve {
    pub points: Vec<CurvePoint>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialize(format!("{other:?}")),
    }
}

/// Writes `<base>.json` (the full report) and `<base>.csv` (one row per
/// trial and `N`). Returns both paths.
pub fn emit_report(report: &ExperimentReport, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let json_path = with_ext(base, "json");
    let csv_path = with_ext(base, "csv");
    let mut json = serde_json::to_string_pretty(report).map_err(|e| Error::Serialize(e.to_string()))?;
    json.push('\n');
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| csv_err(&csv_path, e))?;
    w.write_record(FLAT_COLUMNS).map_err(|e| csv_err(&csv_path, e))?;
    for r in &report.rows {
        let c = &r.counts;
        w.write_record([
            r.trial.to_string(),
            r.n.to_string(),
            r.mode.clone(),
            r.attack.clone(),
            c.rounds.to_string(),
            c.sifted_bits.to_string(),
            c.sift_rate().to_string(),
            opt(c.qber()),
            c.ad_clicks.to_string(),
            c.ad_violations.to_string(),
            opt(c.ad_violation_rate()),
            c.eve_guesses.to_string(),
            c.eve_correct.to_string(),
            opt(c.eve_accuracy()),
            r.verdict.label().to_string(),
        ])
        .map_err(|e| csv_err(&csv_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok((json_path, csv_path))
}

pub fn write_security_curve(curve: &SecurityCurve, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record([
        "N",
        "sift_rate",
        "qber_under_attack",
        "conclusive_rate",
        "ad_violation_rate",
    ])
    .map_err(|e| csv_err(path, e))?;
    for p in &curve.points {
        w.write_record([
            p.n.to_string(),
            p.sift_rate.to_string(),
            opt(p.qber_under_attack),
            opt(p.conclusive_rate),
            opt(p.ad_violation_rate),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
