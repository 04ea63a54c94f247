//! Verification reports: one record per checked instance, plus counts.
//!
//! A record passes iff `margin ≥ -budget`, where `margin` is signed so that
//! positive means the asserted relation holds with room to spare. Reports are
//! serialized deterministically (sorted input maps, shortest round-trip
//! floats, no timestamps) and written atomically.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// The relation holds, but a quadrature flagged its own result.
    LowConfidence,
    Fail,
    /// Tabulated only; never fails.
    ReportOnly,
    /// A precondition of the check is not met; the note says which.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::LowConfidence => "low-confidence",
            Status::Fail => "fail",
            Status::ReportOnly => "report-only",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub inputs: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub budget: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Builder for the `inputs` map.
#[derive(Debug, Clone, Default)]
pub struct Inputs(BTreeMap<String, Value>);

impl Inputs {
    pub fn new() -> Self {
        Inputs::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }
}

impl CheckRecord {
    fn new(check: &str, inputs: Inputs, lhs: f64, rhs: f64, margin: f64, budget: f64, status: Status) -> Self {
        CheckRecord {
            check: check.to_string(),
            inputs: inputs.0,
            lhs,
            rhs,
            margin,
            budget,
            status,
            note: None,
        }
    }

    fn judged(check: &str, inputs: Inputs, lhs: f64, rhs: f64, margin: f64, budget: f64, flagged: bool) -> Self {
        // A NaN margin fails.
        let status = if margin.is_nan() || margin < -budget {
            Status::Fail
        } else if flagged {
            Status::LowConfidence
        } else {
            Status::Pass
        };
        Self::new(check, inputs, lhs, rhs, margin, budget, status)
    }

    /// `lhs ≤ rhs`, with `margin = rhs - lhs`.
    pub fn at_most(check: &str, inputs: Inputs, lhs: f64, rhs: f64, budget: f64, flagged: bool) -> Self {
        Self::judged(check, inputs, lhs, rhs, rhs - lhs, budget, flagged)
    }

    /// `|lhs - rhs| ≤ tolerance`, with `margin = -|lhs - rhs|` and the
    /// tolerance as budget.
    pub fn close(check: &str, inputs: Inputs, lhs: f64, rhs: f64, tolerance: f64, flagged: bool) -> Self {
        Self::judged(check, inputs, lhs, rhs, -(lhs - rhs).abs(), tolerance, flagged)
    }

    /// `lhs < rhs` beyond any doubt: `margin = rhs - lhs - budget` must be positive.
    pub fn strictly_less(check: &str, inputs: Inputs, lhs: f64, rhs: f64, budget: f64) -> Self {
        let margin = rhs - lhs - budget;
        let status = if margin > 0.0 { Status::Pass } else { Status::Fail };
        Self::new(check, inputs, lhs, rhs, margin, budget, status)
    }

    /// A tabulated quantity; `lhs` and `rhs` carry whatever the check names them.
    pub fn report_only(check: &str, inputs: Inputs, lhs: f64, rhs: f64, budget: f64) -> Self {
        Self::new(check, inputs, lhs, rhs, 0.0, budget, Status::ReportOnly)
    }

    pub fn skipped(check: &str, inputs: Inputs, reason: impl Into<String>) -> Self {
        Self::new(check, inputs, 0.0, 0.0, 0.0, 0.0, Status::Skipped).with_note(reason)
    }

    /// A computation that should have succeeded and did not.
    pub fn errored(check: &str, inputs: Inputs, error: impl fmt::Display) -> Self {
        Self::new(check, inputs, 0.0, 0.0, 0.0, 0.0, Status::Fail).with_note(error.to_string())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub low_confidence: usize,
    pub fail: usize,
    pub report_only: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            seed,
            summary: Summary::default(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        let s = &mut self.summary;
        s.total += 1;
        match record.status {
            Status::Pass => s.pass += 1,
            Status::LowConfidence => s.low_confidence += 1,
            Status::Fail => s.fail += 1,
            Status::ReportOnly => s.report_only += 1,
            Status::Skipped => s.skipped += 1,
        }
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        for r in records {
            self.push(r);
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.extend(other.records);
    }

    /// True iff some record that can fail did.
    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    /// Records of one check.
    pub fn check<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.check == name)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    /// One row per record; inputs flattened to `key=value` pairs joined by `;`.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "inputs", "lhs", "rhs", "margin", "budget", "status", "note"])?;
        for r in &self.records {
            let inputs = r
                .inputs
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                r.check.clone(),
                inputs,
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.budget.to_string(),
                r.status.to_string(),
                r.note.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<dir>/<stem>.json` and `<dir>/<stem>.csv`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, HarnessError> {
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        write_atomic(&json, self.to_json().as_bytes())?;
        write_atomic(&csv, self.to_csv()?.as_bytes())?;
        Ok(vec![json, csv])
    }
}

/// Writes through a temporary file in the target directory, then renames, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_margin_within_budget() {
        let r = CheckRecord::at_most("t", Inputs::new(), 1.0 + 1e-9, 1.0, 2e-9, false);
        assert_eq!(r.status, Status::Pass);
        let r = CheckRecord::at_most("t", Inputs::new(), 1.0 + 1e-6, 1.0, 2e-9, false);
        assert_eq!(r.status, Status::Fail);
        let r = CheckRecord::at_most("t", Inputs::new(), 0.5, 1.0, 0.0, true);
        assert_eq!(r.status, Status::LowConfidence);
        let r = CheckRecord::at_most("t", Inputs::new(), f64::NAN, 1.0, 0.0, false);
        assert_eq!(r.status, Status::Fail);
        let r = CheckRecord::strictly_less("t", Inputs::new(), 1.0, 1.0 + 1e-9, 1e-8);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn summary_and_exit_state() {
        let mut rep = VerificationReport::new("s", 1);
        rep.push(CheckRecord::report_only("a", Inputs::new(), 1.0, 2.0, 0.0));
        rep.push(CheckRecord::skipped("a", Inputs::new(), "precondition"));
        assert!(!rep.failed());
        rep.push(CheckRecord::close("b", Inputs::new(), 1.0, 2.0, 0.1, false));
        assert!(rep.failed());
        assert_eq!(rep.summary.total, 3);
        assert_eq!(rep.check("a").count(), 2);
    }

    #[test]
    fn serialization_is_stable() {
        let mut rep = VerificationReport::new("s", 1);
        let inputs = Inputs::new().with("z", 1.5).with("a", "fejer");
        rep.push(CheckRecord::close("b", inputs, 0.1 + 0.2, 0.3, 1e-12, false));
        let json = rep.to_json();
        assert!(json.find("\"a\"").unwrap() < json.find("\"z\"").unwrap());
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        let csv = rep.to_csv().unwrap();
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("b,a=fejer;z=1.5,0.30000000000000004,"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("r.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
