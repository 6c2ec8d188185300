//! JSON instance and report files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{reduction_percent, Instance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementDocument {
    pub id: String,
    pub candidates: Vec<String>,
}

/// Instance file contents before semantic validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub name: String,
    pub tests: Vec<String>,
    pub requirements: Vec<RequirementDocument>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("invalid report: {0}")]
    InvalidReport(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        if e.is_data() {
            if let Some(rest) = message.strip_prefix("missing field `") {
                if let Some(end) = rest.find('`') {
                    return IoError::MissingField(rest[..end].to_string());
                }
            }
        }
        IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_instance(doc: &InstanceDocument) -> String {
    serde_json::to_string_pretty(doc).expect("instance documents always serialize")
}

/// One run of one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    /// Test ids in selection order.
    pub selected: Vec<String>,
    pub size: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub total_tests: usize,
    pub runs: Vec<RunRecord>,
    pub best_size: usize,
    pub reduction_percent: String,
}

impl RunReport {
    /// Assembles a report from `(selection, millis)` pairs, refusing any
    /// selection that is not a cover of `instance`.
    pub fn new(
        instance: &Instance,
        algorithm: impl Into<String>,
        seed: u64,
        runs: Vec<(Vec<usize>, f64)>,
    ) -> Result<Self, IoError> {
        if runs.is_empty() {
            return Err(IoError::InvalidReport("report has no runs".into()));
        }
        let records: Vec<RunRecord> = runs
            .into_iter()
            .map(|(sel, millis)| RunRecord {
                size: sel.len(),
                selected: sel.iter().map(|&t| instance.test_id(t).to_string()).collect(),
                millis,
            })
            .collect();
        let best_size = records.iter().map(|r| r.size).min().unwrap();
        let report = Self {
            instance: instance.name().to_string(),
            algorithm: algorithm.into(),
            seed,
            total_tests: instance.n_tests(),
            runs: records,
            best_size,
            reduction_percent: reduction_percent(instance.n_tests(), best_size).display(),
        };
        report.check(instance)?;
        Ok(report)
    }

    /// Index of the first run achieving `best_size`.
    pub fn best_run(&self) -> &RunRecord {
        self.runs.iter().find(|r| r.size == self.best_size).unwrap()
    }

    /// Internal consistency only (no instance available).
    fn check_shape(&self) -> Result<(), IoError> {
        let best = self
            .runs
            .iter()
            .map(|r| r.size)
            .min()
            .ok_or_else(|| IoError::InvalidReport("report has no runs".into()))?;
        if best != self.best_size {
            return Err(IoError::InvalidReport(format!(
                "best_size {} differs from minimum run size {best}",
                self.best_size
            )));
        }
        for r in &self.runs {
            if r.size != r.selected.len() {
                return Err(IoError::InvalidReport(format!(
                    "run size {} but {} tests selected",
                    r.size,
                    r.selected.len()
                )));
            }
        }
        if best == 0 || best > self.total_tests {
            return Err(IoError::InvalidReport(format!(
                "best_size {best} out of range for {} tests",
                self.total_tests
            )));
        }
        let expected = reduction_percent(self.total_tests, best).display();
        if expected != self.reduction_percent {
            return Err(IoError::InvalidReport(format!(
                "reduction_percent {} should be {expected}",
                self.reduction_percent
            )));
        }
        Ok(())
    }

    /// Full check against the instance: every run must be a cover.
    pub fn check(&self, instance: &Instance) -> Result<(), IoError> {
        self.check_shape()?;
        if self.total_tests != instance.n_tests() {
            return Err(IoError::InvalidReport(format!(
                "report is for {} tests, instance has {}",
                self.total_tests,
                instance.n_tests()
            )));
        }
        for r in &self.runs {
            let mut sel = Vec::with_capacity(r.selected.len());
            for id in &r.selected {
                let t = instance
                    .test_index(id)
                    .ok_or_else(|| IoError::InvalidReport(format!("unknown test `{id}`")))?;
                sel.push(t);
            }
            if !instance.is_cover(sel) {
                return Err(IoError::InvalidReport(format!(
                    "selection {:?} is not a cover of {}",
                    r.selected,
                    instance.name()
                )));
            }
        }
        Ok(())
    }
}

/// Serializes a report after re-validating every selection against the instance.
pub fn write_report(report: &RunReport, instance: &Instance) -> Result<String, IoError> {
    report.check(instance)?;
    Ok(serde_json::to_string_pretty(report).expect("reports always serialize"))
}

pub fn parse_report(text: &str) -> Result<RunReport, IoError> {
    let report: RunReport = serde_json::from_str(text)?;
    report.check_shape()?;
    Ok(report)
}
