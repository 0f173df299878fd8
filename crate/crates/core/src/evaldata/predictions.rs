//! Prediction-file records: one JSON line per question, preceded by a
//! header line echoing the effective run configuration. Files are
//! append-only so interrupted runs resume without recomputation.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::strategies::StrategyFamily;
use crate::types::{Label, UsageRecord, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedAssumption {
    pub text: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub label: Label,
    pub strategy: String,
    /// Present (possibly empty) for the atomic family, null otherwise.
    pub assumptions: Option<Vec<PredictedAssumption>>,
    pub answer: Option<String>,
    pub usage: UsageRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Vec<String>>,
}

impl PredictionRecord {
    pub fn from_verdict(verdict: &Verdict, family: StrategyFamily) -> Self {
        let assumptions = if family == StrategyFamily::Atomic {
            Some(
                verdict
                    .per_assumption()
                    .iter()
                    .map(|v| PredictedAssumption {
                        text: v.assumption.text.clone(),
                        label: v.label,
                    })
                    .collect(),
            )
        } else {
            None
        };
        let flags = if verdict.flags().is_empty() {
            None
        } else {
            Some(verdict.flags().iter().map(|f| f.as_str().to_string()).collect())
        };
        Self {
            id: verdict.question_id().to_string(),
            label: verdict.label(),
            strategy: verdict.strategy_id().to_string(),
            assumptions,
            answer: Some(verdict.answer_text().to_string()),
            usage: verdict.usage(),
            flags,
        }
    }

    pub fn id_label(&self) -> (String, Label) {
        (self.id.clone(), self.label)
    }
}

/// First line of every output file: the effective configuration, echoed so
/// a run can be reproduced from its output alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHeader {
    pub run_config: serde_json::Value,
}

/// Read prediction lines, skipping a leading header if present.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, DataError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path)
        .map_err(|source| DataError::Io { path: display.clone(), source })?;
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| DataError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        if serde_json::from_str::<RunHeader>(&line).is_ok() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(&line).map_err(|e| DataError::Schema {
                path: display.clone(),
                line: index + 1,
                message: e.to_string(),
            })?;
        if !seen.insert(record.id.clone()) {
            return Err(DataError::DuplicatePrediction { id: record.id });
        }
        records.push(record);
    }
    Ok(records)
}

/// Write a header plus prediction lines to a fresh file.
pub fn write_predictions(
    path: &Path,
    header: &RunHeader,
    records: &[PredictionRecord],
) -> Result<(), DataError> {
    let display = path.display().to_string();
    let mut file = std::fs::File::create(path)
        .map_err(|source| DataError::Io { path: display.clone(), source })?;
    let mut write_line = |line: String| {
        writeln!(file, "{line}").map_err(|source| DataError::Io {
            path: display.clone(),
            source,
        })
    };
    write_line(serde_json::to_string(header).expect("header serializes"))?;
    for record in records {
        write_line(serde_json::to_string(record).expect("prediction serializes"))?;
    }
    Ok(())
}

/// Read an error-tags file: a JSON object mapping question id to category.
pub fn read_tags_file(path: &Path) -> Result<HashMap<String, String>, DataError> {
    let display = path.display().to_string();
    let raw = std::fs::read_to_string(path)
        .map_err(|source| DataError::Io { path: display.clone(), source })?;
    serde_json::from_str(&raw).map_err(|e| DataError::Schema {
        path: display,
        line: 1,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str) -> PredictionRecord {
        PredictionRecord {
            id: id.into(),
            label: Label::AllValid,
            strategy: "direct+question+none+k10".into(),
            assumptions: None,
            answer: Some("The question's assumptions hold.".into()),
            usage: UsageRecord::single_call(10, 1),
            flags: None,
        }
    }

    #[test]
    fn round_trips_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        let header = RunHeader { run_config: serde_json::json!({"strategy": "direct"}) };
        let records = vec![record("a"), record("b")];
        write_predictions(&path, &header, &records).unwrap();
        let reloaded = read_predictions(&path).unwrap();
        assert_eq!(reloaded, records);
    }

    #[test]
    fn label_serializes_as_integer_code() {
        let line = serde_json::to_string(&record("a")).unwrap();
        assert!(line.contains("\"label\":1"));
        assert!(!line.contains("flags"));
    }

    #[test]
    fn duplicate_ids_rejected_on_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        let header = RunHeader { run_config: serde_json::json!({}) };
        write_predictions(&path, &header, &[record("a"), record("a")]).unwrap();
        assert!(matches!(
            read_predictions(&path).unwrap_err(),
            DataError::DuplicatePrediction { .. }
        ));
    }
}
