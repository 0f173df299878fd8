//! Dataset importers. Each corpus's native files normalize into canonical
//! JSON Lines records; the canonical format round-trips losslessly.
//!
//! Expected native layouts (documented here and in the README since the
//! upstream distributions vary):
//!
//! * qa2 — JSONL with "question" and "label"; label is 0/1 (0 = has false
//!   assumptions) or one of the strings accepted by `parse_label_string`.
//!   Optional "id", "evidence" (list of strings), "split".
//! * crepe — JSONL with "question" and either "label" or a "labels" list;
//!   "false presupposition" marks label 0, "normal" label 1. Optional
//!   "passages" (retrieved Wikipedia passages) become gold evidence.
//! * falseqa — CSV with a header row; columns "question" and "label"
//!   (1 = the question has a false premise, mapped to label 0). Optional
//!   "id", "answer", "split" columns.
//! * custom — already-canonical JSONL.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::DataError;
use crate::types::{Corpus, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Some(Split::Train),
            "validation" | "valid" | "dev" => Some(Split::Validation),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

/// One canonical dataset record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInstance {
    pub id: String,
    #[serde(rename = "question")]
    pub question_text: String,
    pub gold_label: Label,
    pub gold_evidence: Option<Vec<String>>,
    pub split: Split,
    pub corpus: Corpus,
}

/// Load a dataset file through the importer for its corpus.
pub fn load_dataset(path: &Path, corpus: Corpus) -> Result<Vec<DatasetInstance>, DataError> {
    let instances = match corpus {
        Corpus::Qa2 => import_jsonl(path, corpus)?,
        Corpus::Crepe => import_jsonl(path, corpus)?,
        Corpus::FalseQa => import_falseqa(path)?,
        Corpus::Custom => load_canonical(path)?,
    };
    check_unique_ids(&instances)?;
    Ok(instances)
}

/// Read canonical JSONL.
pub fn load_canonical(path: &Path) -> Result<Vec<DatasetInstance>, DataError> {
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut instances = Vec::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let instance: DatasetInstance =
            serde_json::from_str(&line).map_err(|e| DataError::Schema {
                path: path.display().to_string(),
                line: index + 1,
                message: e.to_string(),
            })?;
        if instance.question_text.trim().is_empty() {
            return Err(DataError::Schema {
                path: path.display().to_string(),
                line: index + 1,
                message: "question text is empty".into(),
            });
        }
        instances.push(instance);
    }
    check_unique_ids(&instances)?;
    Ok(instances)
}

/// Write canonical JSONL, one record per line.
pub fn write_canonical(path: &Path, instances: &[DatasetInstance]) -> Result<(), DataError> {
    let mut file = std::fs::File::create(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    for instance in instances {
        let line = serde_json::to_string(instance).expect("canonical records serialize");
        writeln!(file, "{line}").map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

fn check_unique_ids(instances: &[DatasetInstance]) -> Result<(), DataError> {
    let mut seen = HashSet::with_capacity(instances.len());
    for instance in instances {
        if !seen.insert(instance.id.as_str()) {
            return Err(DataError::DuplicateId { id: instance.id.clone() });
        }
    }
    Ok(())
}

/// Label strings accepted by the JSONL importers, by polarity.
fn parse_label_string(value: &str) -> Option<Label> {
    match value.to_ascii_lowercase().replace([' ', '-'], "_").as_str() {
        "0" | "false_assumption" | "false_assumptions" | "has_false_assumption"
        | "has_false_assumptions" | "false_presupposition" | "fp" | "unacceptable" | "invalid" => {
            Some(Label::HasFalseAssumption)
        }
        "1" | "valid" | "all_valid" | "normal" | "acceptable" | "no_false_assumption"
        | "no_false_assumptions" => Some(Label::AllValid),
        _ => None,
    }
}

fn json_label(value: &Value) -> Option<Label> {
    match value {
        Value::Number(n) => match n.as_u64() {
            Some(0) => Some(Label::HasFalseAssumption),
            Some(1) => Some(Label::AllValid),
            _ => None,
        },
        Value::String(s) => parse_label_string(s),
        Value::Array(items) => {
            // CREPE-style label lists: any false-presupposition entry wins.
            let mut parsed = Vec::new();
            for item in items {
                parsed.push(json_label(item)?);
            }
            if parsed.is_empty() {
                None
            } else if parsed.contains(&Label::HasFalseAssumption) {
                Some(Label::HasFalseAssumption)
            } else {
                Some(Label::AllValid)
            }
        }
        _ => None,
    }
}

fn import_jsonl(path: &Path, corpus: Corpus) -> Result<Vec<DatasetInstance>, DataError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path)
        .map_err(|source| DataError::Io { path: display.clone(), source })?;
    let mut instances = Vec::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line_no = index + 1;
        let line =
            line.map_err(|source| DataError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| DataError::Schema {
            path: display.clone(),
            line: line_no,
            message: e.to_string(),
        })?;
        let question = value
            .get("question")
            .and_then(Value::as_str)
            .filter(|q| !q.trim().is_empty())
            .ok_or_else(|| DataError::Schema {
                path: display.clone(),
                line: line_no,
                message: "missing or empty \"question\"".into(),
            })?
            .to_string();
        let label_value = value
            .get("label")
            .or_else(|| value.get("labels"))
            .ok_or_else(|| DataError::Schema {
                path: display.clone(),
                line: line_no,
                message: "missing \"label\" (or \"labels\")".into(),
            })?;
        let gold_label = json_label(label_value).ok_or_else(|| DataError::UnknownLabel {
            path: display.clone(),
            line: line_no,
            value: label_value.to_string(),
        })?;
        let gold_evidence = ["evidence", "passages"]
            .iter()
            .find_map(|key| value.get(*key))
            .and_then(Value::as_array)
            .map(|items| {
                items
                    .iter()
                    .filter_map(Value::as_str)
                    .map(String::from)
                    .collect::<Vec<_>>()
            })
            .filter(|items| !items.is_empty());
        let split = value
            .get("split")
            .and_then(Value::as_str)
            .and_then(Split::parse)
            .unwrap_or(Split::Test);
        let id = value
            .get("id")
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .unwrap_or_else(|| format!("{}-{line_no:05}", corpus.as_str()));
        instances.push(DatasetInstance {
            id,
            question_text: question,
            gold_label,
            gold_evidence,
            split,
            corpus,
        });
    }
    Ok(instances)
}

fn import_falseqa(path: &Path) -> Result<Vec<DatasetInstance>, DataError> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| DataError::Schema { path: display.clone(), line: 1, message: e.to_string() })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::Schema { path: display.clone(), line: 1, message: e.to_string() })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let question_col = column("question").ok_or_else(|| DataError::Schema {
        path: display.clone(),
        line: 1,
        message: "missing \"question\" column".into(),
    })?;
    let label_col = column("label").ok_or_else(|| DataError::Schema {
        path: display.clone(),
        line: 1,
        message: "missing \"label\" column".into(),
    })?;
    let id_col = column("id");
    let split_col = column("split");

    let mut instances = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let line_no = index + 2; // header is line 1
        let record = record.map_err(|e| DataError::Schema {
            path: display.clone(),
            line: line_no,
            message: e.to_string(),
        })?;
        let question = record.get(question_col).unwrap_or("").trim().to_string();
        if question.is_empty() {
            return Err(DataError::Schema {
                path: display.clone(),
                line: line_no,
                message: "empty question".into(),
            });
        }
        let raw_label = record.get(label_col).unwrap_or("").trim();
        // FalseQA polarity: 1 marks a false-premise question.
        let gold_label = match raw_label {
            "1" => Label::HasFalseAssumption,
            "0" => Label::AllValid,
            other => {
                return Err(DataError::UnknownLabel {
                    path: display.clone(),
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        let id = id_col
            .and_then(|c| record.get(c))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .unwrap_or_else(|| format!("falseqa-{line_no:05}"));
        let split = split_col
            .and_then(|c| record.get(c))
            .and_then(Split::parse)
            .unwrap_or(Split::Test);
        instances.push(DatasetInstance {
            id,
            question_text: question,
            gold_label,
            gold_evidence: None,
            split,
            corpus: Corpus::FalseQa,
        });
    }
    Ok(instances)
}
