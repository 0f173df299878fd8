//! Error-category tabulation. Categories are human judgments shipped in a
//! tags file; this module only counts them, split by FP/FN.

use std::collections::HashMap;

use serde::Serialize;

use super::{DataError, DatasetInstance};
use crate::types::Label;

/// The fixed error taxonomy.
pub const ERROR_CATEGORIES: [&str; 6] = [
    "Irrelevant Evidence",
    "Wrong Label",
    "Ambiguous",
    "Commonsense",
    "Domain Knowledge",
    "All Other",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TagRow {
    pub category: String,
    pub fp_count: usize,
    pub fn_count: usize,
    pub fp_share: f64,
    pub fn_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTagReport {
    pub rows: Vec<TagRow>,
    pub tagged_fp: usize,
    pub tagged_fn: usize,
}

impl ErrorTagReport {
    pub fn human_table(&self) -> String {
        let mut out = format!(
            "{:<22} {:>6} {:>8} {:>6} {:>8}\n",
            "category", "FP", "FP %", "FN", "FN %"
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<22} {:>6} {:>7.1}% {:>6} {:>7.1}%\n",
                row.category,
                row.fp_count,
                row.fp_share * 100.0,
                row.fn_count,
                row.fn_share * 100.0,
            ));
        }
        out.push_str(&format!(
            "tagged errors: {} FP, {} FN\n",
            self.tagged_fp, self.tagged_fn
        ));
        out
    }
}

/// Tabulate tagged errors by category, split into FP and FN columns with
/// shares within each column. Tags for ids that are not errors (or not in
/// the gold set) are ignored; an unknown category name is an error.
pub fn tag_errors(
    preds: &[(String, Label)],
    golds: &[DatasetInstance],
    tags: &HashMap<String, String>,
) -> Result<ErrorTagReport, DataError> {
    for (id, category) in tags {
        if !ERROR_CATEGORIES.contains(&category.as_str()) {
            return Err(DataError::UnknownCategory { name: category.clone(), id: id.clone() });
        }
    }
    let pred_map: HashMap<&str, Label> =
        preds.iter().map(|(id, label)| (id.as_str(), *label)).collect();
    let mut fp_counts: HashMap<&str, usize> = HashMap::new();
    let mut fn_counts: HashMap<&str, usize> = HashMap::new();
    let mut tagged_fp = 0usize;
    let mut tagged_fn = 0usize;
    for gold in golds {
        let Some(pred) = pred_map.get(gold.id.as_str()) else { continue };
        let Some(category) = tags.get(&gold.id) else { continue };
        match (*pred, gold.gold_label) {
            (Label::HasFalseAssumption, Label::AllValid) => {
                *fp_counts.entry(category.as_str()).or_insert(0) += 1;
                tagged_fp += 1;
            }
            (Label::AllValid, Label::HasFalseAssumption) => {
                *fn_counts.entry(category.as_str()).or_insert(0) += 1;
                tagged_fn += 1;
            }
            _ => {}
        }
    }
    let rows = ERROR_CATEGORIES
        .iter()
        .map(|category| {
            let fp_count = fp_counts.get(category).copied().unwrap_or(0);
            let fn_count = fn_counts.get(category).copied().unwrap_or(0);
            TagRow {
                category: category.to_string(),
                fp_count,
                fn_count,
                fp_share: if tagged_fp == 0 { 0.0 } else { fp_count as f64 / tagged_fp as f64 },
                fn_share: if tagged_fn == 0 { 0.0 } else { fn_count as f64 / tagged_fn as f64 },
            }
        })
        .collect();
    Ok(ErrorTagReport { rows, tagged_fp, tagged_fn })
}
