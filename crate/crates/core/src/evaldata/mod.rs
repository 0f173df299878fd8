//! Dataset ingestion, classification metrics, McNemar significance testing,
//! FP/FN and error-category reporting, and cost aggregation.

mod cost;
mod dataset;
mod mcnemar;
mod metrics;
mod predictions;
mod tags;

pub use cost::{cost_report, cost_report_from_predictions, CostReport};
pub use dataset::{
    load_canonical, load_dataset, write_canonical, DatasetInstance, Split,
};
pub use mcnemar::{
    chi2_p_value, exact_p_value, mcnemar, mcnemar_from_counts, McNemarMethod, McNemarResult,
};
pub use metrics::{evaluate, fp_fn_breakdown, ClassMetrics, Confusion, EvalReport};
pub use predictions::{
    read_predictions, read_tags_file, write_predictions, PredictedAssumption, PredictionRecord,
    RunHeader,
};
pub use tags::{tag_errors, ErrorTagReport, TagRow, ERROR_CATEGORIES};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}:{line}: {message}")]
    Schema { path: String, line: usize, message: String },
    #[error("{path}:{line}: unknown label value {value:?}")]
    UnknownLabel { path: String, line: usize, value: String },
    #[error("duplicate id {id:?} in dataset")]
    DuplicateId { id: String },
    #[error("duplicate prediction for id {id:?}")]
    DuplicatePrediction { id: String },
    #[error("missing predictions for {count} gold id(s), e.g. {sample:?}")]
    MissingPredictions { count: usize, sample: Vec<String> },
    #[error("predictions for {count} unknown id(s), e.g. {sample:?}")]
    UnknownPredictions { count: usize, sample: Vec<String> },
    #[error("prediction sets cover different ids (left-only {left_only}, right-only {right_only})")]
    PredictionSetsDiffer { left_only: usize, right_only: usize },
    #[error("unknown error category {name:?} for id {id:?}")]
    UnknownCategory { name: String, id: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn sample_ids_for_error(ids: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = ids.into_iter().collect();
    out.sort();
    out.truncate(5);
    out
}
