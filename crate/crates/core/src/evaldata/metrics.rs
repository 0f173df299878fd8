//! Classification metrics. The positive class is `HasFalseAssumption`
//! (label 0): a false positive is a clean question predicted as having
//! false assumptions, a false negative the converse.

use std::collections::HashMap;

use serde::Serialize;

use super::{sample_ids_for_error, DataError, DatasetInstance};
use crate::types::{Corpus, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    /// Precision/recall from counts, with the documented degenerate
    /// conventions: zero predicted positives means precision 0, and F1 is 0
    /// whenever precision + recall is 0.
    fn from_counts(tp: usize, predicted_pos: usize, actual_pos: usize) -> Self {
        let precision = if predicted_pos == 0 { 0.0 } else { tp as f64 / predicted_pos as f64 };
        let recall = if actual_pos == 0 { 0.0 } else { tp as f64 / actual_pos as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    /// Metrics for the positive class, label 0 (has false assumptions).
    pub positive_class: ClassMetrics,
    /// Metrics for the negative class, label 1 (all assumptions valid).
    pub negative_class: ClassMetrics,
    pub fp_share: f64,
    pub fn_share: f64,
    pub headline_name: String,
    pub headline_value: f64,
}

impl EvalReport {
    /// Fixed-format human-readable table.
    pub fn human_table(&self) -> String {
        let c = &self.confusion;
        let mut out = String::new();
        out.push_str(&format!("n                    {}\n", self.n));
        out.push_str(&format!("accuracy             {:.4}\n", self.accuracy));
        out.push_str(&format!(
            "confusion            tp={} fp={} fn={} tn={}\n",
            c.tp, c.fp, c.fn_, c.tn
        ));
        out.push_str(&format!(
            "label 0 (false asm)  P={:.4} R={:.4} F1={:.4}\n",
            self.positive_class.precision, self.positive_class.recall, self.positive_class.f1
        ));
        out.push_str(&format!(
            "label 1 (all valid)  P={:.4} R={:.4} F1={:.4}\n",
            self.negative_class.precision, self.negative_class.recall, self.negative_class.f1
        ));
        out.push_str(&format!(
            "errors               fp_share={:.4} fn_share={:.4}\n",
            self.fp_share, self.fn_share
        ));
        out.push_str(&format!("headline             {} = {:.4}\n", self.headline_name, self.headline_value));
        out
    }
}

fn gold_map(golds: &[DatasetInstance]) -> HashMap<&str, Label> {
    golds.iter().map(|g| (g.id.as_str(), g.gold_label)).collect()
}

/// Check that predictions cover exactly the gold ids, then pair them up.
fn paired_labels(
    preds: &[(String, Label)],
    golds: &[DatasetInstance],
) -> Result<Vec<(Label, Label)>, DataError> {
    let gold = gold_map(golds);
    let mut by_id: HashMap<&str, Label> = HashMap::with_capacity(preds.len());
    for (id, label) in preds {
        if by_id.insert(id.as_str(), *label).is_some() {
            return Err(DataError::DuplicatePrediction { id: id.clone() });
        }
    }
    let unknown: Vec<String> = by_id
        .keys()
        .filter(|id| !gold.contains_key(**id))
        .map(|id| id.to_string())
        .collect();
    if !unknown.is_empty() {
        return Err(DataError::UnknownPredictions {
            count: unknown.len(),
            sample: sample_ids_for_error(unknown),
        });
    }
    let missing: Vec<String> = gold
        .keys()
        .filter(|id| !by_id.contains_key(**id))
        .map(|id| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(DataError::MissingPredictions {
            count: missing.len(),
            sample: sample_ids_for_error(missing),
        });
    }
    Ok(golds
        .iter()
        .map(|g| (by_id[g.id.as_str()], g.gold_label))
        .collect())
}

/// Score predictions against gold labels. The headline metric is accuracy,
/// except for the imbalanced CREPE corpus where it is the positive-class F1
/// (reported as "f1_pos").
pub fn evaluate(
    preds: &[(String, Label)],
    golds: &[DatasetInstance],
    corpus: Corpus,
) -> Result<EvalReport, DataError> {
    let pairs = paired_labels(preds, golds)?;
    let n = pairs.len();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    let mut tn = 0usize;
    for (pred, gold) in pairs {
        match (pred, gold) {
            (Label::HasFalseAssumption, Label::HasFalseAssumption) => tp += 1,
            (Label::HasFalseAssumption, Label::AllValid) => fp += 1,
            (Label::AllValid, Label::HasFalseAssumption) => fn_ += 1,
            (Label::AllValid, Label::AllValid) => tn += 1,
        }
    }
    let accuracy = if n == 0 { 0.0 } else { (tp + tn) as f64 / n as f64 };
    let positive_class = ClassMetrics::from_counts(tp, tp + fp, tp + fn_);
    let negative_class = ClassMetrics::from_counts(tn, tn + fn_, tn + fp);
    let errors = fp + fn_;
    let (fp_share, fn_share) = if errors == 0 {
        (0.0, 0.0)
    } else {
        (fp as f64 / errors as f64, fn_ as f64 / errors as f64)
    };
    let (headline_name, headline_value) = match corpus {
        Corpus::Crepe => ("F1(pos)".to_string(), positive_class.f1),
        _ => ("accuracy".to_string(), accuracy),
    };
    Ok(EvalReport {
        n,
        accuracy,
        confusion: Confusion { tp, fp, fn_, tn },
        positive_class,
        negative_class,
        fp_share,
        fn_share,
        headline_name,
        headline_value,
    })
}

/// Shares of false positives and false negatives among all errors; both 0
/// when there are no errors.
pub fn fp_fn_breakdown(
    preds: &[(String, Label)],
    golds: &[DatasetInstance],
) -> Result<(f64, f64), DataError> {
    let report = evaluate(preds, golds, Corpus::Custom)?;
    Ok((report.fp_share, report.fn_share))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaldata::Split;

    fn golds(labels: &[u8]) -> Vec<DatasetInstance> {
        labels
            .iter()
            .enumerate()
            .map(|(i, code)| DatasetInstance {
                id: format!("q{i}"),
                question_text: format!("question {i}?"),
                gold_label: Label::from_code(*code).unwrap(),
                gold_evidence: None,
                split: Split::Test,
                corpus: Corpus::Custom,
            })
            .collect()
    }

    fn preds(labels: &[u8]) -> Vec<(String, Label)> {
        labels
            .iter()
            .enumerate()
            .map(|(i, code)| (format!("q{i}"), Label::from_code(*code).unwrap()))
            .collect()
    }

    #[test]
    fn all_correct_is_perfect() {
        let g = golds(&[0, 1, 0, 1]);
        let p = preds(&[0, 1, 0, 1]);
        let report = evaluate(&p, &g, Corpus::Qa2).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.positive_class.f1, 1.0);
        assert_eq!(report.negative_class.f1, 1.0);
        assert_eq!((report.fp_share, report.fn_share), (0.0, 0.0));
    }

    #[test]
    fn hand_computed_confusion() {
        // tp=2, fp=1, fn=1, tn=1: positive P=2/3, R=2/3, F1=2/3, acc=3/5.
        let g = golds(&[0, 0, 0, 1, 1]);
        let p = preds(&[0, 0, 1, 0, 1]);
        let report = evaluate(&p, &g, Corpus::Qa2).unwrap();
        assert_eq!(report.confusion, Confusion { tp: 2, fp: 1, fn_: 1, tn: 1 });
        assert!((report.positive_class.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.positive_class.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.positive_class.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.accuracy - 0.6).abs() < 1e-12);
    }

    #[test]
    fn all_predicted_positive_on_balanced_set() {
        let g = golds(&[0, 0, 1, 1]);
        let p = preds(&[0, 0, 0, 0]);
        let report = evaluate(&p, &g, Corpus::Qa2).unwrap();
        assert!((report.accuracy - 0.5).abs() < 1e-12);
        assert_eq!(report.positive_class.recall, 1.0);
        assert!((report.positive_class.precision - 0.5).abs() < 1e-12);
        // No predicted negatives: negative precision is the documented 0.
        assert_eq!(report.negative_class.precision, 0.0);
        assert_eq!(report.negative_class.f1, 0.0);
    }

    #[test]
    fn crepe_headline_is_positive_f1() {
        let g = golds(&[0, 1, 1, 1]);
        let p = preds(&[0, 0, 1, 1]);
        let report = evaluate(&p, &g, Corpus::Crepe).unwrap();
        assert_eq!(report.headline_name, "F1(pos)");
        assert!((report.headline_value - report.positive_class.f1).abs() < 1e-15);
        let qa2 = evaluate(&p, &g, Corpus::Qa2).unwrap();
        assert_eq!(qa2.headline_name, "accuracy");
    }

    #[test]
    fn prediction_order_is_irrelevant() {
        let g = golds(&[0, 1, 0, 1, 0]);
        let mut p = preds(&[0, 0, 1, 1, 0]);
        let forward = evaluate(&p, &g, Corpus::Qa2).unwrap();
        p.reverse();
        let backward = evaluate(&p, &g, Corpus::Qa2).unwrap();
        assert_eq!(forward.confusion, backward.confusion);
    }

    #[test]
    fn missing_and_extra_predictions_error_with_ids() {
        let g = golds(&[0, 1]);
        let p = vec![("q0".to_string(), Label::AllValid)];
        match evaluate(&p, &g, Corpus::Qa2).unwrap_err() {
            DataError::MissingPredictions { count, sample } => {
                assert_eq!(count, 1);
                assert_eq!(sample, vec!["q1".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = preds(&[0, 1])
            .into_iter()
            .chain([("ghost".to_string(), Label::AllValid)])
            .collect::<Vec<_>>();
        assert!(matches!(
            evaluate(&p, &g, Corpus::Qa2).unwrap_err(),
            DataError::UnknownPredictions { .. }
        ));
    }

    #[test]
    fn fp_fn_shares() {
        // 2 FP, 2 FN.
        let g = golds(&[1, 1, 0, 0, 1, 0]);
        let p = preds(&[0, 0, 1, 1, 1, 0]);
        assert_eq!(fp_fn_breakdown(&p, &g).unwrap(), (0.5, 0.5));
        // 7 FP, 1 FN mirrors the 87.5/12.5 shape.
        let g = golds(&[1, 1, 1, 1, 1, 1, 1, 0, 0]);
        let p = preds(&[0, 0, 0, 0, 0, 0, 0, 1, 0]);
        let (fp_share, fn_share) = fp_fn_breakdown(&p, &g).unwrap();
        assert!((fp_share - 0.875).abs() < 1e-12);
        assert!((fn_share - 0.125).abs() < 1e-12);
        // No errors at all.
        let g = golds(&[0, 1]);
        let p = preds(&[0, 1]);
        assert_eq!(fp_fn_breakdown(&p, &g).unwrap(), (0.0, 0.0));
    }
}
