//! McNemar's test over the discordant predictions of two classifiers on the
//! same instances. Small discordant counts use the exact two-sided binomial
//! test; larger ones the chi-square approximation with continuity
//! correction.

use std::collections::HashMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{sample_ids_for_error, DataError, DatasetInstance};
use crate::types::Label;

/// Discordant-pair budget under which the exact test is used.
const EXACT_LIMIT: u64 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McNemarMethod {
    Exact,
    Chi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McNemarResult {
    /// Instances A got wrong and B got right.
    pub b: u64,
    /// Instances A got right and B got wrong.
    pub c: u64,
    pub p_value: f64,
    pub method: McNemarMethod,
}

impl McNemarResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Two-sided exact binomial p-value: p = min(1, 2 * sum_{i=0}^{min(b,c)}
/// C(n, i) / 2^n) with n = b + c.
pub fn exact_p_value(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let m = b.min(c);
    let mut term = 0.5f64.powi(n as i32); // C(n, 0) / 2^n
    let mut sum = term;
    for i in 1..=m {
        term *= (n - i + 1) as f64 / i as f64;
        sum += term;
    }
    (2.0 * sum).min(1.0)
}

/// Chi-square p-value with continuity correction:
/// (max(0, |b-c|-1)^2)/(b+c), 1 degree of freedom. The correction is
/// clamped at zero so near-symmetric counts give p = 1, matching the exact
/// test.
pub fn chi2_p_value(b: u64, c: u64) -> f64 {
    let diff = ((b as f64 - c as f64).abs() - 1.0).max(0.0);
    let stat = diff * diff / (b + c) as f64;
    let dist = ChiSquared::new(1.0).expect("1 df");
    1.0 - dist.cdf(stat)
}

/// McNemar's test from the discordant counts alone.
pub fn mcnemar_from_counts(b: u64, c: u64) -> McNemarResult {
    if b + c == 0 {
        return McNemarResult { b, c, p_value: 1.0, method: McNemarMethod::Exact };
    }
    if b + c <= EXACT_LIMIT {
        McNemarResult { b, c, p_value: exact_p_value(b, c), method: McNemarMethod::Exact }
    } else {
        McNemarResult { b, c, p_value: chi2_p_value(b, c), method: McNemarMethod::Chi2 }
    }
}

/// Paired test over two prediction sets on the same gold instances. Both
/// sets must cover exactly the gold ids.
pub fn mcnemar(
    preds_a: &[(String, Label)],
    preds_b: &[(String, Label)],
    golds: &[DatasetInstance],
) -> Result<McNemarResult, DataError> {
    let map_a = prediction_map(preds_a)?;
    let map_b = prediction_map(preds_b)?;
    let only_a = map_a.keys().filter(|k| !map_b.contains_key(*k)).count();
    let only_b = map_b.keys().filter(|k| !map_a.contains_key(*k)).count();
    if only_a > 0 || only_b > 0 {
        return Err(DataError::PredictionSetsDiffer { left_only: only_a, right_only: only_b });
    }
    let missing: Vec<String> = golds
        .iter()
        .filter(|g| !map_a.contains_key(g.id.as_str()))
        .map(|g| g.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(DataError::MissingPredictions {
            count: missing.len(),
            sample: sample_ids_for_error(missing),
        });
    }
    let extra: Vec<String> = map_a
        .keys()
        .filter(|id| !golds.iter().any(|g| g.id == **id))
        .map(|id| id.to_string())
        .collect();
    if !extra.is_empty() {
        return Err(DataError::UnknownPredictions {
            count: extra.len(),
            sample: sample_ids_for_error(extra),
        });
    }

    let mut b = 0u64;
    let mut c = 0u64;
    for gold in golds {
        let a_right = map_a[gold.id.as_str()] == gold.gold_label;
        let b_right = map_b[gold.id.as_str()] == gold.gold_label;
        match (a_right, b_right) {
            (false, true) => b += 1,
            (true, false) => c += 1,
            _ => {}
        }
    }
    Ok(mcnemar_from_counts(b, c))
}

fn prediction_map(preds: &[(String, Label)]) -> Result<HashMap<&str, Label>, DataError> {
    let mut map = HashMap::with_capacity(preds.len());
    for (id, label) in preds {
        if map.insert(id.as_str(), *label).is_some() {
            return Err(DataError::DuplicatePrediction { id: id.clone() });
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaldata::Split;
    use crate::types::Corpus;

    #[test]
    fn no_discordance_is_p_one_exact() {
        let r = mcnemar_from_counts(0, 0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, McNemarMethod::Exact);
    }

    #[test]
    fn symmetric_counts_give_p_one() {
        let r = mcnemar_from_counts(3, 3);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, McNemarMethod::Exact);
    }

    #[test]
    fn closed_form_ten_zero() {
        let r = mcnemar_from_counts(10, 0);
        assert!((r.p_value - 0.001953125).abs() < 1e-12);
        assert_eq!(r.method, McNemarMethod::Exact);
    }

    #[test]
    fn chi_square_branch_matches_reference() {
        // b=40, c=20: statistic 19^2/60 ~ 6.0167, p ~ 0.0142.
        let r = mcnemar_from_counts(40, 20);
        assert_eq!(r.method, McNemarMethod::Chi2);
        assert!((r.p_value - 0.0142).abs() < 5e-4, "p = {}", r.p_value);
    }

    #[test]
    fn exact_and_chi2_agree_in_the_band() {
        // Cross-method sanity band from randomized counts with 20 <= b+c <= 30.
        for (b, c) in [(10u64, 10u64), (14, 7), (16, 12), (20, 5), (13, 13), (18, 9)] {
            let exact = exact_p_value(b, c);
            let chi = chi2_p_value(b, c);
            assert!(
                (exact - chi).abs() <= 0.02,
                "b={b} c={c}: exact={exact} chi2={chi}"
            );
        }
    }

    fn gold(id: &str, code: u8) -> DatasetInstance {
        DatasetInstance {
            id: id.into(),
            question_text: "q?".into(),
            gold_label: Label::from_code(code).unwrap(),
            gold_evidence: None,
            split: Split::Test,
            corpus: Corpus::Custom,
        }
    }

    #[test]
    fn paired_counts_from_predictions() {
        let golds = vec![gold("a", 0), gold("b", 0), gold("c", 1), gold("d", 1)];
        // A right on a,c; B right on a,b,c,d.
        let preds_a = vec![
            ("a".to_string(), Label::HasFalseAssumption),
            ("b".to_string(), Label::AllValid),
            ("c".to_string(), Label::AllValid),
            ("d".to_string(), Label::HasFalseAssumption),
        ];
        let preds_b = vec![
            ("a".to_string(), Label::HasFalseAssumption),
            ("b".to_string(), Label::HasFalseAssumption),
            ("c".to_string(), Label::AllValid),
            ("d".to_string(), Label::AllValid),
        ];
        let r = mcnemar(&preds_a, &preds_b, &golds).unwrap();
        assert_eq!((r.b, r.c), (2, 0));
    }

    #[test]
    fn compare_with_itself_is_p_one() {
        let golds = vec![gold("a", 0), gold("b", 1)];
        let preds = vec![
            ("a".to_string(), Label::AllValid),
            ("b".to_string(), Label::AllValid),
        ];
        let r = mcnemar(&preds, &preds, &golds).unwrap();
        assert_eq!((r.b, r.c), (0, 0));
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn differing_id_sets_error() {
        let golds = vec![gold("a", 0)];
        let preds_a = vec![("a".to_string(), Label::AllValid)];
        let preds_b = vec![("z".to_string(), Label::AllValid)];
        assert!(matches!(
            mcnemar(&preds_a, &preds_b, &golds).unwrap_err(),
            DataError::PredictionSetsDiffer { .. }
        ));
    }
}
