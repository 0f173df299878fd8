//! Inference cost aggregation: per-question means of token counts, calls,
//! and (for the atomic family) assumptions generated.

use serde::Serialize;

use super::PredictionRecord;
use crate::types::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub n: usize,
    pub mean_prompt_tokens: f64,
    pub mean_completion_tokens: f64,
    pub mean_llm_calls: f64,
    /// Mean assumptions per question, over atomic-family questions only;
    /// absent when the run had none.
    pub mean_assumptions: Option<f64>,
    /// True when any counted usage was estimated rather than
    /// provider-reported.
    pub estimated: bool,
}

impl CostReport {
    fn from_rows(rows: &[(u64, u64, u64, bool, Option<usize>)]) -> Self {
        let n = rows.len();
        if n == 0 {
            return Self {
                n: 0,
                mean_prompt_tokens: 0.0,
                mean_completion_tokens: 0.0,
                mean_llm_calls: 0.0,
                mean_assumptions: None,
                estimated: false,
            };
        }
        let nf = n as f64;
        let prompt: u64 = rows.iter().map(|r| r.0).sum();
        let completion: u64 = rows.iter().map(|r| r.1).sum();
        let calls: u64 = rows.iter().map(|r| r.2).sum();
        let estimated = rows.iter().any(|r| r.3);
        let atomic_rows: Vec<usize> = rows.iter().filter_map(|r| r.4).collect();
        let mean_assumptions = if atomic_rows.is_empty() {
            None
        } else {
            Some(atomic_rows.iter().sum::<usize>() as f64 / atomic_rows.len() as f64)
        };
        Self {
            n,
            mean_prompt_tokens: prompt as f64 / nf,
            mean_completion_tokens: completion as f64 / nf,
            mean_llm_calls: calls as f64 / nf,
            mean_assumptions,
            estimated,
        }
    }

    pub fn human_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("questions                 {}\n", self.n));
        out.push_str(&format!("mean prompt tokens        {:.4}\n", self.mean_prompt_tokens));
        out.push_str(&format!("mean completion tokens    {:.4}\n", self.mean_completion_tokens));
        out.push_str(&format!("mean llm calls            {:.4}\n", self.mean_llm_calls));
        match self.mean_assumptions {
            Some(mean) => out.push_str(&format!("mean assumptions          {:.4}\n", mean)),
            None => out.push_str("mean assumptions          n/a\n"),
        }
        out.push_str(&format!(
            "token counts              {}\n",
            if self.estimated { "estimated (chars/4)" } else { "provider-reported" }
        ));
        out
    }
}

/// Cost report over in-memory verdicts. Atomic verdicts are recognized by
/// their strategy id.
pub fn cost_report(verdicts: &[Verdict]) -> CostReport {
    let rows: Vec<_> = verdicts
        .iter()
        .map(|v| {
            let usage = v.usage();
            let assumptions = v
                .strategy_id()
                .starts_with("atomic")
                .then(|| v.per_assumption().len());
            (
                usage.prompt_tokens,
                usage.completion_tokens,
                usage.llm_calls,
                usage.estimated,
                assumptions,
            )
        })
        .collect();
    CostReport::from_rows(&rows)
}

/// Cost report over prediction-file records. Lines with an assumptions
/// array count toward the assumptions mean.
pub fn cost_report_from_predictions(records: &[PredictionRecord]) -> CostReport {
    let rows: Vec<_> = records
        .iter()
        .map(|r| {
            (
                r.usage.prompt_tokens,
                r.usage.completion_tokens,
                r.usage.llm_calls,
                r.usage.estimated,
                r.assumptions.as_ref().map(|a| a.len()),
            )
        })
        .collect();
    CostReport::from_rows(&rows)
}
