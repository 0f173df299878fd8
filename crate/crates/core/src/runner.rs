//! Concurrent dataset runner: up to a configured number of questions in
//! flight, results serialized back in input order so output files are
//! deterministic.

use rayon::prelude::*;

use crate::evaldata::{DatasetInstance, PredictionRecord};
use crate::strategies::{Pipeline, PipelineInput, StrategyConfig, StrategyError};
use crate::types::QuestionRecord;

/// Per-question outcome of a run, in input order.
pub struct RunOutcome {
    pub records: Vec<PredictionRecord>,
    /// (question id, error text) for every question that produced no output.
    pub failures: Vec<(String, String)>,
}

fn to_input(instance: &DatasetInstance) -> Result<PipelineInput, StrategyError> {
    let question =
        QuestionRecord::new(&instance.id, &instance.question_text, instance.corpus)?;
    Ok(PipelineInput::new(question).with_gold_evidence(instance.gold_evidence.clone()))
}

/// Run a strategy over every instance. Failures are collected, not fatal:
/// every question yields either a prediction record or a failure entry.
pub fn run_dataset(
    pipeline: &Pipeline,
    cfg: &StrategyConfig,
    instances: &[DatasetInstance],
    concurrency: usize,
) -> RunOutcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<PredictionRecord, (String, String)>> = pool.install(|| {
        instances
            .par_iter()
            .map(|instance| {
                let verdict = to_input(instance)
                    .and_then(|input| pipeline.run_question(&input, cfg));
                match verdict {
                    Ok(v) => Ok(PredictionRecord::from_verdict(&v, cfg.family)),
                    Err(e) => Err((instance.id.clone(), e.to_string())),
                }
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(record) => records.push(record),
            Err(failure) => failures.push(failure),
        }
    }
    RunOutcome { records, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaldata::Split;
    use crate::llm::MockProvider;
    use crate::prompts::PromptRenderer;
    use crate::session::Session;
    use crate::types::{Corpus, InputKind, Label};
    use std::sync::Arc;

    fn instance(id: &str, text: &str) -> DatasetInstance {
        DatasetInstance {
            id: id.into(),
            question_text: text.into(),
            gold_label: Label::AllValid,
            gold_evidence: None,
            split: Split::Test,
            corpus: Corpus::Custom,
        }
    }

    #[test]
    fn preserves_input_order_and_collects_failures() {
        let renderer = PromptRenderer::builtin("test-model");
        let mock = MockProvider::new();
        let instances: Vec<DatasetInstance> = (0..8)
            .map(|i| instance(&format!("q{i}"), &format!("Is question {i} fine?")))
            .collect();
        // Script all but q5.
        for inst in &instances {
            if inst.id != "q5" {
                let req = renderer
                    .render_identify(&inst.question_text, InputKind::Question, None)
                    .unwrap();
                mock.script(&req, "No");
            }
        }
        let pipeline = Pipeline::new(Session::new(Arc::new(mock), None), renderer);
        let outcome = run_dataset(&pipeline, &StrategyConfig::default(), &instances, 3);
        assert_eq!(outcome.records.len(), 7);
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].0, "q5");
        let ids: Vec<&str> = outcome.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["q0", "q1", "q2", "q3", "q4", "q6", "q7"]);
    }
}
