//! Model-generated evidence: prompt the LLM for knowledge about the input,
//! then treat its sentences as an evidence set. Serves as a contrast to
//! retrieval; generated text may itself hallucinate.

use super::{
    split_sentences, EvidenceOrigin, EvidenceSentence, EvidenceSet, RetrievalError,
    MAX_EVIDENCE_K,
};
use crate::prompts::PromptRenderer;
use crate::session::Session;
use crate::types::UsageRecord;

/// Generate knowledge text for `input_text` and wrap its sentences as
/// evidence with uniform scores in generation order. An empty completion
/// yields an empty set.
pub fn generate_evidence(
    session: &Session,
    renderer: &PromptRenderer,
    input_text: &str,
    question_id: &str,
) -> Result<(EvidenceSet, UsageRecord), RetrievalError> {
    let request = renderer.render_generate_knowledge(input_text);
    let response = session.complete(&request)?;
    let text = response
        .text
        .trim_start()
        .strip_prefix("Knowledge:")
        .unwrap_or(&response.text)
        .trim();
    let sentences: Vec<EvidenceSentence> = split_sentences(text)
        .into_iter()
        .take(MAX_EVIDENCE_K)
        .enumerate()
        .map(|(pos, sentence)| EvidenceSentence {
            text: sentence,
            score: 0.0,
            source_url: "generated".to_string(),
            doc_rank: 1,
            sent_pos: pos as u32,
        })
        .collect();
    Ok((
        EvidenceSet {
            question_id: question_id.to_string(),
            sentences,
            origin: EvidenceOrigin::Generated,
            k: MAX_EVIDENCE_K,
        },
        response.usage,
    ))
}
