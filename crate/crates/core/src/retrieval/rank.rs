//! Sentence ranking. Candidates are scored against the query by either an
//! embedding provider (instruction-prefixed texts, cosine similarity) or the
//! offline lexical fallback (cosine over lowercase token count vectors), then
//! the top k are returned under the deterministic ordering contract.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use serde_json::json;

use super::{EvidenceOrigin, EvidenceSentence, EvidenceSet, RetrievalError, MAX_EVIDENCE_K};
use crate::cache::DiskCache;
use crate::llm::RetryPolicy;
use crate::types::InputKind;

/// A sentence eligible for ranking, with the provenance needed for
/// tie-breaking and reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSentence {
    pub text: String,
    pub source_url: String,
    pub doc_rank: u32,
    pub sent_pos: u32,
}

impl CandidateSentence {
    /// Wrap bare sentences as candidates of a single document, preserving
    /// their order as positions.
    pub fn from_texts(texts: &[String], source_url: &str) -> Vec<CandidateSentence> {
        texts
            .iter()
            .enumerate()
            .map(|(pos, text)| CandidateSentence {
                text: text.clone(),
                source_url: source_url.to_string(),
                doc_rank: 1,
                sent_pos: pos as u32,
            })
            .collect()
    }
}

/// Scores candidate sentences against a query. Higher is more relevant.
pub trait SentenceScorer: Send + Sync {
    fn score(
        &self,
        query: &str,
        query_kind: InputKind,
        candidates: &[String],
    ) -> Result<Vec<f64>, RetrievalError>;
}

/// Score every candidate and return the top `k` as an `EvidenceSet`:
/// descending score, ties broken by (doc_rank asc, sent_pos asc). The output
/// is a deterministic function of the candidate set, query, scorer, and k;
/// permuting the candidates changes nothing.
pub fn rank_sentences(
    candidates: &[CandidateSentence],
    query: &str,
    query_kind: InputKind,
    k: usize,
    scorer: &dyn SentenceScorer,
    question_id: &str,
    origin: EvidenceOrigin,
) -> Result<EvidenceSet, RetrievalError> {
    if k == 0 || k > MAX_EVIDENCE_K {
        return Err(RetrievalError::BadK(k));
    }
    if candidates.is_empty() {
        return Ok(EvidenceSet::empty(question_id, origin, k));
    }
    let texts: Vec<String> = candidates.iter().map(|c| c.text.clone()).collect();
    let scores = scorer.score(query, query_kind, &texts)?;
    if scores.len() != candidates.len() {
        return Err(RetrievalError::Embedding(format!(
            "scorer returned {} scores for {} candidates",
            scores.len(),
            candidates.len()
        )));
    }

    let mut scored: Vec<EvidenceSentence> = candidates
        .iter()
        .zip(scores.iter())
        .map(|(c, score)| EvidenceSentence {
            text: c.text.clone(),
            score: *score,
            source_url: c.source_url.clone(),
            doc_rank: c.doc_rank,
            sent_pos: c.sent_pos,
        })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.doc_rank.cmp(&b.doc_rank))
            .then(a.sent_pos.cmp(&b.sent_pos))
            .then(a.text.cmp(&b.text))
    });
    scored.truncate(k);
    Ok(EvidenceSet { question_id: question_id.to_string(), sentences: scored, origin, k })
}

/// Offline fallback scorer: cosine similarity between lowercase token count
/// vectors, with tokens split on Unicode word boundaries. Needs no network
/// or model, so the full pipeline stays runnable and testable anywhere.
#[derive(Debug, Default, Clone, Copy)]
pub struct LexicalScorer;

impl LexicalScorer {
    pub fn cosine(a: &str, b: &str) -> f64 {
        let va = token_counts(a);
        let vb = token_counts(b);
        cosine_of_counts(&va, &vb)
    }
}

fn token_counts(text: &str) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for token in text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
    {
        *counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    counts
}

fn cosine_of_counts(a: &HashMap<String, u64>, b: &HashMap<String, u64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(tok, ca)| b.get(tok).map(|cb| (*ca as f64) * (*cb as f64)))
        .sum();
    let na: f64 = a.values().map(|c| (*c as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|c| (*c as f64).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

impl SentenceScorer for LexicalScorer {
    fn score(
        &self,
        query: &str,
        _query_kind: InputKind,
        candidates: &[String],
    ) -> Result<Vec<f64>, RetrievalError> {
        let qv = token_counts(query);
        Ok(candidates
            .iter()
            .map(|c| cosine_of_counts(&qv, &token_counts(c)))
            .collect())
    }
}

/// Instruction prefixes for the embedding model, applied to the query and
/// to every candidate before embedding.
fn query_instruction(kind: InputKind) -> &'static str {
    match kind {
        InputKind::Question => "Represent the question for retrieving supporting evidence: ",
        InputKind::Statement => "Represent the statement for retrieving supporting evidence: ",
    }
}

const EVIDENCE_INSTRUCTION: &str = "Represent the evidence for retrieval: ";

/// HTTP embedding endpoint: POST {"model", "inputs": [text, ...]} and read
/// {"embeddings": [[f64, ...], ...]}, one vector per input.
pub struct HttpEmbeddingClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    model: String,
    retry: RetryPolicy,
    cache: Option<Arc<DiskCache>>,
}

impl HttpEmbeddingClient {
    pub fn new(endpoint: &str, api_key: Option<String>, model: &str) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("reqwest client"),
            endpoint: endpoint.to_string(),
            api_key,
            model: model.to_string(),
            retry: RetryPolicy::default(),
            cache: None,
        }
    }

    pub fn with_cache(mut self, cache: Arc<DiskCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    fn cache_key(&self, text: &str) -> String {
        crate::cache::content_key("embed", &format!("{}\u{0}{}", self.model, text))
    }

    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
        let mut results: Vec<Option<Vec<f64>>> = vec![None; texts.len()];
        let mut missing: Vec<usize> = Vec::new();
        if let Some(cache) = &self.cache {
            for (i, text) in texts.iter().enumerate() {
                if let Some(v) = cache.get_typed::<Vec<f64>>(&self.cache_key(text)) {
                    results[i] = Some(v);
                } else {
                    missing.push(i);
                }
            }
        } else {
            missing = (0..texts.len()).collect();
        }
        if !missing.is_empty() {
            let inputs: Vec<&str> = missing.iter().map(|i| texts[*i].as_str()).collect();
            let body = json!({"model": self.model, "inputs": inputs});
            let value = crate::llm::http_post_json(
                &self.client,
                &self.endpoint,
                self.api_key.as_deref(),
                &body,
                &self.retry,
            )?;
            let embeddings = value
                .get("embeddings")
                .and_then(|v| v.as_array())
                .ok_or_else(|| RetrievalError::Embedding("missing embeddings array".into()))?;
            if embeddings.len() != missing.len() {
                return Err(RetrievalError::Embedding(format!(
                    "expected {} vectors, got {}",
                    missing.len(),
                    embeddings.len()
                )));
            }
            for (slot, value) in missing.iter().zip(embeddings) {
                let vector: Vec<f64> = serde_json::from_value(value.clone())
                    .map_err(|e| RetrievalError::Embedding(e.to_string()))?;
                if let Some(cache) = &self.cache {
                    cache.put_typed(&self.cache_key(&texts[*slot]), &vector);
                }
                results[*slot] = Some(vector);
            }
        }
        Ok(results.into_iter().map(|v| v.expect("filled")).collect())
    }
}

/// Embedding-backed scorer: cosine similarity between the instruction-
/// prefixed query vector and each instruction-prefixed candidate vector.
pub struct EmbeddingScorer {
    client: HttpEmbeddingClient,
}

impl EmbeddingScorer {
    pub fn new(client: HttpEmbeddingClient) -> Self {
        Self { client }
    }
}

impl SentenceScorer for EmbeddingScorer {
    fn score(
        &self,
        query: &str,
        query_kind: InputKind,
        candidates: &[String],
    ) -> Result<Vec<f64>, RetrievalError> {
        let mut texts = Vec::with_capacity(candidates.len() + 1);
        texts.push(format!("{}{}", query_instruction(query_kind), query));
        for c in candidates {
            texts.push(format!("{EVIDENCE_INSTRUCTION}{c}"));
        }
        let vectors = self.client.embed(&texts)?;
        let qv = &vectors[0];
        Ok(vectors[1..].iter().map(|cv| cosine_f64(qv, cv)).collect())
    }
}

fn cosine_f64(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
