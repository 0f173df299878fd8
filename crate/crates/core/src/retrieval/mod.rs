//! Two-stage evidence retrieval: fetch top documents for a query, extract
//! their main content, segment it into sentences, and rank the sentences
//! against the query, returning the top k (k at most 10).

mod extract;
mod fetch;
mod generate;
mod rank;
mod segment;

pub use extract::extract_main_content;
pub use fetch::{
    fetch_documents, CachedPageFetcher, CachedSearchProvider, FixturePageFetcher,
    FixtureSearchProvider, HostLimiter, HttpPageFetcher, HttpSearchProvider, PageFetcher,
    SearchHit, SearchProvider,
};
pub use generate::generate_evidence;
pub use rank::{
    rank_sentences, CandidateSentence, EmbeddingScorer, HttpEmbeddingClient, LexicalScorer,
    SentenceScorer,
};
pub use segment::split_sentences;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::LlmError;

/// Highest number of evidence sentences any strategy may consume.
pub const MAX_EVIDENCE_K: usize = 10;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("search provider failure: {0}")]
    Search(String),
    #[error("page fetch failure for {url}: {message}")]
    Fetch { url: String, message: String },
    #[error("embedding provider failure: {0}")]
    Embedding(String),
    #[error("k must be between 1 and {MAX_EVIDENCE_K}, got {0}")]
    BadK(usize),
    #[error(transparent)]
    Provider(#[from] LlmError),
}

/// Where an evidence set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceOrigin {
    Gold,
    RetrievedByQuestion,
    RetrievedByStatement,
    Generated,
}

impl EvidenceOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceOrigin::Gold => "gold",
            EvidenceOrigin::RetrievedByQuestion => "retrieved_by_question",
            EvidenceOrigin::RetrievedByStatement => "retrieved_by_statement",
            EvidenceOrigin::Generated => "generated",
        }
    }
}

/// One scored evidence sentence. `doc_rank` is the 1-based rank of the
/// source document (1..=3), `sent_pos` the 0-based sentence position within
/// that document; together they break score ties deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSentence {
    pub text: String,
    pub score: f64,
    pub source_url: String,
    pub doc_rank: u32,
    pub sent_pos: u32,
}

/// Ordered evidence for one question: sentences in descending score order,
/// ties broken by (doc_rank asc, sent_pos asc), at most `k` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSet {
    pub question_id: String,
    pub sentences: Vec<EvidenceSentence>,
    pub origin: EvidenceOrigin,
    pub k: usize,
}

impl EvidenceSet {
    pub fn empty(question_id: impl Into<String>, origin: EvidenceOrigin, k: usize) -> Self {
        Self { question_id: question_id.into(), sentences: Vec::new(), origin, k }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Evidence sentences joined by "; " in rank order, the form every
    /// prompt slot and the verifier document use.
    pub fn joined_text(&self) -> String {
        self.sentences
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join("; ")
    }
}
