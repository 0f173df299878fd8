//! Identification and answering strategies: the layer that composes
//! prompts, retrieval, and providers into a label (and, for the atomic
//! family, a validated assumption set) per question.

mod pipeline;
mod verifier;

pub use pipeline::{FetchStack, Pipeline, PipelineInput};
pub use verifier::{FixtureVerifier, HttpVerifier, VerifierProvider};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::LlmError;
use crate::prompts::PromptError;
use crate::retrieval::{EvidenceSet, RetrievalError, MAX_EVIDENCE_K};
use crate::types::{ContractViolation, InputKind};

/// The four strategy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyFamily {
    /// Reduce the problem to fact verification of the claim against evidence.
    FactVerify,
    /// Prompt for the label directly, with or without evidence.
    Direct,
    /// Generate knowledge with the model itself and prompt with it.
    GeneratedEvidence,
    /// Generate atomic assumptions, validate each, and adjudicate.
    Atomic,
}

impl StrategyFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyFamily::FactVerify => "fact_verify",
            StrategyFamily::Direct => "direct",
            StrategyFamily::GeneratedEvidence => "generated_evidence",
            StrategyFamily::Atomic => "atomic",
        }
    }
}

/// Where the evidence for prompting comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceMode {
    None,
    Gold,
    RetrievedByQuestion,
    RetrievedByStatement,
}

impl EvidenceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceMode::None => "none",
            EvidenceMode::Gold => "gold",
            EvidenceMode::RetrievedByQuestion => "retrieved_by_question",
            EvidenceMode::RetrievedByStatement => "retrieved_by_statement",
        }
    }
}

/// Full description of one strategy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub family: StrategyFamily,
    pub input_kind: InputKind,
    pub evidence_mode: EvidenceMode,
    pub k: usize,
    pub fv_threshold: f64,
    /// For atomic validation in a retrieved mode: reuse the question-level
    /// evidence for every assumption instead of retrieving with each
    /// assumption's own text.
    pub reuse_question_evidence: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            family: StrategyFamily::Direct,
            input_kind: InputKind::Question,
            evidence_mode: EvidenceMode::None,
            k: MAX_EVIDENCE_K,
            fv_threshold: 0.5,
            reuse_question_evidence: false,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if self.k == 0 || self.k > MAX_EVIDENCE_K {
            return Err(StrategyError::InvalidConfig(format!(
                "k must be in 1..={MAX_EVIDENCE_K}, got {}",
                self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.fv_threshold) {
            return Err(StrategyError::InvalidConfig(format!(
                "fv_threshold must be in [0, 1], got {}",
                self.fv_threshold
            )));
        }
        if self.family == StrategyFamily::GeneratedEvidence
            && self.evidence_mode != EvidenceMode::None
        {
            return Err(StrategyError::InvalidConfig(
                "generated_evidence requires evidence_mode none".into(),
            ));
        }
        if self.family == StrategyFamily::FactVerify && self.evidence_mode == EvidenceMode::None {
            return Err(StrategyError::InvalidConfig(
                "fact_verify needs an evidence mode to build the verifier document".into(),
            ));
        }
        if self.family == StrategyFamily::Atomic && self.input_kind != InputKind::Question {
            return Err(StrategyError::InvalidConfig(
                "the atomic family always consumes the question".into(),
            ));
        }
        Ok(())
    }

    /// Canonical strategy identifier recorded in every verdict and
    /// prediction line.
    pub fn id(&self) -> String {
        let mut id = format!(
            "{}+{}+{}+k{}",
            self.family.as_str(),
            self.input_kind.noun(),
            self.evidence_mode.as_str(),
            self.k
        );
        if self.family == StrategyFamily::FactVerify {
            id.push_str(&format!("+t{}", self.fv_threshold));
        }
        if self.reuse_question_evidence {
            id.push_str("+reuse_qe");
        }
        id
    }
}

/// A free-form interpretation generated for a question already identified
/// as carrying false assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretationRecord {
    pub question_id: String,
    pub text: String,
    pub evidence_used: EvidenceSet,
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("invalid strategy config: {0}")]
    InvalidConfig(String),
    #[error("question {question_id}: provider error: {source}")]
    Llm {
        question_id: String,
        #[source]
        source: LlmError,
    },
    #[error("question {question_id}: retrieval error: {source}")]
    Retrieval {
        question_id: String,
        #[source]
        source: RetrievalError,
    },
    #[error("question {question_id}: prompt error: {source}")]
    Prompt {
        question_id: String,
        #[source]
        source: PromptError,
    },
    #[error("question {question_id}: transformation produced an empty statement")]
    TransformFailed { question_id: String },
    #[error("question {question_id}: interpretation was empty")]
    InterpretFailed { question_id: String },
    #[error("{0} provider is not configured")]
    MissingProvider(&'static str),
    #[error(transparent)]
    Contract(#[from] ContractViolation),
}
