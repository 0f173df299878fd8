//! Domain types shared across the pipeline: questions, statements, labels,
//! atomic assumptions, verdicts, and usage accounting, plus the adjudication
//! and verbalization rules that turn per-assumption labels into an answer.
//!
//! Everything here is immutable after construction and safe to share across
//! threads.

use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::retrieval::EvidenceSet;

/// Construction-contract violations. These indicate pipeline bugs, not
/// recoverable runtime conditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractViolation {
    #[error("adjudicate requires at least one label")]
    EmptyAdjudication,
    #[error("question text must be non-empty")]
    EmptyQuestionText,
    #[error("statement text must be non-empty")]
    EmptyStatementText,
    #[error("assumption text must be non-empty")]
    EmptyAssumptionText,
    #[error("label code {0} is not 0 or 1")]
    BadLabelCode(u8),
    #[error("verdict stores label {stored} but its assumptions adjudicate to {derived}")]
    VerdictLabelMismatch { stored: Label, derived: Label },
}

/// Binary outcome of identification. The numeric codes are fixed: 0 means
/// the input contains false assumptions, 1 means all assumptions are valid.
/// All serialization uses the integer codes to avoid yes/no polarity bugs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    HasFalseAssumption,
    AllValid,
}

impl Label {
    pub const fn code(self) -> u8 {
        match self {
            Label::HasFalseAssumption => 0,
            Label::AllValid => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, ContractViolation> {
        match code {
            0 => Ok(Label::HasFalseAssumption),
            1 => Ok(Label::AllValid),
            other => Err(ContractViolation::BadLabelCode(other)),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.code())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = u8::deserialize(deserializer)?;
        Label::from_code(code).map_err(serde::de::Error::custom)
    }
}

/// Source corpus of a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corpus {
    Qa2,
    Crepe,
    FalseQa,
    Custom,
}

impl Corpus {
    pub fn as_str(self) -> &'static str {
        match self {
            Corpus::Qa2 => "qa2",
            Corpus::Crepe => "crepe",
            Corpus::FalseQa => "falseqa",
            Corpus::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qa2" => Some(Corpus::Qa2),
            "crepe" => Some(Corpus::Crepe),
            "falseqa" => Some(Corpus::FalseQa),
            "custom" => Some(Corpus::Custom),
            _ => None,
        }
    }
}

impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether a piece of input text is a question or its statement reformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Question,
    Statement,
}

impl InputKind {
    pub fn noun(self) -> &'static str {
        match self {
            InputKind::Question => "question",
            InputKind::Statement => "statement",
        }
    }
}

/// A natural-language question to be checked for false assumptions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub text: String,
    pub corpus: Corpus,
}

impl QuestionRecord {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        corpus: Corpus,
    ) -> Result<Self, ContractViolation> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ContractViolation::EmptyQuestionText);
        }
        Ok(Self { id: id.into(), text, corpus })
    }
}

/// Declarative reformation of a question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub question_id: String,
    pub text: String,
}

impl StatementRecord {
    pub fn new(
        question_id: impl Into<String>,
        text: impl Into<String>,
    ) -> Result<Self, ContractViolation> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ContractViolation::EmptyStatementText);
        }
        Ok(Self { question_id: question_id.into(), text })
    }
}

/// A single elemental proposition stated or implied by a question.
///
/// Indices are 1-based and contiguous within a question; the enumeration
/// parser re-indexes whatever numbering the model emitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicAssumption {
    pub question_id: String,
    pub index: u32,
    pub text: String,
}

impl AtomicAssumption {
    pub fn new(
        question_id: impl Into<String>,
        index: u32,
        text: impl Into<String>,
    ) -> Result<Self, ContractViolation> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ContractViolation::EmptyAssumptionText);
        }
        Ok(Self { question_id: question_id.into(), index, text })
    }
}

/// An atomic assumption together with its validation outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatedAssumption {
    pub assumption: AtomicAssumption,
    pub label: Label,
    pub evidence_used: Option<EvidenceSet>,
}

/// Token and call counts for one or more completions. Addition is
/// component-wise; the `estimated` flag is sticky so estimated counts are
/// never silently mixed into reports as true counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageRecord {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub llm_calls: u64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub estimated: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl UsageRecord {
    pub fn single_call(prompt_tokens: u64, completion_tokens: u64) -> Self {
        Self { prompt_tokens, completion_tokens, llm_calls: 1, estimated: false }
    }
}

impl Add for UsageRecord {
    type Output = UsageRecord;

    fn add(self, rhs: UsageRecord) -> UsageRecord {
        UsageRecord {
            prompt_tokens: self.prompt_tokens + rhs.prompt_tokens,
            completion_tokens: self.completion_tokens + rhs.completion_tokens,
            llm_calls: self.llm_calls + rhs.llm_calls,
            estimated: self.estimated || rhs.estimated,
        }
    }
}

impl AddAssign for UsageRecord {
    fn add_assign(&mut self, rhs: UsageRecord) {
        *self = *self + rhs;
    }
}

/// Per-question events worth surfacing in reports: fallbacks taken and
/// evidence downgrades. Serialized as snake_case strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunFlag {
    /// Statement transformation returned nothing; the question text was used.
    TransformFallback,
    /// The yes/no completion was unparseable; defaulted to all-valid.
    UnparseableVerdictFallback,
    /// Assumption generation produced no items; fell back to direct identify.
    EmptyDecompositionFallback,
    /// Evidence came back empty; the no-evidence prompt was used instead.
    EvidenceDowngraded,
}

impl RunFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RunFlag::TransformFallback => "transform_fallback",
            RunFlag::UnparseableVerdictFallback => "unparseable_verdict_fallback",
            RunFlag::EmptyDecompositionFallback => "empty_decomposition_fallback",
            RunFlag::EvidenceDowngraded => "evidence_downgraded",
        }
    }
}

/// Final record for one question: the label, any validated assumptions,
/// the verbalized answer, and the usage spent producing it.
///
/// Construction enforces that a non-empty assumption list adjudicates to the
/// stored label, so a `Verdict` can never carry an inconsistent pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    question_id: String,
    label: Label,
    per_assumption: Vec<ValidatedAssumption>,
    answer_text: String,
    strategy_id: String,
    usage: UsageRecord,
    flags: Vec<RunFlag>,
}

impl Verdict {
    pub fn new(
        question_id: impl Into<String>,
        label: Label,
        per_assumption: Vec<ValidatedAssumption>,
        answer_text: impl Into<String>,
        strategy_id: impl Into<String>,
        usage: UsageRecord,
        flags: Vec<RunFlag>,
    ) -> Result<Self, ContractViolation> {
        if !per_assumption.is_empty() {
            let labels: Vec<Label> = per_assumption.iter().map(|v| v.label).collect();
            let derived = adjudicate(&labels)?;
            if derived != label {
                return Err(ContractViolation::VerdictLabelMismatch { stored: label, derived });
            }
        }
        Ok(Self {
            question_id: question_id.into(),
            label,
            per_assumption,
            answer_text: answer_text.into(),
            strategy_id: strategy_id.into(),
            usage,
            flags,
        })
    }

    pub fn question_id(&self) -> &str {
        &self.question_id
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn per_assumption(&self) -> &[ValidatedAssumption] {
        &self.per_assumption
    }

    pub fn answer_text(&self) -> &str {
        &self.answer_text
    }

    pub fn strategy_id(&self) -> &str {
        &self.strategy_id
    }

    pub fn usage(&self) -> UsageRecord {
        self.usage
    }

    pub fn flags(&self) -> &[RunFlag] {
        &self.flags
    }
}

/// Combine per-assumption labels into a question-level label: the question
/// is clean only if every assumption holds.
pub fn adjudicate(labels: &[Label]) -> Result<Label, ContractViolation> {
    if labels.is_empty() {
        return Err(ContractViolation::EmptyAdjudication);
    }
    if labels.contains(&Label::HasFalseAssumption) {
        Ok(Label::HasFalseAssumption)
    } else {
        Ok(Label::AllValid)
    }
}

/// Render validated assumptions as a deterministic human-readable answer.
///
/// The first line states the verdict; each false assumption follows as a
/// `False:` line in index order, then each holding assumption as a `Holds:`
/// line. An empty list yields only the first line, chosen by `label`. For a
/// non-empty list, `label` must equal the adjudicated conjunction (enforced
/// where verdicts are built).
pub fn verbalize(label: Label, validated: &[ValidatedAssumption]) -> String {
    let mut out = String::from(match label {
        Label::HasFalseAssumption => "The question contains false assumptions.",
        Label::AllValid => "The question's assumptions hold.",
    });
    let mut ordered: Vec<&ValidatedAssumption> = validated.iter().collect();
    ordered.sort_by_key(|v| v.assumption.index);
    for va in ordered.iter().filter(|v| v.label == Label::HasFalseAssumption) {
        out.push_str("\nFalse: ");
        out.push_str(&va.assumption.text);
    }
    for va in ordered.iter().filter(|v| v.label == Label::AllValid) {
        out.push_str("\nHolds: ");
        out.push_str(&va.assumption.text);
    }
    out
}
