//! The pipeline: wires a completion session, prompt renderer, sentence
//! scorer, optional fetch stack, and optional verifier into the strategy
//! operations. Questions are independent units; everything here is safe to
//! call from multiple threads at once.

use std::sync::Arc;

use super::{
    EvidenceMode, InterpretationRecord, StrategyConfig, StrategyError, StrategyFamily,
    VerifierProvider,
};
use crate::llm::{CompletionRequest, CompletionResponse};
use crate::prompts::{parse_enumeration, parse_yes_no, ParseError, PromptRenderer};
use crate::retrieval::{
    extract_main_content, fetch_documents, generate_evidence, rank_sentences, split_sentences,
    CandidateSentence, EvidenceOrigin, EvidenceSet, LexicalScorer, PageFetcher, SearchProvider,
    SentenceScorer,
};
use crate::session::Session;
use crate::types::{
    adjudicate, verbalize, AtomicAssumption, InputKind, Label, QuestionRecord, RunFlag,
    StatementRecord, UsageRecord, ValidatedAssumption, Verdict,
};

/// One question plus whatever gold evidence its corpus ships.
#[derive(Debug, Clone)]
pub struct PipelineInput {
    pub question: QuestionRecord,
    pub gold_evidence: Option<Vec<String>>,
}

impl PipelineInput {
    pub fn new(question: QuestionRecord) -> Self {
        Self { question, gold_evidence: None }
    }

    pub fn with_gold_evidence(mut self, gold: Option<Vec<String>>) -> Self {
        self.gold_evidence = gold;
        self
    }
}

/// Search provider plus page fetcher, needed only for retrieved evidence
/// modes.
pub struct FetchStack {
    pub search: Arc<dyn SearchProvider>,
    pub pages: Arc<dyn PageFetcher>,
}

pub struct Pipeline {
    llm: Session,
    renderer: PromptRenderer,
    scorer: Arc<dyn SentenceScorer>,
    fetch: Option<FetchStack>,
    verifier: Option<Arc<dyn VerifierProvider>>,
}

impl Pipeline {
    /// A pipeline with the offline lexical scorer and no fetch stack or
    /// verifier; enough for evidence_mode none, gold, and generated.
    pub fn new(llm: Session, renderer: PromptRenderer) -> Self {
        Self { llm, renderer, scorer: Arc::new(LexicalScorer), fetch: None, verifier: None }
    }

    pub fn with_scorer(mut self, scorer: Arc<dyn SentenceScorer>) -> Self {
        self.scorer = scorer;
        self
    }

    pub fn with_fetch(mut self, search: Arc<dyn SearchProvider>, pages: Arc<dyn PageFetcher>) -> Self {
        self.fetch = Some(FetchStack { search, pages });
        self
    }

    pub fn with_verifier(mut self, verifier: Arc<dyn VerifierProvider>) -> Self {
        self.verifier = Some(verifier);
        self
    }

    pub fn session(&self) -> &Session {
        &self.llm
    }

    pub fn renderer(&self) -> &PromptRenderer {
        &self.renderer
    }

    fn complete_ctx(
        &self,
        question_id: &str,
        request: &CompletionRequest,
        usage: &mut UsageRecord,
    ) -> Result<CompletionResponse, StrategyError> {
        let response = self
            .llm
            .complete(request)
            .map_err(|source| StrategyError::Llm { question_id: question_id.to_string(), source })?;
        *usage += response.usage;
        Ok(response)
    }

    /// Run the configured strategy end to end for one question.
    pub fn run_question(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
    ) -> Result<Verdict, StrategyError> {
        cfg.validate()?;
        match cfg.family {
            StrategyFamily::Direct | StrategyFamily::GeneratedEvidence => self.identify(input, cfg),
            StrategyFamily::FactVerify => self.run_fact_verify(input, cfg),
            StrategyFamily::Atomic => self.run_atomic(input, cfg),
        }
    }

    /// Transform a question into its statement form. An empty completion is
    /// `TransformFailed`; strategy paths fall back to the question text and
    /// flag the verdict.
    pub fn transform_question(
        &self,
        question: &QuestionRecord,
        usage: &mut UsageRecord,
    ) -> Result<StatementRecord, StrategyError> {
        let request = self.renderer.render_transform(question);
        let response = self.complete_ctx(&question.id, &request, usage)?;
        let text = extract_statement(&response.text);
        if text.is_empty() {
            return Err(StrategyError::TransformFailed { question_id: question.id.clone() });
        }
        StatementRecord::new(&question.id, text).map_err(Into::into)
    }

    /// Transformation with the documented fallback: on an empty completion
    /// the question text stands in as the statement and the verdict is
    /// flagged.
    pub fn transform_with_fallback(
        &self,
        question: &QuestionRecord,
        usage: &mut UsageRecord,
        flags: &mut Vec<RunFlag>,
    ) -> Result<StatementRecord, StrategyError> {
        match self.transform_question(question, usage) {
            Ok(statement) => Ok(statement),
            Err(StrategyError::TransformFailed { .. }) => {
                log::warn!("question {}: transform fallback to question text", question.id);
                flags.push(RunFlag::TransformFallback);
                StatementRecord::new(&question.id, &question.text).map_err(Into::into)
            }
            Err(other) => Err(other),
        }
    }

    /// Direct identification: resolve the input text, acquire evidence per
    /// the config, render the matching prompt, and parse the yes/no label.
    pub fn identify(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
    ) -> Result<Verdict, StrategyError> {
        cfg.validate()?;
        let mut usage = UsageRecord::default();
        let mut flags = Vec::new();
        let label = self.identify_parts(input, cfg, &mut usage, &mut flags)?;
        let answer = verbalize(label, &[]);
        Verdict::new(
            &input.question.id,
            label,
            Vec::new(),
            answer,
            cfg.id(),
            usage,
            dedup_flags(flags),
        )
        .map_err(Into::into)
    }

    fn identify_parts(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
        usage: &mut UsageRecord,
        flags: &mut Vec<RunFlag>,
    ) -> Result<Label, StrategyError> {
        let question = &input.question;
        let statement = self.statement_if_needed(question, cfg, usage, flags)?;
        let input_text = match cfg.input_kind {
            InputKind::Question => question.text.clone(),
            InputKind::Statement => {
                statement.as_ref().expect("statement resolved for statement input").text.clone()
            }
        };
        let evidence =
            self.question_evidence(input, cfg, &input_text, statement.as_ref(), usage, flags)?;
        let request = self
            .renderer
            .render_identify(&input_text, cfg.input_kind, evidence.as_ref())
            .map_err(|source| StrategyError::Prompt {
                question_id: question.id.clone(),
                source,
            })?;
        let response = self.complete_ctx(&question.id, &request, usage)?;
        Ok(self.label_with_fallback(&question.id, &response.text, flags))
    }

    fn statement_if_needed(
        &self,
        question: &QuestionRecord,
        cfg: &StrategyConfig,
        usage: &mut UsageRecord,
        flags: &mut Vec<RunFlag>,
    ) -> Result<Option<StatementRecord>, StrategyError> {
        let needed = cfg.input_kind == InputKind::Statement
            || cfg.evidence_mode == EvidenceMode::RetrievedByStatement;
        if !needed {
            return Ok(None);
        }
        Ok(Some(self.transform_with_fallback(question, usage, flags)?))
    }

    /// Question-level evidence per the configured mode. An empty result
    /// downgrades to no evidence with a flag, so the no-evidence template is
    /// used instead of rendering an empty evidence slot.
    fn question_evidence(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
        input_text: &str,
        statement: Option<&StatementRecord>,
        usage: &mut UsageRecord,
        flags: &mut Vec<RunFlag>,
    ) -> Result<Option<EvidenceSet>, StrategyError> {
        let question = &input.question;
        let raw = if cfg.family == StrategyFamily::GeneratedEvidence {
            let (set, gen_usage) = generate_evidence(&self.llm, &self.renderer, input_text, &question.id)
                .map_err(|source| StrategyError::Retrieval {
                    question_id: question.id.clone(),
                    source,
                })?;
            *usage += gen_usage;
            Some(set)
        } else {
            match cfg.evidence_mode {
                EvidenceMode::None => None,
                EvidenceMode::Gold => Some(self.rank_gold_evidence(
                    input,
                    input_text,
                    cfg.input_kind,
                    cfg.k,
                )?),
                EvidenceMode::RetrievedByQuestion => Some(self.retrieve_evidence(
                    &question.id,
                    &question.text,
                    InputKind::Question,
                    cfg.k,
                )?),
                EvidenceMode::RetrievedByStatement => {
                    let statement = statement.expect("statement resolved for statement retrieval");
                    Some(self.retrieve_evidence(
                        &question.id,
                        &statement.text,
                        InputKind::Statement,
                        cfg.k,
                    )?)
                }
            }
        };
        Ok(match raw {
            Some(set) if set.is_empty() => {
                log::warn!("question {}: empty evidence, downgraded to no-evidence prompt", question.id);
                flags.push(RunFlag::EvidenceDowngraded);
                None
            }
            other => other,
        })
    }

    /// Two-stage retrieval: top documents for the query, then top-k ranked
    /// sentences.
    pub fn retrieve_evidence(
        &self,
        question_id: &str,
        query: &str,
        query_kind: InputKind,
        k: usize,
    ) -> Result<EvidenceSet, StrategyError> {
        let fetch = self.fetch.as_ref().ok_or(StrategyError::MissingProvider("search"))?;
        let wrap = |source| StrategyError::Retrieval { question_id: question_id.to_string(), source };
        let documents =
            fetch_documents(&*fetch.search, &*fetch.pages, query).map_err(wrap)?;
        let mut candidates = Vec::new();
        for (doc_index, (url, html)) in documents.iter().enumerate() {
            let content = extract_main_content(html);
            for (pos, sentence) in split_sentences(&content).into_iter().enumerate() {
                candidates.push(CandidateSentence {
                    text: sentence,
                    source_url: url.clone(),
                    doc_rank: doc_index as u32 + 1,
                    sent_pos: pos as u32,
                });
            }
        }
        let origin = match query_kind {
            InputKind::Question => EvidenceOrigin::RetrievedByQuestion,
            InputKind::Statement => EvidenceOrigin::RetrievedByStatement,
        };
        rank_sentences(&candidates, query, query_kind, k, &*self.scorer, question_id, origin)
            .map_err(wrap)
    }

    /// Gold evidence enters at the sentence-ranking stage: passages are
    /// treated as one document, segmented, and ranked against the query.
    pub fn rank_gold_evidence(
        &self,
        input: &PipelineInput,
        query: &str,
        query_kind: InputKind,
        k: usize,
    ) -> Result<EvidenceSet, StrategyError> {
        let question_id = &input.question.id;
        let gold = input.gold_evidence.as_deref().unwrap_or(&[]);
        let text = gold.join("\n\n");
        let sentences = split_sentences(&text);
        let candidates = CandidateSentence::from_texts(&sentences, "gold");
        rank_sentences(
            &candidates,
            query,
            query_kind,
            k,
            &*self.scorer,
            question_id,
            EvidenceOrigin::Gold,
        )
        .map_err(|source| StrategyError::Retrieval { question_id: question_id.clone(), source })
    }

    fn label_with_fallback(
        &self,
        question_id: &str,
        completion: &str,
        flags: &mut Vec<RunFlag>,
    ) -> Label {
        match parse_yes_no(completion) {
            Ok(label) => label,
            Err(ParseError::UnparseableVerdict { raw }) => {
                log::warn!(
                    "question {question_id}: unparseable verdict {raw:?}, defaulting to all-valid"
                );
                flags.push(RunFlag::UnparseableVerdictFallback);
                Label::AllValid
            }
            Err(ParseError::EmptyDecomposition) => unreachable!("parse_yes_no never returns this"),
        }
    }

    /// Map a verifier support probability to a label. The boundary is
    /// inclusive: support exactly at the threshold counts as valid.
    pub fn fact_verify(
        &self,
        doc_evidence: &EvidenceSet,
        claim_text: &str,
        threshold: f64,
    ) -> Result<Label, StrategyError> {
        let verifier = self.verifier.as_ref().ok_or(StrategyError::MissingProvider("verifier"))?;
        let document = doc_evidence.joined_text();
        let prob = verifier.support_prob(&document, claim_text).map_err(|source| {
            StrategyError::Llm { question_id: doc_evidence.question_id.clone(), source }
        })?;
        Ok(if prob >= threshold { Label::AllValid } else { Label::HasFalseAssumption })
    }

    fn run_fact_verify(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
    ) -> Result<Verdict, StrategyError> {
        let question = &input.question;
        let mut usage = UsageRecord::default();
        let mut flags = Vec::new();
        let statement = self.statement_if_needed(question, cfg, &mut usage, &mut flags)?;
        let claim = match cfg.input_kind {
            InputKind::Question => question.text.clone(),
            InputKind::Statement => statement.as_ref().expect("resolved").text.clone(),
        };
        let evidence = match cfg.evidence_mode {
            EvidenceMode::Gold => {
                self.rank_gold_evidence(input, &claim, cfg.input_kind, cfg.k)?
            }
            EvidenceMode::RetrievedByQuestion => {
                self.retrieve_evidence(&question.id, &question.text, InputKind::Question, cfg.k)?
            }
            EvidenceMode::RetrievedByStatement => {
                let statement = statement.as_ref().expect("resolved");
                self.retrieve_evidence(&question.id, &statement.text, InputKind::Statement, cfg.k)?
            }
            EvidenceMode::None => unreachable!("rejected by validate"),
        };
        let label = self.fact_verify(&evidence, &claim, cfg.fv_threshold)?;
        let answer = verbalize(label, &[]);
        Verdict::new(&question.id, label, Vec::new(), answer, cfg.id(), usage, dedup_flags(flags))
            .map_err(Into::into)
    }

    /// Extract atomic assumptions from the question.
    pub fn generate_assumptions(
        &self,
        question: &QuestionRecord,
        usage: &mut UsageRecord,
    ) -> Result<Vec<AtomicAssumption>, StrategyError> {
        let request = self.renderer.render_atomic(question);
        let response = self.complete_ctx(&question.id, &request, usage)?;
        parse_enumeration(&response.text, &question.id).map_err(|_| StrategyError::InvalidConfig(
            // callers catch EmptyDecomposition before this surfaces; see run_atomic
            format!("question {}: empty decomposition", question.id),
        ))
    }

    /// Validate one assumption by running the identification prompt over
    /// its text as a statement. In retrieved modes the assumption's own text
    /// seeds retrieval unless the config says to reuse the question-level
    /// evidence.
    pub fn validate_assumption(
        &self,
        assumption: &AtomicAssumption,
        input: &PipelineInput,
        cfg: &StrategyConfig,
        question_evidence: Option<&EvidenceSet>,
        usage: &mut UsageRecord,
        flags: &mut Vec<RunFlag>,
    ) -> Result<ValidatedAssumption, StrategyError> {
        let evidence = match cfg.evidence_mode {
            EvidenceMode::None => None,
            EvidenceMode::Gold => Some(self.rank_gold_evidence(
                input,
                &assumption.text,
                InputKind::Statement,
                cfg.k,
            )?),
            EvidenceMode::RetrievedByQuestion | EvidenceMode::RetrievedByStatement => {
                if cfg.reuse_question_evidence {
                    question_evidence.cloned()
                } else {
                    Some(self.retrieve_evidence(
                        &assumption.question_id,
                        &assumption.text,
                        InputKind::Statement,
                        cfg.k,
                    )?)
                }
            }
        };
        let evidence = match evidence {
            Some(set) if set.is_empty() => {
                flags.push(RunFlag::EvidenceDowngraded);
                None
            }
            other => other,
        };
        let request = self
            .renderer
            .render_identify(&assumption.text, InputKind::Statement, evidence.as_ref())
            .map_err(|source| StrategyError::Prompt {
                question_id: assumption.question_id.clone(),
                source,
            })?;
        let response = self.complete_ctx(&assumption.question_id, &request, usage)?;
        let label = self.label_with_fallback(&assumption.question_id, &response.text, flags);
        Ok(ValidatedAssumption { assumption: assumption.clone(), label, evidence_used: evidence })
    }

    /// The atomic family: generate assumptions, validate each, adjudicate,
    /// and verbalize. An empty decomposition falls back to direct
    /// identification for the question, flagged.
    pub fn run_atomic(
        &self,
        input: &PipelineInput,
        cfg: &StrategyConfig,
    ) -> Result<Verdict, StrategyError> {
        cfg.validate()?;
        let question = &input.question;
        let mut usage = UsageRecord::default();
        let mut flags = Vec::new();

        let request = self.renderer.render_atomic(question);
        let response = self.complete_ctx(&question.id, &request, &mut usage)?;
        let assumptions = match parse_enumeration(&response.text, &question.id) {
            Ok(list) => list,
            Err(_) => {
                log::warn!("question {}: empty decomposition, falling back to direct", question.id);
                flags.push(RunFlag::EmptyDecompositionFallback);
                let direct = StrategyConfig {
                    family: StrategyFamily::Direct,
                    input_kind: InputKind::Question,
                    ..cfg.clone()
                };
                let label = self.identify_parts(input, &direct, &mut usage, &mut flags)?;
                let answer = verbalize(label, &[]);
                return Verdict::new(
                    &question.id,
                    label,
                    Vec::new(),
                    answer,
                    cfg.id(),
                    usage,
                    dedup_flags(flags),
                )
                .map_err(Into::into);
            }
        };

        let question_evidence = if cfg.reuse_question_evidence {
            match cfg.evidence_mode {
                EvidenceMode::RetrievedByQuestion => Some(self.retrieve_evidence(
                    &question.id,
                    &question.text,
                    InputKind::Question,
                    cfg.k,
                )?),
                EvidenceMode::RetrievedByStatement => {
                    let statement =
                        self.transform_with_fallback(question, &mut usage, &mut flags)?;
                    Some(self.retrieve_evidence(
                        &question.id,
                        &statement.text,
                        InputKind::Statement,
                        cfg.k,
                    )?)
                }
                _ => None,
            }
            .filter(|set| {
                if set.is_empty() {
                    flags.push(RunFlag::EvidenceDowngraded);
                    false
                } else {
                    true
                }
            })
        } else {
            None
        };

        let mut validated = Vec::with_capacity(assumptions.len());
        for assumption in &assumptions {
            validated.push(self.validate_assumption(
                assumption,
                input,
                cfg,
                question_evidence.as_ref(),
                &mut usage,
                &mut flags,
            )?);
        }
        let labels: Vec<Label> = validated.iter().map(|v| v.label).collect();
        let label = adjudicate(&labels)?;
        let answer = verbalize(label, &validated);
        Verdict::new(&question.id, label, validated, answer, cfg.id(), usage, dedup_flags(flags))
            .map_err(Into::into)
    }

    /// Generate a free-form interpretation for a question already
    /// identified as label 0. The completion is returned verbatim.
    pub fn interpret(
        &self,
        question: &QuestionRecord,
        evidence: &EvidenceSet,
    ) -> Result<InterpretationRecord, StrategyError> {
        let request = self.renderer.render_interpret(question, evidence);
        let mut usage = UsageRecord::default();
        let response = self.complete_ctx(&question.id, &request, &mut usage)?;
        if response.text.trim().is_empty() {
            return Err(StrategyError::InterpretFailed { question_id: question.id.clone() });
        }
        Ok(InterpretationRecord {
            question_id: question.id.clone(),
            text: response.text,
            evidence_used: evidence.clone(),
        })
    }
}

fn extract_statement(completion: &str) -> String {
    let after_marker = completion
        .find("Statement:")
        .map(|pos| &completion[pos + "Statement:".len()..]);
    match after_marker {
        Some(rest) => rest
            .lines()
            .map(str::trim)
            .find(|line| !line.is_empty())
            .unwrap_or("")
            .to_string(),
        None => completion.trim().to_string(),
    }
}

fn dedup_flags(flags: Vec<RunFlag>) -> Vec<RunFlag> {
    let mut out = Vec::with_capacity(flags.len());
    for flag in flags {
        if !out.contains(&flag) {
            out.push(flag);
        }
    }
    out
}
