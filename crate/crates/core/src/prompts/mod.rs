//! Prompt templates and output parsers. Each template is a frozen text with
//! named slots; rendering is a single pass, so inserted text is never
//! re-scanned for slot markers. Template bodies also ship as data files
//! (`src/prompts/templates/`) and can be overridden from a directory at
//! runtime for prompt studies without a rebuild.

mod parse;

pub use parse::{parse_enumeration, parse_yes_no, ParseError};

use std::path::Path;

use thiserror::Error;

use crate::llm::{CompletionRequest, GenerationParams};
use crate::retrieval::EvidenceSet;
use crate::types::{InputKind, QuestionRecord};

/// Which prompt a template renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateId {
    Transform,
    IdentifyPlain,
    IdentifyWithEvidence,
    GenerateKnowledge,
    AtomicGenerate,
    Interpret,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("slot {{{slot}}} is not bound for template {template:?}")]
    UnboundSlot { template: TemplateId, slot: String },
    #[error("template {template:?} never uses slot {{{slot}}}")]
    UnusedSlot { template: TemplateId, slot: String },
    #[error("evidence slot requires a non-empty evidence set")]
    EmptyEvidence,
    #[error("template file {path}: {message}")]
    TemplateFile { path: String, message: String },
}

/// A template body with named `{slot}` markers.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    pub id: TemplateId,
    body: String,
}

impl PromptTemplate {
    pub fn new(id: TemplateId, body: impl Into<String>) -> Self {
        Self { id, body: body.into() }
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// Substitute every slot in one left-to-right pass. Inserted values are
    /// emitted verbatim; a `{` inside a bound value renders literally.
    pub fn render(&self, bindings: &[(&str, &str)]) -> Result<String, PromptError> {
        let mut out = String::with_capacity(self.body.len() + 128);
        let mut used = vec![false; bindings.len()];
        let mut rest = self.body.as_str();
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let Some(close) = after.find('}') else {
                return Err(PromptError::UnboundSlot {
                    template: self.id,
                    slot: after.chars().take(24).collect(),
                });
            };
            let slot = &after[..close];
            match bindings.iter().position(|(name, _)| *name == slot) {
                Some(i) => {
                    out.push_str(bindings[i].1);
                    used[i] = true;
                }
                None => {
                    return Err(PromptError::UnboundSlot {
                        template: self.id,
                        slot: slot.to_string(),
                    })
                }
            }
            rest = &after[close + 1..];
        }
        out.push_str(rest);
        for (i, (name, _)) in bindings.iter().enumerate() {
            if !used[i] {
                return Err(PromptError::UnusedSlot { template: self.id, slot: name.to_string() });
            }
        }
        Ok(out)
    }
}

/// The full set of template bodies, one per (template, input kind) variant.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub transform: PromptTemplate,
    pub identify_question: PromptTemplate,
    pub identify_statement: PromptTemplate,
    pub identify_evidence_question: PromptTemplate,
    pub identify_evidence_statement: PromptTemplate,
    pub generate_knowledge: PromptTemplate,
    pub atomic: PromptTemplate,
    pub interpret: PromptTemplate,
}

const FILE_NAMES: [(&str, TemplateId); 8] = [
    ("transform.tmpl", TemplateId::Transform),
    ("identify_question.tmpl", TemplateId::IdentifyPlain),
    ("identify_statement.tmpl", TemplateId::IdentifyPlain),
    ("identify_evidence_question.tmpl", TemplateId::IdentifyWithEvidence),
    ("identify_evidence_statement.tmpl", TemplateId::IdentifyWithEvidence),
    ("generate_knowledge.tmpl", TemplateId::GenerateKnowledge),
    ("atomic.tmpl", TemplateId::AtomicGenerate),
    ("interpret.tmpl", TemplateId::Interpret),
];

impl TemplateSet {
    /// The compiled-in defaults, byte-identical to the shipped data files.
    pub fn builtin() -> Self {
        Self {
            transform: PromptTemplate::new(
                TemplateId::Transform,
                include_str!("templates/transform.tmpl"),
            ),
            identify_question: PromptTemplate::new(
                TemplateId::IdentifyPlain,
                include_str!("templates/identify_question.tmpl"),
            ),
            identify_statement: PromptTemplate::new(
                TemplateId::IdentifyPlain,
                include_str!("templates/identify_statement.tmpl"),
            ),
            identify_evidence_question: PromptTemplate::new(
                TemplateId::IdentifyWithEvidence,
                include_str!("templates/identify_evidence_question.tmpl"),
            ),
            identify_evidence_statement: PromptTemplate::new(
                TemplateId::IdentifyWithEvidence,
                include_str!("templates/identify_evidence_statement.tmpl"),
            ),
            generate_knowledge: PromptTemplate::new(
                TemplateId::GenerateKnowledge,
                include_str!("templates/generate_knowledge.tmpl"),
            ),
            atomic: PromptTemplate::new(
                TemplateId::AtomicGenerate,
                include_str!("templates/atomic.tmpl"),
            ),
            interpret: PromptTemplate::new(
                TemplateId::Interpret,
                include_str!("templates/interpret.tmpl"),
            ),
        }
    }

    /// Load overrides from a directory holding the eight `.tmpl` files.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = Self::builtin();
        for (file, id) in FILE_NAMES {
            let path = dir.join(file);
            let body = std::fs::read_to_string(&path).map_err(|e| PromptError::TemplateFile {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let template = PromptTemplate::new(id, body);
            match file {
                "transform.tmpl" => set.transform = template,
                "identify_question.tmpl" => set.identify_question = template,
                "identify_statement.tmpl" => set.identify_statement = template,
                "identify_evidence_question.tmpl" => set.identify_evidence_question = template,
                "identify_evidence_statement.tmpl" => set.identify_evidence_statement = template,
                "generate_knowledge.tmpl" => set.generate_knowledge = template,
                "atomic.tmpl" => set.atomic = template,
                "interpret.tmpl" => set.interpret = template,
                _ => unreachable!(),
            }
        }
        Ok(set)
    }
}

/// Renders templates into ready-to-send completion requests for a given
/// model. When `zero_shot_instruction` is set (the profile used for
/// reasoning models that prefer bare instructions), the plain identify
/// prompt is replaced by that instruction as the system text plus the final
/// input block only.
#[derive(Debug, Clone)]
pub struct PromptRenderer {
    templates: TemplateSet,
    model_id: String,
    zero_shot_instruction: Option<String>,
}

impl PromptRenderer {
    pub fn new(templates: TemplateSet, model_id: impl Into<String>) -> Self {
        Self { templates, model_id: model_id.into(), zero_shot_instruction: None }
    }

    pub fn builtin(model_id: impl Into<String>) -> Self {
        Self::new(TemplateSet::builtin(), model_id)
    }

    pub fn with_zero_shot_instruction(mut self, instruction: Option<String>) -> Self {
        self.zero_shot_instruction = instruction;
        self
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    fn request(&self, user_text: String, params: GenerationParams) -> CompletionRequest {
        CompletionRequest {
            model_id: self.model_id.clone(),
            system_text: String::new(),
            user_text,
            params,
        }
    }

    /// Question-to-statement transformation prompt (4-shot, generative).
    pub fn render_transform(&self, question: &QuestionRecord) -> CompletionRequest {
        let user = self
            .templates
            .transform
            .render(&[("question", &question.text)])
            .expect("transform template binds {question}");
        self.request(user, GenerationParams::generative_task())
    }

    /// Yes/no identification prompt. Without evidence this is the plain
    /// 4-shot template (or the zero-shot profile when configured); with
    /// evidence it is the evidence template, sentences joined by "; " in
    /// rank order. Passing an explicitly empty evidence set is a contract
    /// error: callers must downgrade to the no-evidence prompt instead.
    pub fn render_identify(
        &self,
        input_text: &str,
        input_kind: InputKind,
        evidence: Option<&EvidenceSet>,
    ) -> Result<CompletionRequest, PromptError> {
        match evidence {
            None => {
                if let Some(instruction) = &self.zero_shot_instruction {
                    let user = format!(
                        "Input: {input_text}\nQuestion: Does the input contain any false assumptions?\nAnswer:"
                    );
                    return Ok(CompletionRequest {
                        model_id: self.model_id.clone(),
                        system_text: instruction.clone(),
                        user_text: user,
                        params: GenerationParams::label_task(),
                    });
                }
                let template = match input_kind {
                    InputKind::Question => &self.templates.identify_question,
                    InputKind::Statement => &self.templates.identify_statement,
                };
                let user = template.render(&[("input", input_text)])?;
                Ok(self.request(user, GenerationParams::label_task()))
            }
            Some(set) => {
                if set.is_empty() {
                    return Err(PromptError::EmptyEvidence);
                }
                let template = match input_kind {
                    InputKind::Question => &self.templates.identify_evidence_question,
                    InputKind::Statement => &self.templates.identify_evidence_statement,
                };
                let joined = set.joined_text();
                let user = template.render(&[("input", input_text), ("evidence", &joined)])?;
                Ok(self.request(user, GenerationParams::label_task()))
            }
        }
    }

    /// Knowledge-generation prompt (4-shot, generative).
    pub fn render_generate_knowledge(&self, input_text: &str) -> CompletionRequest {
        let user = self
            .templates
            .generate_knowledge
            .render(&[("input", input_text)])
            .expect("generate_knowledge template binds {input}");
        self.request(user, GenerationParams::generative_task())
    }

    /// Atomic-assumption extraction prompt (4-shot chain of thought).
    pub fn render_atomic(&self, question: &QuestionRecord) -> CompletionRequest {
        let user = self
            .templates
            .atomic
            .render(&[("question", &question.text)])
            .expect("atomic template binds {question}");
        self.request(user, GenerationParams::generative_task())
    }

    /// Interpretation prompt for a question already identified as carrying
    /// false assumptions.
    pub fn render_interpret(
        &self,
        question: &QuestionRecord,
        evidence: &EvidenceSet,
    ) -> CompletionRequest {
        let joined = evidence.joined_text();
        let user = self
            .templates
            .interpret
            .render(&[("question", &question.text), ("evidence", &joined)])
            .expect("interpret template binds {question} and {evidence}");
        self.request(user, GenerationParams::generative_task())
    }
}
