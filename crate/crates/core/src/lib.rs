//! Identify and answer questions with false assumptions.
//!
//! A question like "When did they stop using lead in pencils?" has no
//! regular answer: it assumes pencils once contained lead. This crate
//! implements strategies that detect such questions and answer them by
//! pointing at the failing assumption, built from four pieces:
//!
//! * [`llm`] — a provider-agnostic completion layer with a deterministic
//!   scripted mock, request fingerprinting, and usage metering;
//! * [`retrieval`] — two-stage evidence retrieval (documents, then top-k
//!   ranked sentences) with an offline lexical fallback scorer;
//! * [`strategies`] — direct prompting, fact-verification reduction,
//!   generated-evidence prompting, and atomic assumption generation and
//!   validation with a conjunction adjudicator;
//! * [`evaldata`] — dataset importers, accuracy/P/R/F1 reporting, McNemar
//!   significance testing, error tagging, and cost accounting.
//!
//! The `presuppose` binary wires these into `transform`, `retrieve`, `run`,
//! `eval`, `compare`, `cost`, and `tag-errors` subcommands. Every provider
//! call goes through a content-addressed disk cache, so interrupted runs
//! resume for free and mock-mode runs replay byte-identically.

pub mod cache;
pub mod config;
pub mod evaldata;
pub mod llm;
pub mod prompts;
pub mod retrieval;
pub mod runner;
pub mod session;
pub mod strategies;
pub mod types;

pub use session::Session;
pub use types::{
    adjudicate, verbalize, AtomicAssumption, ContractViolation, Corpus, InputKind, Label,
    QuestionRecord, RunFlag, StatementRecord, UsageRecord, ValidatedAssumption, Verdict,
};
