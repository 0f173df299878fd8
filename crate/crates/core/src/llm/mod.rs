//! Provider-agnostic completion layer: request/response types, content
//! fingerprinting, usage metering, a deterministic scripted mock, and an
//! HTTP chat-completion client with bounded retry.

mod fingerprint;
mod http;
mod meter;
mod mock;

pub use fingerprint::{fingerprint, normalize_newlines};
pub(crate) use http::post_json_with_retry as http_post_json;
pub use http::{HttpProvider, RetryPolicy};
pub use meter::UsageMeter;
pub use mock::{MockProvider, ScriptEntry};

use std::time::Duration;

use thiserror::Error;

use crate::types::UsageRecord;

/// Sampling parameters attached to every completion request.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    pub temperature: f64,
    pub top_p: f64,
    pub frequency_penalty: f64,
    pub max_tokens: u32,
}

impl GenerationParams {
    /// Parameters for yes/no label tasks: short completions only.
    pub fn label_task() -> Self {
        Self { temperature: 0.1, top_p: 0.1, frequency_penalty: 0.0, max_tokens: 4 }
    }

    /// Parameters for generative tasks (transformation, knowledge,
    /// assumption extraction, interpretation).
    pub fn generative_task() -> Self {
        Self { temperature: 0.1, top_p: 0.1, frequency_penalty: 0.0, max_tokens: 512 }
    }
}

/// A single prompt to complete. `user_text` must be non-empty; `system_text`
/// may be empty, in which case providers send no system message.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub model_id: String,
    pub system_text: String,
    pub user_text: String,
    pub params: GenerationParams,
}

/// Provider output plus the usage spent producing it. `usage.llm_calls` is
/// always 1 for a single response.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResponse {
    pub text: String,
    pub usage: UsageRecord,
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("completion request has empty user_text")]
    EmptyRequest,
    #[error("no scripted response for fingerprint {fingerprint}")]
    MissingScript { fingerprint: String },
    #[error("network failure after {attempts} attempt(s): {message}")]
    Network { attempts: u32, message: String },
    #[error("authentication failed (status {status})")]
    Auth { status: u16 },
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32, retry_after: Option<Duration> },
    #[error("provider returned status {status}: {message}")]
    Status { status: u16, message: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("script file error: {0}")]
    Script(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A source of completions. Implementations must be safe for concurrent
/// `complete` calls.
pub trait CompletionProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError>;

    /// Short name used in logs and config echoes.
    fn name(&self) -> &'static str;
}

/// Fallback token estimate for providers that omit usage: one token per
/// four characters, rounded up. Estimated counts are flagged so reports
/// never mix them silently with true counts.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}
