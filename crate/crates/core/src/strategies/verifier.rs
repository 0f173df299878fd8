//! Fact-verification providers: given a document and a claim, return the
//! probability that the document supports the claim.

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde_json::json;

use crate::llm::{http_post_json, LlmError, RetryPolicy};

pub trait VerifierProvider: Send + Sync {
    fn support_prob(&self, document: &str, claim: &str) -> Result<f64, LlmError>;
}

/// Verifier backed by a JSON file mapping claim text to support
/// probability, with an optional default for unlisted claims.
pub struct FixtureVerifier {
    probs: HashMap<String, f64>,
    default: Option<f64>,
}

impl FixtureVerifier {
    pub fn new(probs: HashMap<String, f64>, default: Option<f64>) -> Self {
        Self { probs, default }
    }

    pub fn from_file(path: &Path) -> Result<Self, LlmError> {
        let raw = std::fs::read_to_string(path)?;
        let probs = serde_json::from_str(&raw)
            .map_err(|e| LlmError::Script(format!("{}: {e}", path.display())))?;
        Ok(Self { probs, default: None })
    }
}

impl VerifierProvider for FixtureVerifier {
    fn support_prob(&self, _document: &str, claim: &str) -> Result<f64, LlmError> {
        self.probs
            .get(claim)
            .copied()
            .or(self.default)
            .ok_or_else(|| LlmError::Script(format!("no fixture probability for claim {claim:?}")))
    }
}

/// HTTP verifier endpoint: POST {"document", "claim"} and read
/// {"support_prob": p}.
pub struct HttpVerifier {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl HttpVerifier {
    pub fn new(endpoint: &str, api_key: Option<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("reqwest client"),
            endpoint: endpoint.to_string(),
            api_key,
            retry: RetryPolicy::default(),
        }
    }
}

impl VerifierProvider for HttpVerifier {
    fn support_prob(&self, document: &str, claim: &str) -> Result<f64, LlmError> {
        let body = json!({"document": document, "claim": claim});
        let value = http_post_json(
            &self.client,
            &self.endpoint,
            self.api_key.as_deref(),
            &body,
            &self.retry,
        )?;
        value
            .get("support_prob")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| LlmError::MalformedResponse("missing support_prob".into()))
    }
}
