//! Deterministic scripted provider. A script maps request fingerprints to
//! response texts (optionally with provider-reported token counts), so a
//! recorded session replays bit-identically run after run.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{
    estimate_tokens, fingerprint, CompletionProvider, CompletionRequest, CompletionResponse,
    LlmError,
};
use crate::types::UsageRecord;

/// One scripted response. The bare-string form estimates token usage from
/// character counts; the detailed form carries provider-reported counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptEntry {
    Text(String),
    Detailed {
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prompt_tokens: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        completion_tokens: Option<u64>,
    },
}

impl ScriptEntry {
    fn text(&self) -> &str {
        match self {
            ScriptEntry::Text(t) => t,
            ScriptEntry::Detailed { text, .. } => text,
        }
    }
}

/// Scripted provider for tests and offline runs.
pub struct MockProvider {
    script: Mutex<HashMap<String, ScriptEntry>>,
    calls: AtomicU64,
}

impl MockProvider {
    pub fn new() -> Self {
        Self { script: Mutex::new(HashMap::new()), calls: AtomicU64::new(0) }
    }

    /// Load a script file: a JSON object mapping fingerprint to response.
    pub fn from_script_file(path: &Path) -> Result<Self, LlmError> {
        let raw = std::fs::read_to_string(path)?;
        let script: HashMap<String, ScriptEntry> = serde_json::from_str(&raw)
            .map_err(|e| LlmError::Script(format!("{}: {e}", path.display())))?;
        Ok(Self { script: Mutex::new(script), calls: AtomicU64::new(0) })
    }

    /// Write the current script as a JSON object, sorted by fingerprint.
    pub fn save_script(&self, path: &Path) -> Result<(), LlmError> {
        let script = self.script.lock().unwrap();
        let ordered: std::collections::BTreeMap<&String, &ScriptEntry> = script.iter().collect();
        let raw = serde_json::to_string_pretty(&ordered)
            .map_err(|e| LlmError::Script(e.to_string()))?;
        std::fs::write(path, raw)?;
        Ok(())
    }

    /// Script a response for the given request.
    pub fn script(&self, request: &CompletionRequest, text: impl Into<String>) {
        self.insert(fingerprint(request), ScriptEntry::Text(text.into()));
    }

    /// Script a response with provider-reported token counts.
    pub fn script_with_usage(
        &self,
        request: &CompletionRequest,
        text: impl Into<String>,
        prompt_tokens: u64,
        completion_tokens: u64,
    ) {
        self.insert(
            fingerprint(request),
            ScriptEntry::Detailed {
                text: text.into(),
                prompt_tokens: Some(prompt_tokens),
                completion_tokens: Some(completion_tokens),
            },
        );
    }

    pub fn insert(&self, fingerprint: String, entry: ScriptEntry) {
        self.script.lock().unwrap().insert(fingerprint, entry);
    }

    /// Number of `complete` calls served so far.
    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Default for MockProvider {
    fn default() -> Self {
        Self::new()
    }
}

impl CompletionProvider for MockProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        if request.user_text.is_empty() {
            return Err(LlmError::EmptyRequest);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        let fp = fingerprint(request);
        let entry = {
            let script = self.script.lock().unwrap();
            script.get(&fp).cloned()
        };
        let entry = entry.ok_or(LlmError::MissingScript { fingerprint: fp })?;
        let usage = match &entry {
            ScriptEntry::Detailed {
                prompt_tokens: Some(pt),
                completion_tokens: Some(ct),
                ..
            } => UsageRecord { prompt_tokens: *pt, completion_tokens: *ct, llm_calls: 1, estimated: false },
            _ => UsageRecord {
                prompt_tokens: estimate_tokens(&request.system_text)
                    + estimate_tokens(&request.user_text),
                completion_tokens: estimate_tokens(entry.text()),
                llm_calls: 1,
                estimated: true,
            },
        };
        Ok(CompletionResponse { text: entry.text().to_string(), usage })
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::GenerationParams;

    fn request(user: &str) -> CompletionRequest {
        CompletionRequest {
            model_id: "test-model".into(),
            system_text: String::new(),
            user_text: user.into(),
            params: GenerationParams::label_task(),
        }
    }

    #[test]
    fn scripted_response_is_echoed_with_one_call() {
        let mock = MockProvider::new();
        let req = request("does this contain false assumptions?");
        mock.script(&req, "Yes");
        let resp = mock.complete(&req).unwrap();
        assert_eq!(resp.text, "Yes");
        assert_eq!(resp.usage.llm_calls, 1);
        assert!(resp.usage.estimated);
    }

    #[test]
    fn unscripted_fingerprint_errors() {
        let mock = MockProvider::new();
        let err = mock.complete(&request("unknown")).unwrap_err();
        assert!(matches!(err, LlmError::MissingScript { .. }));
    }

    #[test]
    fn identical_requests_identical_responses() {
        let mock = MockProvider::new();
        let req = request("same");
        mock.script(&req, "No");
        let a = mock.complete(&req).unwrap();
        let b = mock.complete(&req).unwrap();
        assert_eq!(a, b);
        assert_eq!(mock.call_count(), 2);
    }

    #[test]
    fn reported_usage_is_not_estimated() {
        let mock = MockProvider::new();
        let req = request("prompt");
        mock.script_with_usage(&req, "No", 151, 1);
        let resp = mock.complete(&req).unwrap();
        assert_eq!(resp.usage.prompt_tokens, 151);
        assert_eq!(resp.usage.completion_tokens, 1);
        assert!(!resp.usage.estimated);
    }

    #[test]
    fn script_round_trips_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("script.json");
        let mock = MockProvider::new();
        let req = request("persisted");
        mock.script_with_usage(&req, "Yes", 10, 1);
        mock.script(&request("other"), "No");
        mock.save_script(&path).unwrap();

        let reloaded = MockProvider::from_script_file(&path).unwrap();
        assert_eq!(reloaded.complete(&req).unwrap().text, "Yes");
        assert_eq!(reloaded.complete(&req).unwrap().usage.prompt_tokens, 10);
        assert_eq!(reloaded.complete(&request("other")).unwrap().text, "No");
    }
}
