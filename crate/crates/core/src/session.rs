//! A completion session: one provider plus an optional response cache and a
//! run-wide usage meter. The cache is consulted before every provider call
//! and stores usage with the text, so warm-cache reruns reproduce verdicts
//! byte-for-byte without touching the provider.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cache::DiskCache;
use crate::llm::{
    fingerprint, CompletionProvider, CompletionRequest, CompletionResponse, LlmError, UsageMeter,
};
use crate::types::UsageRecord;

#[derive(Debug, Serialize, Deserialize)]
struct CachedCompletion {
    text: String,
    usage: UsageRecord,
}

pub struct Session {
    provider: Arc<dyn CompletionProvider>,
    cache: Option<Arc<DiskCache>>,
    meter: Arc<UsageMeter>,
}

impl Session {
    pub fn new(provider: Arc<dyn CompletionProvider>, cache: Option<Arc<DiskCache>>) -> Self {
        Self { provider, cache, meter: Arc::new(UsageMeter::new()) }
    }

    /// Complete a request, serving from cache when possible. Every response
    /// returned to the pipeline is metered exactly once, hit or miss, so
    /// meter totals always equal the sum of usage over returned completions.
    pub fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        if request.user_text.is_empty() {
            return Err(LlmError::EmptyRequest);
        }
        let key = fingerprint(request);
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get_typed::<CachedCompletion>(&key) {
                let response = CompletionResponse { text: hit.text, usage: hit.usage };
                self.meter.add(response.usage);
                return Ok(response);
            }
        }
        let response = self.provider.complete(request)?;
        if let Some(cache) = &self.cache {
            cache.put_typed(
                &key,
                &CachedCompletion { text: response.text.clone(), usage: response.usage },
            );
        }
        self.meter.add(response.usage);
        Ok(response)
    }

    pub fn meter(&self) -> &UsageMeter {
        &self.meter
    }

    pub fn provider_name(&self) -> &'static str {
        self.provider.name()
    }
}
