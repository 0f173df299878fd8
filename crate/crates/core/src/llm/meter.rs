//! Run-wide usage accumulator. Atomic, so concurrent completions can all
//! report into the same meter.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use crate::types::UsageRecord;

#[derive(Debug, Default)]
pub struct UsageMeter {
    prompt_tokens: AtomicU64,
    completion_tokens: AtomicU64,
    llm_calls: AtomicU64,
    estimated: AtomicBool,
}

impl UsageMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, usage: UsageRecord) {
        self.prompt_tokens.fetch_add(usage.prompt_tokens, Ordering::Relaxed);
        self.completion_tokens.fetch_add(usage.completion_tokens, Ordering::Relaxed);
        self.llm_calls.fetch_add(usage.llm_calls, Ordering::Relaxed);
        if usage.estimated {
            self.estimated.store(true, Ordering::Relaxed);
        }
    }

    pub fn total(&self) -> UsageRecord {
        UsageRecord {
            prompt_tokens: self.prompt_tokens.load(Ordering::Relaxed),
            completion_tokens: self.completion_tokens.load(Ordering::Relaxed),
            llm_calls: self.llm_calls.load(Ordering::Relaxed),
            estimated: self.estimated.load(Ordering::Relaxed),
        }
    }
}
