//! Run configuration: a TOML file of key/value sections, environment
//! variables for secrets, and command-line overrides on top. The effective
//! configuration is echoed into every output file's header line.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub run: RunSection,
    pub llm: LlmSection,
    pub search: SearchSection,
    pub embedding: EmbeddingSection,
    pub verifier: VerifierSection,
    pub prompts: PromptsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSection {
    pub concurrency: usize,
    pub cache_dir: Option<String>,
    /// Mock-mode determinism switch: refuse non-deterministic providers.
    pub deterministic: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { concurrency: 4, cache_dir: None, deterministic: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmSection {
    /// "mock" or "http".
    pub kind: String,
    pub model: String,
    pub base_url: Option<String>,
    /// Script file for the mock provider.
    pub script: Option<String>,
    /// Zero-shot instruction profile: replaces the few-shot identify prompt.
    pub zero_shot_instruction: Option<String>,
}

impl Default for LlmSection {
    fn default() -> Self {
        Self {
            kind: "mock".into(),
            model: "mock-model".into(),
            base_url: None,
            script: None,
            zero_shot_instruction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSection {
    /// "fixture" or "http".
    pub kind: String,
    pub base_url: Option<String>,
    /// Fixture file mapping query strings to search hits.
    pub fixture: Option<String>,
    /// Fixture file mapping URLs to page markup.
    pub pages_fixture: Option<String>,
    /// Politeness cap: concurrent page requests per host.
    pub max_per_host: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub api_key: Option<String>,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            kind: "fixture".into(),
            base_url: None,
            fixture: None,
            pages_fixture: None,
            max_per_host: 2,
            api_key: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingSection {
    /// "lexical" (offline fallback) or "http".
    pub kind: String,
    pub base_url: Option<String>,
    pub model: String,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        Self { kind: "lexical".into(), base_url: None, model: "instructor".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifierSection {
    /// "fixture" or "http".
    pub kind: String,
    pub base_url: Option<String>,
    /// Fixture file mapping claim text to support probability.
    pub fixture: Option<String>,
}

impl Default for VerifierSection {
    fn default() -> Self {
        Self { kind: "fixture".into(), base_url: None, fixture: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PromptsSection {
    /// Directory of template overrides; the compiled-in defaults otherwise.
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: RunConfig = toml::from_str(&raw).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.apply_env();
        Ok(config)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            Some(p) => Self::load(p),
            None => {
                let mut config = Self::default();
                config.apply_env();
                Ok(config)
            }
        }
    }

    /// Environment variables override file values for endpoints and paths;
    /// keys are only ever read from the environment.
    pub fn apply_env(&mut self) {
        if let Ok(base) = std::env::var("PRESUPPOSE_API_BASE") {
            if !base.is_empty() {
                self.llm.base_url = Some(base);
            }
        }
        if let Ok(dir) = std::env::var("PRESUPPOSE_CACHE_DIR") {
            if !dir.is_empty() {
                self.run.cache_dir = Some(dir);
            }
        }
    }

    pub fn llm_api_key() -> Option<String> {
        std::env::var("PRESUPPOSE_API_KEY").ok().filter(|k| !k.is_empty())
    }

    pub fn search_api_key(&self) -> Option<String> {
        std::env::var("PRESUPPOSE_SEARCH_KEY")
            .ok()
            .filter(|k| !k.is_empty())
            .or_else(|| self.search.api_key.clone())
    }
}
