//! Document retrieval: query a search provider, keep the top three
//! Wikipedia results in engine rank order, and download their pages.
//! Search results are cached by query string and pages by URL; a per-host
//! politeness limit caps concurrent page requests.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use url::Url;

use super::RetrievalError;
use crate::cache::DiskCache;

/// How many documents the pipeline keeps per query.
pub const MAX_DOCUMENTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

pub trait SearchProvider: Send + Sync {
    fn search(&self, query: &str) -> Result<Vec<SearchHit>, RetrievalError>;
}

pub trait PageFetcher: Send + Sync {
    fn fetch(&self, url: &str) -> Result<String, RetrievalError>;
}

fn is_wikipedia(url: &str) -> bool {
    Url::parse(url)
        .ok()
        .and_then(|u| u.host_str().map(|h| h.to_ascii_lowercase()))
        .map(|host| host == "wikipedia.org" || host.ends_with(".wikipedia.org"))
        .unwrap_or(false)
}

/// Fetch up to three Wikipedia documents for a query: non-Wikipedia hits are
/// dropped before capping, engine order is preserved, and zero results is
/// not an error.
pub fn fetch_documents(
    search: &dyn SearchProvider,
    fetcher: &dyn PageFetcher,
    query: &str,
) -> Result<Vec<(String, String)>, RetrievalError> {
    let hits = search.search(query)?;
    let mut documents = Vec::new();
    for hit in hits.into_iter().filter(|h| is_wikipedia(&h.url)).take(MAX_DOCUMENTS) {
        let html = fetcher.fetch(&hit.url)?;
        documents.push((hit.url, html));
    }
    Ok(documents)
}

/// Counting semaphore keyed by host, so concurrent questions stay polite to
/// any single site.
pub struct HostLimiter {
    max_per_host: usize,
    state: Mutex<HashMap<String, usize>>,
    released: Condvar,
}

impl HostLimiter {
    pub fn new(max_per_host: usize) -> Self {
        Self {
            max_per_host: max_per_host.max(1),
            state: Mutex::new(HashMap::new()),
            released: Condvar::new(),
        }
    }

    pub fn acquire(&self, host: &str) -> HostPermit<'_> {
        let mut counts = self.state.lock().unwrap();
        while counts.get(host).copied().unwrap_or(0) >= self.max_per_host {
            counts = self.released.wait(counts).unwrap();
        }
        *counts.entry(host.to_string()).or_insert(0) += 1;
        HostPermit { limiter: self, host: host.to_string() }
    }
}

pub struct HostPermit<'a> {
    limiter: &'a HostLimiter,
    host: String,
}

impl Drop for HostPermit<'_> {
    fn drop(&mut self) {
        let mut counts = self.limiter.state.lock().unwrap();
        if let Some(n) = counts.get_mut(&self.host) {
            *n = n.saturating_sub(1);
        }
        self.limiter.released.notify_all();
    }
}

/// HTTP JSON search endpoint. Sends `GET {base}?q={query}` (plus a key
/// parameter when configured) and accepts either `{"results": [{"url": ..}]}`
/// or the Google Custom Search shape `{"items": [{"link": ..}]}`.
pub struct HttpSearchProvider {
    client: reqwest::blocking::Client,
    base_url: String,
    api_key: Option<String>,
}

impl HttpSearchProvider {
    pub fn new(base_url: &str, api_key: Option<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(60))
                .build()
                .expect("reqwest client"),
            base_url: base_url.to_string(),
            api_key,
        }
    }
}

impl SearchProvider for HttpSearchProvider {
    fn search(&self, query: &str) -> Result<Vec<SearchHit>, RetrievalError> {
        let mut req = self.client.get(&self.base_url).query(&[("q", query)]);
        if let Some(key) = &self.api_key {
            req = req.query(&[("key", key.as_str())]);
        }
        let resp = req.send().map_err(|e| RetrievalError::Search(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(RetrievalError::Search(format!("status {status}")));
        }
        let value: Value = resp.json().map_err(|e| RetrievalError::Search(e.to_string()))?;
        let mut hits = Vec::new();
        if let Some(results) = value.get("results").and_then(Value::as_array) {
            for r in results {
                if let Some(url) = r.get("url").and_then(Value::as_str) {
                    hits.push(SearchHit {
                        url: url.to_string(),
                        title: r.get("title").and_then(Value::as_str).map(String::from),
                    });
                }
            }
        } else if let Some(items) = value.get("items").and_then(Value::as_array) {
            for r in items {
                if let Some(url) = r.get("link").and_then(Value::as_str) {
                    hits.push(SearchHit {
                        url: url.to_string(),
                        title: r.get("title").and_then(Value::as_str).map(String::from),
                    });
                }
            }
        }
        Ok(hits)
    }
}

/// Search provider backed by a JSON file mapping query strings to hit lists.
/// Used for offline runs and tests.
pub struct FixtureSearchProvider {
    hits: HashMap<String, Vec<SearchHit>>,
}

impl FixtureSearchProvider {
    pub fn new(hits: HashMap<String, Vec<SearchHit>>) -> Self {
        Self { hits }
    }

    pub fn from_file(path: &Path) -> Result<Self, RetrievalError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| RetrievalError::Search(format!("{}: {e}", path.display())))?;
        let hits = serde_json::from_str(&raw)
            .map_err(|e| RetrievalError::Search(format!("{}: {e}", path.display())))?;
        Ok(Self { hits })
    }
}

impl SearchProvider for FixtureSearchProvider {
    fn search(&self, query: &str) -> Result<Vec<SearchHit>, RetrievalError> {
        Ok(self.hits.get(query).cloned().unwrap_or_default())
    }
}

/// Page store backed by a JSON file mapping URLs to page markup.
pub struct FixturePageFetcher {
    pages: HashMap<String, String>,
}

impl FixturePageFetcher {
    pub fn new(pages: HashMap<String, String>) -> Self {
        Self { pages }
    }

    pub fn from_file(path: &Path) -> Result<Self, RetrievalError> {
        let raw = std::fs::read_to_string(path).map_err(|e| RetrievalError::Fetch {
            url: path.display().to_string(),
            message: e.to_string(),
        })?;
        let pages = serde_json::from_str(&raw).map_err(|e| RetrievalError::Fetch {
            url: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self { pages })
    }
}

impl PageFetcher for FixturePageFetcher {
    fn fetch(&self, url: &str) -> Result<String, RetrievalError> {
        self.pages.get(url).cloned().ok_or_else(|| RetrievalError::Fetch {
            url: url.to_string(),
            message: "no fixture page".into(),
        })
    }
}

/// Live page fetcher with a per-host concurrency cap.
pub struct HttpPageFetcher {
    client: reqwest::blocking::Client,
    limiter: HostLimiter,
}

impl HttpPageFetcher {
    pub fn new(max_per_host: usize) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(60))
                .user_agent("presuppose/0.1 (evidence retrieval)")
                .build()
                .expect("reqwest client"),
            limiter: HostLimiter::new(max_per_host),
        }
    }
}

impl PageFetcher for HttpPageFetcher {
    fn fetch(&self, url: &str) -> Result<String, RetrievalError> {
        let host = Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(String::from))
            .unwrap_or_default();
        let _permit = self.limiter.acquire(&host);
        let resp = self
            .client
            .get(url)
            .send()
            .map_err(|e| RetrievalError::Fetch { url: url.to_string(), message: e.to_string() })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(RetrievalError::Fetch {
                url: url.to_string(),
                message: format!("status {status}"),
            });
        }
        resp.text()
            .map_err(|e| RetrievalError::Fetch { url: url.to_string(), message: e.to_string() })
    }
}

/// Search wrapper that caches hit lists by query string.
pub struct CachedSearchProvider {
    inner: Arc<dyn SearchProvider>,
    cache: Arc<DiskCache>,
}

impl CachedSearchProvider {
    pub fn new(inner: Arc<dyn SearchProvider>, cache: Arc<DiskCache>) -> Self {
        Self { inner, cache }
    }
}

impl SearchProvider for CachedSearchProvider {
    fn search(&self, query: &str) -> Result<Vec<SearchHit>, RetrievalError> {
        let key = crate::cache::content_key("search", query);
        if let Some(hits) = self.cache.get_typed::<Vec<SearchHit>>(&key) {
            return Ok(hits);
        }
        let hits = self.inner.search(query)?;
        self.cache.put_typed(&key, &hits);
        Ok(hits)
    }
}

/// Page wrapper that caches markup by URL.
pub struct CachedPageFetcher {
    inner: Arc<dyn PageFetcher>,
    cache: Arc<DiskCache>,
}

impl CachedPageFetcher {
    pub fn new(inner: Arc<dyn PageFetcher>, cache: Arc<DiskCache>) -> Self {
        Self { inner, cache }
    }
}

impl PageFetcher for CachedPageFetcher {
    fn fetch(&self, url: &str) -> Result<String, RetrievalError> {
        let key = crate::cache::content_key("page", url);
        if let Some(html) = self.cache.get_typed::<String>(&key) {
            return Ok(html);
        }
        let html = self.inner.fetch(url)?;
        self.cache.put_typed(&key, &html);
        Ok(html)
    }
}
