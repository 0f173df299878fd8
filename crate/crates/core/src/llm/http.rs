//! HTTP chat-completion provider. Auth and endpoint come from the provider
//! profile (or the PRESUPPOSE_API_BASE / PRESUPPOSE_API_KEY environment
//! variables); transient failures retry with bounded exponential backoff.

use std::time::Duration;

use serde_json::{json, Value};

use super::{
    estimate_tokens, CompletionProvider, CompletionRequest, CompletionResponse, LlmError,
};
use crate::types::UsageRecord;

/// Bounded exponential backoff: `base_delay * 2^(attempt-1)`, capped.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_millis(200),
            max_delay: Duration::from_secs(10),
        }
    }
}

impl RetryPolicy {
    fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u32 << attempt.saturating_sub(1).min(16);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

pub struct HttpProvider {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl HttpProvider {
    pub fn new(base_url: &str, api_key: Option<String>) -> Self {
        Self::with_retry(base_url, api_key, RetryPolicy::default())
    }

    pub fn with_retry(base_url: &str, api_key: Option<String>, retry: RetryPolicy) -> Self {
        let endpoint = if base_url.ends_with("/chat/completions") {
            base_url.to_string()
        } else {
            format!("{}/chat/completions", base_url.trim_end_matches('/'))
        };
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("reqwest client"),
            endpoint,
            api_key,
            retry,
        }
    }

    fn body(request: &CompletionRequest) -> Value {
        let mut messages = Vec::new();
        if !request.system_text.is_empty() {
            messages.push(json!({"role": "system", "content": request.system_text}));
        }
        messages.push(json!({"role": "user", "content": request.user_text}));
        json!({
            "model": request.model_id,
            "messages": messages,
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "frequency_penalty": request.params.frequency_penalty,
            "max_tokens": request.params.max_tokens,
        })
    }

    fn parse(request: &CompletionRequest, value: &Value) -> Result<CompletionResponse, LlmError> {
        let text = value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))?
            .to_string();
        let usage = match (
            value.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
            value.pointer("/usage/completion_tokens").and_then(Value::as_u64),
        ) {
            (Some(pt), Some(ct)) => UsageRecord { prompt_tokens: pt, completion_tokens: ct, llm_calls: 1, estimated: false },
            _ => UsageRecord {
                prompt_tokens: estimate_tokens(&request.system_text) + estimate_tokens(&request.user_text),
                completion_tokens: estimate_tokens(&text),
                llm_calls: 1,
                estimated: true,
            },
        };
        Ok(CompletionResponse { text, usage })
    }
}

impl CompletionProvider for HttpProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        if request.user_text.is_empty() {
            return Err(LlmError::EmptyRequest);
        }
        let body = Self::body(request);
        let value = post_json_with_retry(
            &self.client,
            &self.endpoint,
            self.api_key.as_deref(),
            &body,
            &self.retry,
        )?;
        Self::parse(request, &value)
    }

    fn name(&self) -> &'static str {
        "http"
    }
}

/// POST a JSON body and parse a JSON reply, retrying transient failures.
/// Shared by the completion, embedding, and verifier clients.
pub(crate) fn post_json_with_retry(
    client: &reqwest::blocking::Client,
    url: &str,
    api_key: Option<&str>,
    body: &Value,
    retry: &RetryPolicy,
) -> Result<Value, LlmError> {
    let mut attempt = 0u32;
    loop {
        attempt += 1;
        let mut req = client.post(url).json(body);
        if let Some(key) = api_key {
            req = req.bearer_auth(key);
        }
        let outcome = match req.send() {
            Ok(resp) => {
                let status = resp.status().as_u16();
                match status {
                    200..=299 => {
                        return resp
                            .json::<Value>()
                            .map_err(|e| LlmError::MalformedResponse(e.to_string()));
                    }
                    401 | 403 => return Err(LlmError::Auth { status }),
                    429 => {
                        let retry_after = resp
                            .headers()
                            .get("retry-after")
                            .and_then(|v| v.to_str().ok())
                            .and_then(|v| v.parse::<u64>().ok())
                            .map(Duration::from_secs);
                        Err(LlmError::RateLimited { attempts: attempt, retry_after })
                    }
                    500..=599 => {
                        let message = resp.text().unwrap_or_default();
                        Err(LlmError::Network { attempts: attempt, message: format!("status {status}: {message}") })
                    }
                    _ => {
                        let message = resp.text().unwrap_or_default();
                        return Err(LlmError::Status { status, message });
                    }
                }
            }
            Err(e) => Err(LlmError::Network { attempts: attempt, message: e.to_string() }),
        };
        match outcome {
            Err(err) if attempt < retry.max_attempts => {
                let delay = match &err {
                    LlmError::RateLimited { retry_after: Some(d), .. } => *d,
                    _ => retry.delay(attempt),
                };
                log::warn!("retryable provider failure (attempt {attempt}): {err}; backing off {delay:?}");
                std::thread::sleep(delay.min(retry.max_delay));
            }
            Err(err) => return Err(err),
            Ok(()) => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::GenerationParams;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// Minimal canned-response HTTP server: serves the given bodies in
    /// order, one connection each, then stops.
    fn serve(responses: Vec<(u16, String)>) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = [0u8; 8192];
                let mut data = Vec::new();
                loop {
                    let n = stream.read(&mut buf).unwrap_or(0);
                    if n == 0 {
                        break;
                    }
                    data.extend_from_slice(&buf[..n]);
                    if let Some(head_end) = find_header_end(&data) {
                        let headers = String::from_utf8_lossy(&data[..head_end]).to_lowercase();
                        let content_length = headers
                            .lines()
                            .find_map(|l| l.strip_prefix("content-length:"))
                            .and_then(|v| v.trim().parse::<usize>().ok())
                            .unwrap_or(0);
                        if data.len() >= head_end + 4 + content_length {
                            break;
                        }
                    }
                }
                let reason = if status == 200 { "OK" } else { "ERR" };
                let reply = format!(
                    "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        format!("http://{addr}")
    }

    fn find_header_end(data: &[u8]) -> Option<usize> {
        data.windows(4).position(|w| w == b"\r\n\r\n")
    }

    fn request() -> CompletionRequest {
        CompletionRequest {
            model_id: "test-model".into(),
            system_text: "be brief".into(),
            user_text: "Answer: ".into(),
            params: GenerationParams::label_task(),
        }
    }

    fn fast_retry() -> RetryPolicy {
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(1), max_delay: Duration::from_millis(5) }
    }

    #[test]
    fn parses_text_and_usage() {
        let body = r#"{"choices":[{"message":{"content":"Yes"}}],"usage":{"prompt_tokens":151,"completion_tokens":1}}"#;
        let base = serve(vec![(200, body.to_string())]);
        let provider = HttpProvider::with_retry(&base, None, fast_retry());
        let resp = provider.complete(&request()).unwrap();
        assert_eq!(resp.text, "Yes");
        assert_eq!(resp.usage.prompt_tokens, 151);
        assert_eq!(resp.usage.llm_calls, 1);
        assert!(!resp.usage.estimated);
    }

    #[test]
    fn missing_usage_is_estimated() {
        let body = r#"{"choices":[{"message":{"content":"No"}}]}"#;
        let base = serve(vec![(200, body.to_string())]);
        let provider = HttpProvider::with_retry(&base, None, fast_retry());
        let resp = provider.complete(&request()).unwrap();
        assert!(resp.usage.estimated);
        assert_eq!(resp.usage.completion_tokens, 1);
    }

    #[test]
    fn retries_until_success() {
        let ok = r#"{"choices":[{"message":{"content":"Yes"}}],"usage":{"prompt_tokens":1,"completion_tokens":1}}"#;
        let base = serve(vec![
            (500, "{}".to_string()),
            (429, "{}".to_string()),
            (200, ok.to_string()),
        ]);
        let provider = HttpProvider::with_retry(&base, Some("key".into()), fast_retry());
        let resp = provider.complete(&request()).unwrap();
        assert_eq!(resp.text, "Yes");
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let base = serve(vec![(401, "{}".to_string())]);
        let provider = HttpProvider::with_retry(&base, None, fast_retry());
        let err = provider.complete(&request()).unwrap_err();
        assert!(matches!(err, LlmError::Auth { status: 401 }));
    }

    #[test]
    fn exhausted_retries_surface_the_error() {
        let responses = (0..5).map(|_| (500, "{}".to_string())).collect();
        let base = serve(responses);
        let provider = HttpProvider::with_retry(&base, None, fast_retry());
        let err = provider.complete(&request()).unwrap_err();
        match err {
            LlmError::Network { attempts, .. } => assert_eq!(attempts, 5),
            other => panic!("expected network error, got {other:?}"),
        }
    }
}
