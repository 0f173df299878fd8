//! Content-addressed request fingerprints. Equal requests hash equally, so
//! fingerprints key both the mock script and the on-disk response cache.

use std::borrow::Cow;

use sha2::{Digest, Sha256};

use super::CompletionRequest;

/// Normalize CRLF and lone CR line endings to LF so the same prompt hashes
/// identically regardless of the platform that produced it.
pub fn normalize_newlines(text: &str) -> Cow<'_, str> {
    if !text.contains('\r') {
        return Cow::Borrowed(text);
    }
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        if ch == '\r' {
            if chars.peek() == Some(&'\n') {
                chars.next();
            }
            out.push('\n');
        } else {
            out.push(ch);
        }
    }
    Cow::Owned(out)
}

/// Stable hex-encoded content hash over model id, sampling parameters, and
/// newline-normalized prompt texts. Floats are hashed by bit pattern, so
/// any parameter change produces a different fingerprint.
pub fn fingerprint(request: &CompletionRequest) -> String {
    let mut hasher = Sha256::new();
    feed(&mut hasher, request.model_id.as_bytes());
    feed(&mut hasher, &request.params.temperature.to_bits().to_be_bytes());
    feed(&mut hasher, &request.params.top_p.to_bits().to_be_bytes());
    feed(&mut hasher, &request.params.frequency_penalty.to_bits().to_be_bytes());
    feed(&mut hasher, &request.params.max_tokens.to_be_bytes());
    feed(&mut hasher, normalize_newlines(&request.system_text).as_bytes());
    feed(&mut hasher, normalize_newlines(&request.user_text).as_bytes());
    hex_encode(&hasher.finalize())
}

fn feed(hasher: &mut Sha256, bytes: &[u8]) {
    // Length prefix keeps field boundaries unambiguous.
    hasher.update((bytes.len() as u64).to_be_bytes());
    hasher.update(bytes);
}

fn hex_encode(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
