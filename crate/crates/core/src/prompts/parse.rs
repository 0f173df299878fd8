//! Parsers that turn model completions into typed values: the yes/no
//! identification verdict and the enumerated atomic-assumption list.

use thiserror::Error;

use crate::types::{AtomicAssumption, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unparseable yes/no verdict: {raw:?}")]
    UnparseableVerdict { raw: String },
    #[error("completion contained no enumerated assumptions")]
    EmptyDecomposition,
}

/// Map a yes/no completion to a label. "Yes" means the input has false
/// assumptions (label 0); "No" means it does not (label 1). Matching is
/// case-insensitive on the leading alphabetic token, ignoring surrounding
/// whitespace and punctuation. Anything else is an error carrying the raw
/// text so the caller can decide on a fallback.
pub fn parse_yes_no(text: &str) -> Result<Label, ParseError> {
    let token: String = text
        .chars()
        .skip_while(|c| !c.is_alphabetic())
        .take_while(|c| c.is_alphabetic())
        .collect();
    if token.eq_ignore_ascii_case("yes") {
        Ok(Label::HasFalseAssumption)
    } else if token.eq_ignore_ascii_case("no") {
        Ok(Label::AllValid)
    } else {
        Err(ParseError::UnparseableVerdict { raw: text.to_string() })
    }
}

/// Parse an enumerated assumption list. Lines starting with "(n)", "n.",
/// or "n)" become items (marker stripped); all other lines are ignored.
/// Items are re-indexed 1..n regardless of the model's numbering, and empty
/// items are dropped. Zero items is an error.
pub fn parse_enumeration(
    text: &str,
    question_id: &str,
) -> Result<Vec<AtomicAssumption>, ParseError> {
    let mut items = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = strip_marker(trimmed) {
            let item = rest.trim();
            if !item.is_empty() {
                items.push(item.to_string());
            }
        }
    }
    if items.is_empty() {
        return Err(ParseError::EmptyDecomposition);
    }
    Ok(items
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            AtomicAssumption::new(question_id, i as u32 + 1, text)
                .expect("non-empty by construction")
        })
        .collect())
}

/// Strip a leading "(n)", "n.", or "n)" item marker, returning the rest.
fn strip_marker(line: &str) -> Option<&str> {
    let (parenthesized, rest) = match line.strip_prefix('(') {
        Some(rest) => (true, rest),
        None => (false, line),
    };
    let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return None;
    }
    let after_digits = &rest[digits..];
    if parenthesized {
        after_digits.strip_prefix(')')
    } else {
        after_digits
            .strip_prefix(')')
            .or_else(|| after_digits.strip_prefix('.'))
    }
}
