//! Rule-based sentence segmentation. Splits on `.`, `!`, or `?` followed by
//! whitespace and an uppercase letter or digit; a fixed abbreviation list
//! plus single-letter initials suppress spurious splits.

/// Lowercased abbreviations (with their trailing period) that never end a
/// sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "vs.", "etc.", "e.g.", "i.e.",
    "u.s.", "u.k.", "u.n.", "no.", "fig.", "al.", "inc.", "ltd.", "co.", "approx.", "cf.",
];

/// Split text into trimmed, non-empty sentences.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;

    for i in 0..chars.len() {
        let ch = chars[i];
        if ch != '.' && ch != '!' && ch != '?' {
            continue;
        }
        if ch == '.' && is_abbreviation(&chars, start, i) {
            continue;
        }
        // A real boundary needs whitespace then an uppercase letter or digit.
        let mut j = i + 1;
        let mut saw_space = false;
        while j < chars.len() && chars[j].is_whitespace() {
            saw_space = true;
            j += 1;
        }
        if !saw_space || j >= chars.len() {
            continue;
        }
        if chars[j].is_uppercase() || chars[j].is_ascii_digit() {
            push_trimmed(&mut sentences, &chars[start..=i]);
            start = j;
        }
    }
    if start < chars.len() {
        push_trimmed(&mut sentences, &chars[start..]);
    }
    sentences
}

fn push_trimmed(sentences: &mut Vec<String>, slice: &[char]) {
    let s: String = slice.iter().collect();
    let trimmed = s.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
}

/// Does the token ending at `chars[dot]` (inclusive) look like an
/// abbreviation or a single-letter initial?
fn is_abbreviation(chars: &[char], start: usize, dot: usize) -> bool {
    let mut token_start = dot;
    while token_start > start {
        let prev = chars[token_start - 1];
        if prev.is_whitespace() {
            break;
        }
        token_start -= 1;
    }
    let token: String = chars[token_start..=dot].iter().collect::<String>().to_lowercase();
    if ABBREVIATIONS.contains(&token.as_str()) {
        return true;
    }
    // Single uppercase initial, as in "F. M. Last".
    dot == token_start + 1 && chars[token_start].is_uppercase() && chars[token_start].is_alphabetic()
}
