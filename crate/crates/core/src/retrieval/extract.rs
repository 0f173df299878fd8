//! Main-content extraction for retrieved pages. Keeps paragraph text,
//! drops scripts, styles, tables, superscripts, reference blocks, and
//! bracketed citation markers like "[3]".

use std::sync::OnceLock;

use regex::Regex;

struct Patterns {
    drop_blocks: Vec<Regex>,
    paragraph: Regex,
    linebreak: Regex,
    tag: Regex,
    citation: Regex,
}

fn patterns() -> &'static Patterns {
    static PATTERNS: OnceLock<Patterns> = OnceLock::new();
    PATTERNS.get_or_init(|| Patterns {
        drop_blocks: vec![
            Regex::new(r"(?is)<!--.*?-->").unwrap(),
            Regex::new(r"(?is)<script\b[^>]*>.*?</script>").unwrap(),
            Regex::new(r"(?is)<style\b[^>]*>.*?</style>").unwrap(),
            Regex::new(r"(?is)<table\b[^>]*>.*?</table>").unwrap(),
            Regex::new(r"(?is)<sup\b[^>]*>.*?</sup>").unwrap(),
            Regex::new(r"(?is)<ref\b[^>]*>.*?</ref>").unwrap(),
            Regex::new(r"(?is)<nav\b[^>]*>.*?</nav>").unwrap(),
            Regex::new(r"(?is)<(ol|ul)\b[^>]*class=\x22[^\x22]*references[^\x22]*\x22[^>]*>.*?</(ol|ul)>")
                .unwrap(),
        ],
        paragraph: Regex::new(r"(?is)<p\b[^>]*>(.*?)</p>").unwrap(),
        linebreak: Regex::new(r"(?i)<br\s*/?>").unwrap(),
        tag: Regex::new(r"(?s)<[^>]*>").unwrap(),
        citation: Regex::new(r"\[\s*\d+\s*\]|\[citation needed\]|\[edit\]").unwrap(),
    })
}

/// Extract plain paragraphs from page markup, joined by blank lines.
/// Input without any paragraph element yields an empty string, treated
/// upstream as zero evidence from that document.
pub fn extract_main_content(html: &str) -> String {
    let p = patterns();
    let mut cleaned = html.to_string();
    for re in &p.drop_blocks {
        cleaned = re.replace_all(&cleaned, " ").into_owned();
    }
    let mut paragraphs = Vec::new();
    for cap in p.paragraph.captures_iter(&cleaned) {
        let inner = p.linebreak.replace_all(&cap[1], " ");
        // Inline tags vanish without a gap so "<b>word</b>." stays "word.".
        let no_tags = p.tag.replace_all(&inner, "");
        let decoded = decode_entities(&no_tags);
        let no_cites = p.citation.replace_all(&decoded, "");
        let squashed = squash_whitespace(&no_cites);
        if !squashed.is_empty() {
            paragraphs.push(squashed);
        }
    }
    paragraphs.join("\n\n")
}

fn squash_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        let Some(end) = rest[..rest.len().min(12)].find(';') else {
            out.push('&');
            rest = &rest[1..];
            continue;
        };
        let entity = &rest[1..end];
        let decoded = match entity {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some(' '),
            _ => entity
                .strip_prefix('#')
                .and_then(|num| {
                    if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
                        u32::from_str_radix(hex, 16).ok()
                    } else {
                        num.parse::<u32>().ok()
                    }
                })
                .and_then(char::from_u32),
        };
        match decoded {
            Some(ch) => {
                out.push(ch);
                rest = &rest[end + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_superscript_citation() {
        assert_eq!(extract_main_content("<p>A.</p><sup>[3]</sup>"), "A.");
    }

    #[test]
    fn empty_input_yields_empty() {
        assert_eq!(extract_main_content(""), "");
    }

    #[test]
    fn non_paragraph_markup_yields_empty() {
        assert_eq!(extract_main_content("<div>stray text</div>"), "");
    }

    #[test]
    fn inline_citation_brackets_removed() {
        let html = "<p>Lead has not been used for writing[3] since antiquity.</p>";
        assert_eq!(
            extract_main_content(html),
            "Lead has not been used for writing since antiquity."
        );
    }

    #[test]
    fn tables_scripts_and_nav_dropped() {
        let html = concat!(
            "<nav><p>Menu</p></nav>",
            "<script>var x = '<p>no</p>';</script>",
            "<table><tr><td><p>cell</p></td></tr></table>",
            "<p>First paragraph.</p>",
            "<style>.a { color: red }</style>",
            "<p>Second <b>paragraph</b>.</p>",
        );
        assert_eq!(extract_main_content(html), "First paragraph.\n\nSecond paragraph.");
    }

    #[test]
    fn entities_decode() {
        let html = "<p>Fish &amp; chips cost &#163;3 &lt;sometimes&gt;.</p>";
        assert_eq!(extract_main_content(html), "Fish & chips cost \u{a3}3 <sometimes>.");
    }

    #[test]
    fn fixture_page_matches_golden() {
        let html = include_str!("testdata/sample_page.html");
        let golden = include_str!("testdata/sample_page.golden.txt");
        assert_eq!(extract_main_content(html), golden.trim_end_matches('\n'));
    }
}
