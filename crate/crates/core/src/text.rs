//! Tokenization shared by indexing and querying.

use alloc::string::String;
use alloc::vec::Vec;

/// Fixed stopword list, applied identically at index and query time.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "in", "is", "it",
    "its", "of", "on", "or", "said", "such", "that", "the", "this", "to", "was", "wherein",
    "which", "with",
];

fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Lowercases, splits on non-alphanumeric characters, drops single-digit
/// tokens and stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    tokenize_into(text, &mut out);
    out
}

/// Like [`tokenize`] but appends to an existing buffer.
pub fn tokenize_into(text: &str, out: &mut Vec<String>) {
    for raw in text.split(|c: char| !c.is_alphanumeric()) {
        if raw.is_empty() {
            continue;
        }
        let mut token = String::with_capacity(raw.len());
        for c in raw.chars() {
            token.extend(c.to_lowercase());
        }
        if token.chars().count() == 1 && token.chars().all(|c| c.is_numeric()) {
            continue;
        }
        if is_stopword(&token) {
            continue;
        }
        out.push(token);
    }
}
