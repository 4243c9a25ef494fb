//! Tokenization and n-gram counting.
//!
//! Tokens are maximal runs of alphanumeric characters, lowercased. No
//! stemming, no stopword removal.

use std::collections::HashMap;

/// Lowercased alphanumeric tokens in order of appearance.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lower in ch.to_lowercase() {
                current.push(lower);
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Multiset of n-grams over the token stream (joined with `\x1f` for n > 1).
pub fn ngram_counts(tokens: &[String], n: usize) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for window in tokens.windows(n) {
        let gram = window.join("\x1f");
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Unigram multiset of a text.
pub fn word_counts(text: &str) -> HashMap<String, usize> {
    ngram_counts(&tokenize(text), 1)
}
