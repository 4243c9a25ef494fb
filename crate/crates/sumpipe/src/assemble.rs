//! Summary assembly: document-order concatenation under a byte limit.

use dpp::Subset;

use crate::cluster::Cluster;

/// Concatenates the selected sentences in (document, position) order,
/// joined by single spaces, truncated at `budget` bytes. Sentences are
/// already stored flattened in that order, so ascending subset order is
/// document order.
pub fn assemble_summary(cluster: &Cluster, selection: &Subset, budget: usize) -> String {
    let text = selection
        .iter()
        .map(|i| cluster.sentences[i].text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    truncate_bytes(text, budget)
}

/// The first `budget` bytes of the cluster text in document order.
pub fn begin_text(cluster: &Cluster, budget: usize) -> String {
    let text = cluster
        .sentences
        .iter()
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    truncate_bytes(text, budget)
}

/// Cuts at the byte limit, backing off to the nearest character boundary.
pub fn truncate_bytes(mut text: String, limit: usize) -> String {
    if text.len() <= limit {
        return text;
    }
    let mut cut = limit;
    while cut > 0 && !text.is_char_boundary(cut) {
        cut -= 1;
    }
    text.truncate(cut);
    text
}
