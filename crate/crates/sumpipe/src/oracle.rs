//! Greedy oracle extracts: reference-guided target summaries for training.

use std::collections::HashMap;

use dpp::Subset;

use crate::cluster::Cluster;
use crate::error::{PipeError, Result};
use crate::text::word_counts;

/// Builds an extractive target by repeatedly adding the affordable sentence
/// with the highest mean per-reference unigram F-measure, then removing the
/// words it covers from the reference multisets (floored at zero). Stops
/// when no sentence fits the remaining byte budget or the best score is
/// zero.
pub fn oracle_summary(cluster: &Cluster, budget: usize) -> Result<Subset> {
    if cluster.references.is_empty() {
        return Err(PipeError::MissingReferences {
            id: cluster.id.clone(),
        });
    }
    let n = cluster.n();
    let mut refs: Vec<HashMap<String, usize>> =
        cluster.references.iter().map(|r| word_counts(r)).collect();
    let sentence_counts: Vec<HashMap<String, usize>> = cluster
        .sentences
        .iter()
        .map(|s| word_counts(&s.text))
        .collect();

    let mut chosen: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut spent = 0usize;
    loop {
        let affordable: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| spent + cluster.sentences[i].bytes <= budget)
            .collect();
        if affordable.is_empty() {
            break;
        }
        let mut best = affordable[0];
        let mut best_score = f64::NEG_INFINITY;
        for &i in &affordable {
            let score = mean_unigram_f(&sentence_counts[i], &refs);
            if score > best_score {
                best_score = score;
                best = i;
            }
        }
        if best_score <= 0.0 {
            break;
        }
        chosen.push(best);
        spent += cluster.sentences[best].bytes;
        remaining.retain(|&i| i != best);
        for r in &mut refs {
            for (term, count) in &sentence_counts[best] {
                if let Some(c) = r.get_mut(term) {
                    *c = c.saturating_sub(*count);
                }
            }
        }
    }
    Ok(Subset::new(chosen, n)?)
}

/// Mean over references of the unigram F between the candidate counts and
/// the (possibly depleted) reference counts. An exhausted reference or an
/// empty candidate contributes zero.
pub fn mean_unigram_f(candidate: &HashMap<String, usize>, refs: &[HashMap<String, usize>]) -> f64 {
    let candidate_total: usize = candidate.values().sum();
    let mut sum = 0.0;
    for r in refs {
        let ref_total: usize = r.values().sum();
        if candidate_total == 0 || ref_total == 0 {
            continue;
        }
        let matched: usize = candidate
            .iter()
            .map(|(t, &c)| c.min(*r.get(t).unwrap_or(&0)))
            .sum();
        let p = matched as f64 / candidate_total as f64;
        let rec = matched as f64 / ref_total as f64;
        if p + rec > 0.0 {
            sum += 2.0 * p * rec / (p + rec);
        }
    }
    sum / refs.len() as f64
}
