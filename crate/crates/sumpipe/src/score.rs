//! N-gram overlap scoring of candidate summaries against references.

use std::collections::HashMap;

use crate::error::{PipeError, Result};
use crate::text::{ngram_counts, tokenize};

/// Precision, recall, and F-measure for one n-gram order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramScore {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl NgramScore {
    fn from_counts(matched: usize, candidate_total: usize, reference_total: usize) -> Self {
        let precision = if candidate_total > 0 {
            matched as f64 / candidate_total as f64
        } else {
            0.0
        };
        let recall = if reference_total > 0 {
            matched as f64 / reference_total as f64
        } else {
            0.0
        };
        let f_measure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        NgramScore {
            precision,
            recall,
            f_measure,
        }
    }
}

/// Clipped n-gram overlap, micro-averaged over references by pooling their
/// counts: matches are clipped against the pooled reference multiset,
/// recall divides by the pooled reference size, precision by the candidate
/// size. n must be 1 or 2.
pub fn ngram_score(candidate: &str, references: &[String], n: usize) -> Result<NgramScore> {
    if !(1..=2).contains(&n) {
        return Err(PipeError::InvalidNgramOrder { n });
    }
    let cand = ngram_counts(&tokenize(candidate), n);
    let candidate_total: usize = cand.values().sum();

    let mut pooled: HashMap<String, usize> = HashMap::new();
    for r in references {
        for (gram, count) in ngram_counts(&tokenize(r), n) {
            *pooled.entry(gram).or_insert(0) += count;
        }
    }
    let reference_total: usize = pooled.values().sum();
    let matched: usize = cand
        .iter()
        .map(|(gram, &c)| c.min(*pooled.get(gram).unwrap_or(&0)))
        .sum();
    Ok(NgramScore::from_counts(
        matched,
        candidate_total,
        reference_total,
    ))
}
