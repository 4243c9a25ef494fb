//! Normalized tf-idf sentence vectors and cosine similarities.

use std::collections::{BTreeMap, HashMap};

use dpp::SymmetricKernel;

use crate::cluster::Cluster;
use crate::error::Result;
use crate::text::tokenize;

/// Inverse document frequencies fitted on training documents:
/// idf(t) = ln((D + 1) / (df(t) + 1)) + 1, with unseen terms at df = 0.
#[derive(Debug, Clone)]
pub struct IdfTable {
    weights: BTreeMap<String, f64>,
    default: f64,
    doc_count: usize,
}

impl IdfTable {
    pub fn fit(clusters: &[Cluster]) -> IdfTable {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        let mut doc_count = 0usize;
        for cluster in clusters {
            for doc in 0..cluster.doc_counts.len() {
                doc_count += 1;
                let mut seen: Vec<String> = cluster
                    .sentences
                    .iter()
                    .filter(|s| s.doc == doc)
                    .flat_map(|s| tokenize(&s.text))
                    .collect();
                seen.sort_unstable();
                seen.dedup();
                for term in seen {
                    *df.entry(term).or_insert(0) += 1;
                }
            }
        }
        let d = doc_count as f64;
        let weights = df
            .into_iter()
            .map(|(t, c)| (t, ((d + 1.0) / (c as f64 + 1.0)).ln() + 1.0))
            .collect();
        IdfTable {
            weights,
            default: (d + 1.0).ln() + 1.0,
            doc_count,
        }
    }

    /// Uniform table (weight one for everything); handy for tests.
    pub fn uniform() -> IdfTable {
        IdfTable {
            weights: BTreeMap::new(),
            default: 1.0,
            doc_count: 0,
        }
    }

    pub fn from_parts(weights: BTreeMap<String, f64>, default: f64, doc_count: usize) -> Self {
        IdfTable {
            weights,
            default,
            doc_count,
        }
    }

    pub fn weight(&self, term: &str) -> f64 {
        *self.weights.get(term).unwrap_or(&self.default)
    }

    pub fn default_weight(&self) -> f64 {
        self.default
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }
}

/// L2-normalized sparse sentence vectors over a per-cluster vocabulary.
/// The cosine of two sentences is exactly their dot product; sentences with
/// no in-vocabulary mass stay as zero vectors and are flagged.
#[derive(Debug, Clone)]
pub struct TfidfVectors {
    pub vocab_size: usize,
    /// Sorted (term id, weight) pairs per sentence.
    pub vectors: Vec<Vec<(usize, f64)>>,
    pub zero_mass: Vec<bool>,
}

/// Raw term counts weighted by idf, then L2-normalized.
pub fn tfidf_vectors(cluster: &Cluster, idf: &IdfTable) -> TfidfVectors {
    let mut vocab: HashMap<String, usize> = HashMap::new();
    let mut vectors = Vec::with_capacity(cluster.n());
    let mut zero_mass = Vec::with_capacity(cluster.n());
    for sentence in &cluster.sentences {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for token in tokenize(&sentence.text) {
            let next_id = vocab.len();
            let weight = idf.weight(&token);
            let id = *vocab.entry(token).or_insert(next_id);
            *counts.entry(id).or_insert(0.0) += weight;
        }
        let mut vec: Vec<(usize, f64)> = counts.into_iter().collect();
        vec.sort_unstable_by_key(|&(id, _)| id);
        let norm = vec.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut vec {
                *w /= norm;
            }
            zero_mass.push(false);
        } else {
            log::warn!(
                "sentence (doc {}, position {}) has no in-vocabulary mass",
                sentence.doc,
                sentence.position
            );
            zero_mass.push(true);
        }
        vectors.push(vec);
    }
    TfidfVectors {
        vocab_size: vocab.len(),
        vectors,
        zero_mass,
    }
}

/// Dot product of two sorted sparse vectors.
pub fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot
}

/// Dense pairwise cosine matrix; PSD as a Gram matrix of the vectors.
pub fn cosine_matrix(vectors: &TfidfVectors) -> Result<SymmetricKernel> {
    let n = vectors.vectors.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot = sparse_dot(&vectors.vectors[i], &vectors.vectors[j]);
            data[i * n + j] = dot;
            data[j * n + i] = dot;
        }
    }
    Ok(SymmetricKernel::new(n, data)?)
}
