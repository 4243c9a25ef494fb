//! Quality and similarity features.
//!
//! Each sentence gets a 39-dimensional quality vector: a constant, five
//! global length bins, six document-position indicators, mean cluster
//! similarity (raw, five global bins, ten local bins), and LexRank (raw,
//! five global bins, five local bins). Similarity vectors are normalized
//! tf-idf augmented with a constant coordinate rho and re-normalized.

use dpp::SymmetricKernel;

use crate::cluster::Cluster;
use crate::error::{PipeError, Result};
use crate::tfidf::{cosine_matrix, tfidf_vectors, IdfTable, TfidfVectors};

pub const FEATURE_DIM: usize = 39;
pub const GLOBAL_BINS: usize = 5;
pub const POSITION_SLOTS: usize = 6;
pub const LOCAL_SIMILARITY_BINS: usize = 10;
pub const LOCAL_LEXRANK_BINS: usize = 5;

const LEXRANK_TOL: f64 = 1e-10;
const LEXRANK_MAX_ITER: usize = 10_000;

/// Fitted feature configuration: the constant similarity feature, the idf
/// table, and the global bin edges (local bins are recomputed per cluster).
#[derive(Debug, Clone)]
pub struct FeatureConfig {
    pub rho: f64,
    pub idf: IdfTable,
    pub length_edges: Vec<f64>,
    pub similarity_edges: Vec<f64>,
    pub lexrank_edges: Vec<f64>,
}

impl FeatureConfig {
    pub fn is_fitted(&self) -> bool {
        self.length_edges.len() == GLOBAL_BINS - 1
            && self.similarity_edges.len() == GLOBAL_BINS - 1
            && self.lexrank_edges.len() == GLOBAL_BINS - 1
    }

    /// Names of the 39 quality feature coordinates, in order.
    pub fn feature_names() -> Vec<String> {
        let mut names = vec!["constant".to_string()];
        names.extend((1..=GLOBAL_BINS).map(|b| format!("length_g{b}")));
        names.extend((1..=5).map(|p| format!("position_{p}")));
        names.push("position_6plus".into());
        names.push("similarity_raw".into());
        names.extend((1..=GLOBAL_BINS).map(|b| format!("similarity_g{b}")));
        names.extend((1..=LOCAL_SIMILARITY_BINS).map(|b| format!("similarity_l{b}")));
        names.push("lexrank_raw".into());
        names.extend((1..=GLOBAL_BINS).map(|b| format!("lexrank_g{b}")));
        names.extend((1..=LOCAL_LEXRANK_BINS).map(|b| format!("lexrank_l{b}")));
        debug_assert_eq!(names.len(), FEATURE_DIM);
        names
    }
}

/// Quantile edges {1/k, .., (k-1)/k} of `values` by linear interpolation
/// between order statistics. Fewer distinct values than bins simply yield
/// duplicate edges.
pub fn quantile_edges(values: &[f64], bins: usize) -> Vec<f64> {
    assert!(bins >= 1);
    if values.is_empty() {
        return vec![0.0; bins - 1];
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (1..bins)
        .map(|k| {
            let q = k as f64 / bins as f64;
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// Bin of `value`: the number of edges strictly below it.
pub fn bin_index(value: f64, edges: &[f64]) -> usize {
    edges.iter().filter(|&&e| e < value).count()
}

fn one_hot(index: usize, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[index] = 1.0;
    v
}

/// Mean cosine to the other sentences of the cluster; zero for a
/// single-sentence cluster.
pub fn mean_cluster_similarity(cosine: &SymmetricKernel) -> Vec<f64> {
    let n = cosine.n();
    if n <= 1 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| cosine.get(i, j)).sum();
            (row - cosine.get(i, i)) / (n - 1) as f64
        })
        .collect()
}

/// Continuous LexRank: the stationary distribution of the row-normalized
/// cosine matrix, via power iteration on the transpose. Zero rows (isolated
/// sentences) are replaced by uniform rows; the result is L1-normalized.
pub fn lexrank(cosine: &SymmetricKernel) -> Vec<f64> {
    let n = cosine.n();
    if n == 0 {
        return vec![];
    }
    let mut rows = vec![0.0; n * n];
    for i in 0..n {
        let sum: f64 = (0..n).map(|j| cosine.get(i, j)).sum();
        for j in 0..n {
            rows[i * n + j] = if sum > 0.0 {
                cosine.get(i, j) / sum
            } else {
                1.0 / n as f64
            };
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..LEXRANK_MAX_ITER {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += rows[i * n + j] * x[i];
            }
        }
        let total: f64 = next.iter().sum();
        for v in &mut next {
            *v /= total;
        }
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if delta < LEXRANK_TOL {
            break;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter().map(|v| v / total).collect()
}

/// Similarity vector: the normalized tf-idf coordinates with an appended
/// constant rho, re-normalized to unit length. Two sentences with tf-idf
/// cosine c then have similarity (c + rho^2) / (1 + rho^2). A zero-mass
/// sentence with rho = 0 stays a zero vector.
pub fn phi_features(tfidf: &[(usize, f64)], vocab_size: usize, rho: f64) -> Vec<f64> {
    let mut dense = vec![0.0; vocab_size + 1];
    for &(id, w) in tfidf {
        dense[id] = w;
    }
    dense[vocab_size] = rho;
    let norm = dense.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut dense {
            *x /= norm;
        }
    }
    dense
}

/// Per-cluster derived statistics shared by the feature extractors.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    pub tfidf: TfidfVectors,
    pub cosine: SymmetricKernel,
    pub mean_similarity: Vec<f64>,
    pub lexrank: Vec<f64>,
}

impl ClusterStats {
    pub fn compute(cluster: &Cluster, idf: &IdfTable) -> Result<ClusterStats> {
        let tfidf = tfidf_vectors(cluster, idf);
        let cosine = cosine_matrix(&tfidf)?;
        let mean_similarity = mean_cluster_similarity(&cosine);
        let lexrank = lexrank(&cosine);
        Ok(ClusterStats {
            tfidf,
            cosine,
            mean_similarity,
            lexrank,
        })
    }
}

/// Fits the idf table and the global bin edges over training clusters.
pub fn fit_bins(clusters: &[Cluster], rho: f64) -> Result<FeatureConfig> {
    if clusters.is_empty() {
        return Err(PipeError::EmptyTrainingSet);
    }
    if !(rho >= 0.0) {
        return Err(PipeError::InvalidParameter {
            name: "rho",
            value: rho,
        });
    }
    let idf = IdfTable::fit(clusters);
    let mut lengths = Vec::new();
    let mut sims = Vec::new();
    let mut ranks = Vec::new();
    for cluster in clusters {
        let stats = ClusterStats::compute(cluster, &idf)?;
        lengths.extend(cluster.sentences.iter().map(|s| s.bytes as f64));
        sims.extend_from_slice(&stats.mean_similarity);
        ranks.extend_from_slice(&stats.lexrank);
    }
    Ok(FeatureConfig {
        rho,
        idf,
        length_edges: quantile_edges(&lengths, GLOBAL_BINS),
        similarity_edges: quantile_edges(&sims, GLOBAL_BINS),
        lexrank_edges: quantile_edges(&ranks, GLOBAL_BINS),
    })
}

/// The 39-dimensional quality vectors for every sentence of a cluster.
pub fn quality_features(cluster: &Cluster, config: &FeatureConfig) -> Result<Vec<Vec<f64>>> {
    let stats = ClusterStats::compute(cluster, &config.idf)?;
    quality_features_from_stats(cluster, config, &stats)
}

/// Same as [`quality_features`] but reusing precomputed cluster statistics.
pub fn quality_features_from_stats(
    cluster: &Cluster,
    config: &FeatureConfig,
    stats: &ClusterStats,
) -> Result<Vec<Vec<f64>>> {
    if !config.is_fitted() {
        return Err(PipeError::UnfittedConfig);
    }
    let sim_local = quantile_edges(&stats.mean_similarity, LOCAL_SIMILARITY_BINS);
    let rank_local = quantile_edges(&stats.lexrank, LOCAL_LEXRANK_BINS);

    let mut out = Vec::with_capacity(cluster.n());
    for (i, sentence) in cluster.sentences.iter().enumerate() {
        let mut f = Vec::with_capacity(FEATURE_DIM);
        f.push(1.0);
        f.extend(one_hot(
            bin_index(sentence.bytes as f64, &config.length_edges),
            GLOBAL_BINS,
        ));
        f.extend(one_hot(
            sentence.position.min(POSITION_SLOTS - 1),
            POSITION_SLOTS,
        ));
        let sim = stats.mean_similarity[i];
        f.push(sim);
        f.extend(one_hot(
            bin_index(sim, &config.similarity_edges),
            GLOBAL_BINS,
        ));
        f.extend(one_hot(bin_index(sim, &sim_local), LOCAL_SIMILARITY_BINS));
        let rank = stats.lexrank[i];
        f.push(rank);
        f.extend(one_hot(bin_index(rank, &config.lexrank_edges), GLOBAL_BINS));
        f.extend(one_hot(bin_index(rank, &rank_local), LOCAL_LEXRANK_BINS));
        debug_assert_eq!(f.len(), FEATURE_DIM);
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Sentence;

    fn cluster_of(lines: &[&str]) -> Cluster {
        Cluster {
            id: "t".into(),
            doc_counts: vec![lines.len()],
            sentences: lines
                .iter()
                .enumerate()
                .map(|(i, l)| Sentence {
                    text: l.to_string(),
                    bytes: l.len(),
                    doc: 0,
                    position: i,
                })
                .collect(),
            references: vec![],
        }
    }

    #[test]
    fn quantile_edges_match_reference_rule() {
        let values: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let edges = quantile_edges(&values, 5);
        let expected = [20.8, 40.6, 60.4, 80.2];
        for (e, x) in edges.iter().zip(expected) {
            assert!((e - x).abs() < 1e-9, "{e} vs {x}");
        }
    }

    #[test]
    fn constant_values_collapse_to_first_bin() {
        let edges = quantile_edges(&[3.0; 7], 5);
        assert!(edges.iter().all(|&e| e == 3.0));
        assert_eq!(bin_index(3.0, &edges), 0);
    }

    #[test]
    fn single_value_local_bins_use_first_bin() {
        let edges = quantile_edges(&[0.42], 10);
        assert_eq!(bin_index(0.42, &edges), 0);
    }

    #[test]
    fn phi_examples() {
        // rho = 0 leaves the vector unchanged.
        let v = vec![(0usize, 0.6), (2usize, 0.8)];
        let phi = phi_features(&v, 3, 0.0);
        assert_eq!(phi, vec![0.6, 0.0, 0.8, 0.0]);

        // rho = 0.3 with orthogonal sentences: similarity 0.09 / 1.09.
        let a = phi_features(&[(0, 1.0)], 2, 0.3);
        let b = phi_features(&[(1, 1.0)], 2, 0.3);
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot - 0.09 / 1.09).abs() < 1e-12);
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);

        // Huge rho drives every similarity toward one.
        let a = phi_features(&[(0, 1.0)], 2, 1e6);
        let b = phi_features(&[(1, 1.0)], 2, 1e6);
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!(dot > 1.0 - 1e-9);
    }

    #[test]
    fn similarity_is_monotone_in_rho() {
        let cos = 0.4_f64;
        let sim = |rho: f64| (cos + rho * rho) / (1.0 + rho * rho);
        let mut last = sim(0.0);
        for step in 1..=10 {
            let next = sim(step as f64 * 0.2);
            assert!(next >= last);
            last = next;
        }
    }

    #[test]
    fn lexrank_uniform_for_equal_similarities() {
        let n = 4;
        let data = vec![1.0; n * n];
        let cos = SymmetricKernel::new(n, data).unwrap();
        let scores = lexrank(&cos);
        for s in scores {
            assert!((s - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn lexrank_handles_disconnected_blocks() {
        // Block {0,1} plus isolated {2}; uniform start keeps total mass 1.
        let cos =
            SymmetricKernel::new(3, vec![1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let scores = lexrank(&cos);
        assert!((scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((scores[0] - scores[1]).abs() < 1e-9);
        assert!(scores[2] > 0.0);
    }

    #[test]
    fn lexrank_replaces_zero_rows_with_uniform() {
        // A zero-mass sentence has an all-zero cosine row (including its
        // diagonal); the walk leaves it but never returns, so its score
        // decays to zero while total mass stays one.
        let cos = SymmetricKernel::new(2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let scores = lexrank(&cos);
        assert!((scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(scores[0] > 0.999);
        assert!(scores[1] < 1e-6);
    }

    #[test]
    fn lexrank_matches_symmetric_eigensolver() {
        // Stationary distribution of D^{-1} W equals D^{1/2} u where u is
        // the top eigenvector of D^{-1/2} W D^{-1/2}.
        let w = [
            1.0, 0.3, 0.2, 0.1, 0.3, 1.0, 0.4, 0.2, 0.2, 0.4, 1.0, 0.5, 0.1, 0.2, 0.5, 1.0,
        ];
        let n = 4;
        let cos = SymmetricKernel::new(n, w.to_vec()).unwrap();
        let scores = lexrank(&cos);

        let deg: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| w[i * n + j]).sum::<f64>())
            .collect();
        let mut sym = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sym[i * n + j] = w[i * n + j] / (deg[i] * deg[j]).sqrt();
            }
        }
        let eig = dpp::eigen::jacobi_eigen(n, &sym).unwrap();
        let mut pi: Vec<f64> = (0..n)
            .map(|i| deg[i].sqrt() * eig.vector_component(i, 0))
            .collect();
        let total: f64 = pi.iter().sum();
        for p in &mut pi {
            *p /= total;
        }
        for (s, p) in scores.iter().zip(&pi) {
            assert!((s - p).abs() < 1e-8, "{s} vs {p}");
        }
    }

    #[test]
    fn feature_vectors_have_documented_shape() {
        let c = cluster_of(&["the dam released water", "engineers measured the dam"]);
        let config = fit_bins(std::slice::from_ref(&c), 0.3).unwrap();
        let f = quality_features(&c, &config).unwrap();
        assert_eq!(f.len(), 2);
        for fv in &f {
            assert_eq!(fv.len(), FEATURE_DIM);
            assert_eq!(fv[0], 1.0);
            // Exactly one indicator in each binned group.
            let length: f64 = fv[1..6].iter().sum();
            let position: f64 = fv[6..12].iter().sum();
            let sim_global: f64 = fv[13..18].iter().sum();
            let sim_local: f64 = fv[18..28].iter().sum();
            let rank_global: f64 = fv[29..34].iter().sum();
            let rank_local: f64 = fv[34..39].iter().sum();
            for total in [
                length,
                position,
                sim_global,
                sim_local,
                rank_global,
                rank_local,
            ] {
                assert_eq!(total, 1.0);
            }
        }
        // First sentence of the document sets the position-1 indicator.
        assert_eq!(f[0][6], 1.0);
        assert_eq!(f[1][7], 1.0);
        assert_eq!(FeatureConfig::feature_names().len(), FEATURE_DIM);
    }

    #[test]
    fn unfitted_config_is_rejected() {
        let c = cluster_of(&["a b"]);
        let config = FeatureConfig {
            rho: 0.3,
            idf: IdfTable::uniform(),
            length_edges: vec![],
            similarity_edges: vec![],
            lexrank_edges: vec![],
        };
        assert!(matches!(
            quality_features(&c, &config),
            Err(PipeError::UnfittedConfig)
        ));
    }
}
