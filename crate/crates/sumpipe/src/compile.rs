//! Compiles a cluster into a conditional-DPP instance.

use dpp::{Instance, Item, Subset};

use crate::cluster::Cluster;
use crate::error::Result;
use crate::features::{phi_features, quality_features_from_stats, ClusterStats, FeatureConfig};
use crate::oracle::oracle_summary;

/// Builds the instance for one cluster: quality feature vectors, unit
/// similarity vectors (tf-idf plus the rho coordinate), byte costs, and an
/// optional gold subset.
pub fn compile_instance(
    cluster: &Cluster,
    config: &FeatureConfig,
    gold: Option<Subset>,
) -> Result<Instance> {
    let stats = ClusterStats::compute(cluster, &config.idf)?;
    let features = quality_features_from_stats(cluster, config, &stats)?;
    let items: Vec<Item> = cluster
        .sentences
        .iter()
        .enumerate()
        .map(|(i, sentence)| Item {
            features: features[i].clone(),
            phi: phi_features(&stats.tfidf.vectors[i], stats.tfidf.vocab_size, config.rho),
            cost: sentence.bytes as f64,
            doc: sentence.doc,
            position: sentence.position,
        })
        .collect();
    Ok(Instance::new(cluster.id.clone(), items, gold)?)
}

/// Compiles a training instance whose gold subset is the greedy oracle
/// extract under the byte budget.
pub fn compile_with_oracle(
    cluster: &Cluster,
    config: &FeatureConfig,
    budget: usize,
) -> Result<Instance> {
    let gold = oracle_summary(cluster, budget)?;
    compile_instance(cluster, config, Some(gold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Sentence;
    use crate::features::fit_bins;

    #[test]
    fn compiled_instance_has_unit_phi_and_costs() {
        let lines = ["the dam released water", "engineers measured the mark"];
        let cluster = Cluster {
            id: "c".into(),
            doc_counts: vec![2],
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
            references: vec!["the dam released water".into()],
        };
        let config = fit_bins(std::slice::from_ref(&cluster), 0.3).unwrap();
        let inst = compile_with_oracle(&cluster, &config, 665).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.feature_dim(), crate::features::FEATURE_DIM);
        assert_eq!(inst.items()[0].cost, lines[0].len() as f64);
        assert_eq!(inst.gold().unwrap().indices(), &[0]);
        for item in inst.items() {
            let norm: f64 = item.phi.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
