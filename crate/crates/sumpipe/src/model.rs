//! The trained-model file: parameters, feature configuration, and trainer
//! diagnostics, serialized as JSON with exact float round-trips.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::FeatureConfig;
use crate::tfidf::IdfTable;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainStatus {
    pub converged: bool,
    pub iterations: usize,
    pub grad_inf_norm: f64,
}

/// Everything needed to apply a trained model to an unseen cluster.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub m: usize,
    pub theta: Vec<f64>,
    /// Prior variance; serialized as a string where JSON lacks a
    /// representation (infinity disables the prior).
    #[serde(with = "maybe_infinite")]
    pub sigma2: f64,
    pub rho: f64,
    pub feature_names: Vec<String>,
    pub length_edges: Vec<f64>,
    pub similarity_edges: Vec<f64>,
    pub lexrank_edges: Vec<f64>,
    pub idf: BTreeMap<String, f64>,
    pub idf_default: f64,
    pub idf_doc_count: usize,
    pub status: TrainStatus,
}

impl ModelFile {
    pub fn new(theta: Vec<f64>, sigma2: f64, config: &FeatureConfig, status: TrainStatus) -> Self {
        ModelFile {
            m: theta.len(),
            theta,
            sigma2,
            rho: config.rho,
            feature_names: FeatureConfig::feature_names(),
            length_edges: config.length_edges.clone(),
            similarity_edges: config.similarity_edges.clone(),
            lexrank_edges: config.lexrank_edges.clone(),
            idf: config.idf.weights().clone(),
            idf_default: config.idf.default_weight(),
            idf_doc_count: config.idf.doc_count(),
            status,
        }
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            rho: self.rho,
            idf: IdfTable::from_parts(self.idf.clone(), self.idf_default, self.idf_doc_count),
            length_edges: self.length_edges.clone(),
            similarity_edges: self.similarity_edges.clone(),
            lexrank_edges: self.lexrank_edges.clone(),
        }
    }

    pub fn conditional_model(&self) -> Result<dpp::ConditionalModel> {
        Ok(dpp::ConditionalModel::new(
            self.theta.clone(),
            self.sigma2,
            self.feature_names.clone(),
        )?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let body = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// JSON has no infinity literal; non-finite variances round-trip as strings.
mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_f64(*value)
        } else {
            s.serialize_str(&value.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, Sentence};
    use crate::features::fit_bins;

    fn toy_config() -> FeatureConfig {
        let cluster = Cluster {
            id: "c".into(),
            doc_counts: vec![2],
            sentences: ["the dam", "the river rose"]
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
        };
        fit_bins(std::slice::from_ref(&cluster), 0.3).unwrap()
    }

    #[test]
    fn model_file_roundtrips_exactly() {
        let config = toy_config();
        let theta: Vec<f64> = (0..5).map(|i| (i as f64 + 0.1) / 3.0).collect();
        let file = ModelFile::new(
            theta.clone(),
            2.5,
            &config,
            TrainStatus {
                converged: true,
                iterations: 17,
                grad_inf_norm: 3.2e-9,
            },
        );
        let tmp = std::env::temp_dir().join(format!("model-{}.json", std::process::id()));
        file.save(&tmp).unwrap();
        let back = ModelFile::load(&tmp).unwrap();
        std::fs::remove_file(&tmp).unwrap();
        assert_eq!(back.theta, theta);
        assert_eq!(back.sigma2, 2.5);
        assert_eq!(back.idf, *config.idf.weights());
        assert!(back.status.converged);
    }

    #[test]
    fn infinite_sigma_roundtrips() {
        let config = toy_config();
        let file = ModelFile::new(
            vec![0.0; 3],
            f64::INFINITY,
            &config,
            TrainStatus {
                converged: false,
                iterations: 500,
                grad_inf_norm: 0.1,
            },
        );
        let body = serde_json::to_string(&file).unwrap();
        let back: ModelFile = serde_json::from_str(&body).unwrap();
        assert!(back.sigma2.is_infinite());
    }
}
