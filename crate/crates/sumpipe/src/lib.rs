//! Text side of the summarization pipeline: cluster ingestion, tf-idf
//! similarity features with a constant repulsion coordinate, the quality
//! feature set, greedy oracle extracts, n-gram scoring, and summary
//! assembly under a byte budget.

pub mod assemble;
pub mod cluster;
pub mod compile;
pub mod error;
pub mod features;
pub mod model;
pub mod oracle;
pub mod score;
pub mod text;
pub mod tfidf;

pub use assemble::{assemble_summary, begin_text, truncate_bytes};
pub use cluster::{Cluster, Sentence};
pub use compile::{compile_instance, compile_with_oracle};
pub use error::{PipeError, Result};
pub use features::{
    fit_bins, lexrank, mean_cluster_similarity, phi_features, quality_features, FeatureConfig,
    FEATURE_DIM,
};
pub use model::{ModelFile, TrainStatus};
pub use oracle::oracle_summary;
pub use score::{ngram_score, NgramScore};
pub use tfidf::{cosine_matrix, tfidf_vectors, IdfTable};

/// Default summary budget in bytes, spaces included.
pub const DEFAULT_BUDGET: usize = 665;
/// Default constant similarity feature.
pub const DEFAULT_RHO: f64 = 0.3;
