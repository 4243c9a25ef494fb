//! Document clusters and their on-disk format.
//!
//! A cluster is a directory with `docs/<k>.txt` (one pre-split sentence per
//! line, in original order), `refs/<j>.txt` (one reference summary per
//! file), and an optional `meta` key-value file (`id = ...`).

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{PipeError, Result};

/// One candidate sentence with its provenance.
#[derive(Debug, Clone)]
pub struct Sentence {
    pub text: String,
    /// Byte length of the raw sentence text, spaces included.
    pub bytes: usize,
    /// Document index within the cluster.
    pub doc: usize,
    /// Zero-based position within the document.
    pub position: usize,
}

/// A document collection with reference summaries, sentences flattened in
/// (document, position) order.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub id: String,
    pub doc_counts: Vec<usize>,
    pub sentences: Vec<Sentence>,
    pub references: Vec<String>,
}

impl Cluster {
    pub fn n(&self) -> usize {
        self.sentences.len()
    }

    /// Loads the documented directory format.
    pub fn ingest(path: &Path) -> Result<Cluster> {
        let docs_dir = path.join("docs");
        let mut doc_files = list_sorted(&docs_dir).map_err(|e| PipeError::MalformedCluster {
            path: path.to_path_buf(),
            detail: format!("cannot list docs/: {e}"),
        })?;
        doc_files.retain(|p| p.extension().is_some_and(|e| e == "txt"));
        if doc_files.is_empty() {
            return Err(PipeError::EmptyCluster {
                path: path.to_path_buf(),
            });
        }

        let mut sentences = Vec::new();
        let mut doc_counts = Vec::new();
        for (doc, file) in doc_files.iter().enumerate() {
            let body = fs::read_to_string(file).map_err(|e| PipeError::MalformedCluster {
                path: file.clone(),
                detail: e.to_string(),
            })?;
            let mut count = 0;
            for (position, line) in body.lines().filter(|l| !l.trim().is_empty()).enumerate() {
                sentences.push(Sentence {
                    text: line.to_string(),
                    bytes: line.len(),
                    doc,
                    position,
                });
                count += 1;
            }
            if count == 0 {
                return Err(PipeError::MalformedCluster {
                    path: file.clone(),
                    detail: "document has no sentences".into(),
                });
            }
            doc_counts.push(count);
        }

        let refs_dir = path.join("refs");
        let mut references = Vec::new();
        if refs_dir.is_dir() {
            for file in list_sorted(&refs_dir)? {
                if file.extension().is_some_and(|e| e == "txt") {
                    references.push(fs::read_to_string(&file)?);
                }
            }
        }

        let mut id = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "cluster".into());
        let meta = path.join("meta");
        if meta.is_file() {
            for line in fs::read_to_string(&meta)?.lines() {
                if let Some((key, value)) = line.split_once('=') {
                    if key.trim() == "id" {
                        id = value.trim().to_string();
                    }
                }
            }
        }

        Ok(Cluster {
            id,
            doc_counts,
            sentences,
            references,
        })
    }

    /// Ingests every cluster directory directly under `dir`, sorted by
    /// directory name.
    pub fn ingest_corpus(dir: &Path) -> Result<Vec<Cluster>> {
        let mut clusters = Vec::new();
        for entry in list_sorted(dir)? {
            if entry.is_dir() {
                clusters.push(Cluster::ingest(&entry)?);
            }
        }
        if clusters.is_empty() {
            return Err(PipeError::EmptyCluster {
                path: dir.to_path_buf(),
            });
        }
        Ok(clusters)
    }
}

fn list_sorted(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .collect();
    entries.sort();
    Ok(entries)
}
