use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{
    build_vocab, gen_synthetic, load_corpus, load_embeddings, read_dataset, Dataset,
    SyntheticTaskSpec,
};
use crate::error::Result;
use crate::linalg::{Matrix, Rng};

/// Text corpus on disk, optionally with pretrained word vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusTaskSpec {
    /// Directory with one subdirectory per class.
    pub path: PathBuf,
    #[serde(default = "default_vocab_size")]
    pub vocab_size: usize,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    /// GloVe-format text file; rows missing from it are Glorot-initialized.
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
    /// Seed for the fallback rows of the embedding table.
    #[serde(default)]
    pub embedding_seed: u64,
}

fn default_vocab_size() -> usize {
    20_000
}

fn default_t_max() -> usize {
    100
}

/// Where a run's examples come from. Selected in TOML by `source`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum TaskSpec {
    Synthetic(SyntheticTaskSpec),
    Corpus(CorpusTaskSpec),
    /// A dataset written by [`super::write_dataset`].
    Cache {
        path: PathBuf,
    },
}

impl Default for TaskSpec {
    fn default() -> Self {
        TaskSpec::Synthetic(SyntheticTaskSpec::default())
    }
}

/// Materialized task: the examples plus an embedding table when one was supplied.
#[derive(Debug, Clone)]
pub struct LoadedTask {
    pub dataset: Dataset,
    pub embeddings: Option<Matrix>,
}

impl TaskSpec {
    pub fn load(&self) -> Result<LoadedTask> {
        match self {
            TaskSpec::Synthetic(spec) => Ok(LoadedTask {
                dataset: gen_synthetic(spec)?,
                embeddings: None,
            }),
            TaskSpec::Cache { path } => Ok(LoadedTask {
                dataset: read_dataset(path)?,
                embeddings: None,
            }),
            TaskSpec::Corpus(spec) => {
                let corpus = load_corpus(&spec.path)?;
                let vocab = build_vocab(&corpus.texts, spec.vocab_size)?;
                let dataset = corpus.to_dataset(&vocab, spec.t_max)?;
                let embeddings = spec
                    .embeddings
                    .as_ref()
                    .map(|p| load_embeddings(p, &vocab, &mut Rng::new(spec.embedding_seed)))
                    .transpose()?;
                Ok(LoadedTask {
                    dataset,
                    embeddings,
                })
            }
        }
    }
}
