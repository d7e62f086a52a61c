//! Text and synthetic data: vocabulary, fixed-length encoding, corpus and
//! embedding-file loaders, synthetic sequence tasks, splits, and a versioned
//! on-disk dataset dump, and the [`TaskSpec`] that selects between them.

mod cache;
mod corpus;
mod embeddings;
mod synthetic;
mod task;
mod vocab;

pub use cache::{read_dataset, write_dataset, DATASET_FORMAT_VERSION};
pub use corpus::{load_corpus, Corpus};
pub use embeddings::{load_embeddings, EmbeddingTable};
pub use synthetic::{gen_synthetic, SyntheticKind, SyntheticTaskSpec};
pub use task::{CorpusTaskSpec, LoadedTask, TaskSpec};
pub use vocab::{build_vocab, encode, tokenize, Vocab, PAD_ID, UNK_ID};

use crate::error::{Error, Result};
use crate::linalg::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub tokens: Vec<usize>,
    pub label: usize,
}

/// Labelled fixed-length token sequences plus a train/validation assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub class_count: usize,
    pub t_max: usize,
    pub vocab_size: usize,
    pub class_names: Vec<String>,
    pub split: Vec<Split>,
}

impl Dataset {
    /// Builds a dataset with every example assigned to the training split.
    pub fn new(
        examples: Vec<Example>,
        class_count: usize,
        t_max: usize,
        vocab_size: usize,
    ) -> Result<Self> {
        let split = vec![Split::Train; examples.len()];
        let ds = Self {
            examples,
            class_count,
            t_max,
            vocab_size,
            class_names: (0..class_count).map(|c| format!("class{c}")).collect(),
            split,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Fixed length, label range, token range and split bookkeeping.
    pub fn validate(&self) -> Result<()> {
        if self.class_count == 0 || self.t_max == 0 || self.vocab_size == 0 {
            return Err(Error::data(
                "dataset needs positive class count, length and vocabulary size",
            ));
        }
        if self.class_names.len() != self.class_count {
            return Err(Error::data("class name list does not match class count"));
        }
        if self.split.len() != self.examples.len() {
            return Err(Error::data("split assignment does not cover every example"));
        }
        for (i, ex) in self.examples.iter().enumerate() {
            if ex.tokens.len() != self.t_max {
                return Err(Error::data(format!(
                    "example {i} has length {}, expected {}",
                    ex.tokens.len(),
                    self.t_max
                )));
            }
            if ex.label >= self.class_count {
                return Err(Error::data(format!(
                    "example {i} has label {} but there are {} classes",
                    ex.label, self.class_count
                )));
            }
            if let Some(&id) = ex.tokens.iter().find(|&&id| id >= self.vocab_size) {
                return Err(Error::data(format!(
                    "example {i} contains token id {id} outside the vocabulary of size {}",
                    self.vocab_size
                )));
            }
        }
        Ok(())
    }

    pub fn indices(&self, which: Split) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.split[i] == which)
            .collect()
    }
}

/// Shuffles example indices with `seed` and sends the first
/// `ceil(len * val_fraction)` to validation, the rest to training.
pub fn split(dataset: &mut Dataset, val_fraction: f64, seed: u64) -> Result<()> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::config(format!(
            "validation fraction must be in (0, 1), got {val_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    Rng::new(seed).shuffle(&mut order);
    let n_val = (dataset.len() as f64 * val_fraction).ceil() as usize;
    dataset.split = vec![Split::Train; dataset.len()];
    for &i in &order[..n_val.min(order.len())] {
        dataset.split[i] = Split::Validation;
    }
    Ok(())
}
