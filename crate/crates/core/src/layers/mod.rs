//! Layers of the conv + bidirectional-LSTM text classifier, each with an
//! explicit forward cache and a backward pass that accumulates into a
//! gradient container of the same type.
//!
//! Sequences are `Vec<Matrix>` of column vectors, one per time step.

mod bilstm;
mod conv;
mod dense;
mod dropout;
mod embedding;
mod model;
mod pool;

pub use bilstm::{BiLstmCache, BiLstmLayer, DirectionCache};
pub use conv::{Conv1DCache, Conv1DLayer};
pub use dense::{DenseCache, DenseLayer};
pub use dropout::{sample_mask, DropoutSpec, SequenceDropout};
pub use embedding::EmbeddingLayer;
pub use model::{ArchitectureSpec, ConvBlock, ConvBlockSpec, Model, ModelCache};
pub use pool::{MaxPool1DLayer, PoolCache};

use crate::linalg::Rng;

/// Forward-pass mode. Dropout masks are only drawn in training mode.
#[derive(Debug)]
pub enum Mode<'a> {
    Train(&'a mut Rng),
    Eval,
}

impl Mode<'_> {
    pub fn is_train(&self) -> bool {
        matches!(self, Mode::Train(_))
    }

    pub(crate) fn rng(&mut self) -> Option<&mut Rng> {
        match self {
            Mode::Train(rng) => Some(rng),
            Mode::Eval => None,
        }
    }
}
