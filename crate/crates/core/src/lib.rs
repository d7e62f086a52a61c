//! Standard LSTM and the SLIM LSTM1/LSTM2/LSTM3 gate reductions, with exact
//! backpropagation through time, a conv + bidirectional-LSTM text classifier,
//! and an experiment harness for sweeping variants, activations and learning
//! rates.
//!
//! Modules, bottom up:
//!
//! - [`linalg`]: dense `f64` matrices, the seeded generator, Glorot init.
//! - [`activations`]: tanh, sigmoid, linear, ReLU, softmax and their derivatives.
//! - [`cells`]: the four cell variants, single-step forward/backward, and
//!   parameter/operation counts.
//! - [`layers`]: embedding, conv, pooling, dropout, BiLSTM, dense, and the
//!   assembled [`layers::Model`].
//! - [`train`]: loss, optimizers, the training loop, gradient checking and
//!   collapse detection.
//! - [`data`]: vocabulary, corpus and embedding loaders, synthetic tasks.
//! - [`harness`]: sweep configs, result tables, seed-variance studies,
//!   reference tables, benchmarks.

pub mod activations;
pub mod cells;
pub mod data;
pub mod error;
pub mod harness;
pub mod layers;
pub mod linalg;
pub mod params;
pub mod train;

pub use activations::ActivationKind;
pub use cells::{CellConfig, CellParams, CellState, Variant};
pub use error::{Error, Result};
pub use linalg::{Matrix, Rng};
pub use params::ParamSet;
