use serde::{Deserialize, Serialize};

use super::bilstm::{BiLstmCache, BiLstmLayer};
use super::conv::{Conv1DCache, Conv1DLayer};
use super::dense::{DenseCache, DenseLayer};
use super::dropout::{check_rate, DropoutSpec, SequenceDropout};
use super::embedding::EmbeddingLayer;
use super::pool::{MaxPool1DLayer, PoolCache};
use super::Mode;
use crate::activations::ActivationKind;
use crate::cells::{CellConfig, Variant};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::params::{prefixed, ParamSet};

/// One `Conv1D -> MaxPool1D -> Dropout` stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvBlockSpec {
    pub filters: usize,
    pub kernel: usize,
    pub pool: usize,
    pub dropout: f64,
    pub activation: ActivationKind,
}

impl Default for ConvBlockSpec {
    fn default() -> Self {
        Self {
            filters: 8,
            kernel: 3,
            pool: 2,
            dropout: 0.2,
            activation: ActivationKind::Relu,
        }
    }
}

/// Sizes, activations and rates of the full classifier:
///
/// ```text
/// Embedding -> [Conv1D -> MaxPool1D -> Dropout] x conv.len() -> BiLSTM
///           -> Dense(dense_units, dense_activation) -> Dense(classes, softmax)
/// ```
///
/// Defaults are the desk-scale configuration. Every field may be overridden
/// from a TOML table; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchitectureSpec {
    pub vocab_size: usize,
    pub seq_len: usize,
    pub embed_dim: usize,
    pub embed_trainable: bool,
    pub conv: Vec<ConvBlockSpec>,
    pub variant: Variant,
    pub hidden: usize,
    pub cell_activation: ActivationKind,
    pub gate_activation: ActivationKind,
    pub input_dropout: f64,
    pub recurrent_dropout: f64,
    pub dense_units: usize,
    pub dense_activation: ActivationKind,
    pub classes: usize,
}

impl Default for ArchitectureSpec {
    fn default() -> Self {
        Self {
            vocab_size: 50,
            seq_len: 30,
            embed_dim: 8,
            embed_trainable: true,
            conv: vec![ConvBlockSpec::default(); 3],
            variant: Variant::Standard,
            hidden: 6,
            cell_activation: ActivationKind::Tanh,
            gate_activation: ActivationKind::Sigmoid,
            input_dropout: 0.2,
            recurrent_dropout: 0.3,
            dense_units: 16,
            dense_activation: ActivationKind::Relu,
            classes: 4,
        }
    }
}

impl ArchitectureSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("architecture spec: {e}")))
    }

    pub fn cell_config(&self) -> CellConfig {
        CellConfig {
            gate_activation: self.gate_activation,
            cell_activation: self.cell_activation,
        }
    }

    /// One conv block and no dropout; accepts sequences of 4 or more tokens.
    pub fn compact() -> Self {
        Self {
            conv: vec![ConvBlockSpec {
                dropout: 0.0,
                ..ConvBlockSpec::default()
            }],
            ..Self::default()
        }
        .without_dropout()
    }

    /// Same spec with every dropout rate set to zero.
    pub fn without_dropout(&self) -> Self {
        let mut spec = self.clone();
        spec.input_dropout = 0.0;
        spec.recurrent_dropout = 0.0;
        spec.conv.iter_mut().for_each(|c| c.dropout = 0.0);
        spec
    }

    /// Checks sizes, rates, and that every layer's output fits the next
    /// layer's input. Returns the sequence length reaching the BiLSTM.
    pub fn validate(&self) -> Result<usize> {
        let positive = [
            ("vocab_size", self.vocab_size),
            ("seq_len", self.seq_len),
            ("embed_dim", self.embed_dim),
            ("hidden", self.hidden),
            ("dense_units", self.dense_units),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::config(format!(
                    "architecture field `{name}` must be positive"
                )));
            }
        }
        if self.classes < 2 {
            return Err(Error::config("architecture needs at least 2 classes"));
        }
        check_rate("input_dropout", self.input_dropout)?;
        check_rate("recurrent_dropout", self.recurrent_dropout)?;

        let mut len = self.seq_len;
        let mut upstream = format!("embedding (length {len})");
        for (b, block) in self.conv.iter().enumerate() {
            let name = format!("conv block {}", b + 1);
            if block.filters == 0 || block.kernel == 0 || block.pool == 0 {
                return Err(Error::config(format!(
                    "{name}: filters, kernel and pool must be positive"
                )));
            }
            check_rate(&format!("{name} dropout"), block.dropout)?;
            if len < block.kernel {
                return Err(Error::config(format!(
                    "{upstream} is too short for {name} conv with kernel {}",
                    block.kernel
                )));
            }
            len = len - block.kernel + 1;
            let pooled = len / block.pool;
            if pooled == 0 {
                return Err(Error::config(format!(
                    "{name} conv output (length {len}) is shorter than {name} maxpool width {}",
                    block.pool
                )));
            }
            len = pooled;
            upstream = format!("{name} maxpool (length {len})");
        }
        Ok(len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvBlock {
    pub conv: Conv1DLayer,
    pub pool: MaxPool1DLayer,
    pub dropout: SequenceDropout,
}

#[derive(Debug, Clone)]
struct BlockCache {
    conv: Conv1DCache,
    pool: PoolCache,
    masks: Option<Vec<Matrix>>,
}

#[derive(Debug, Clone)]
pub struct ModelCache {
    tokens: Vec<usize>,
    blocks: Vec<BlockCache>,
    bilstm: BiLstmCache,
    hidden: DenseCache,
    head: DenseCache,
}

impl ModelCache {
    pub fn bilstm(&self) -> &BiLstmCache {
        &self.bilstm
    }

    pub fn probabilities(&self) -> &Matrix {
        self.head.output()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    spec: ArchitectureSpec,
    pub embedding: EmbeddingLayer,
    pub blocks: Vec<ConvBlock>,
    pub bilstm: BiLstmLayer,
    pub hidden: DenseLayer,
    pub head: DenseLayer,
}

impl Model {
    /// Builds the pipeline with fresh Glorot weights.
    pub fn assemble(spec: &ArchitectureSpec, rng: &mut Rng) -> Result<Self> {
        spec.validate()?;
        let embedding = EmbeddingLayer::glorot(spec.vocab_size, spec.embed_dim, rng);
        Self::assemble_with_embedding(spec, embedding, rng)
    }

    /// Builds the pipeline around a given embedding table (e.g. pretrained vectors).
    pub fn assemble_with_embedding(
        spec: &ArchitectureSpec,
        embedding: EmbeddingLayer,
        rng: &mut Rng,
    ) -> Result<Self> {
        spec.validate()?;
        if embedding.table.shape() != (spec.vocab_size, spec.embed_dim) {
            return Err(Error::config(format!(
                "embedding table is {}x{} but the architecture expects vocab_size x embed_dim = {}x{}",
                embedding.table.rows(),
                embedding.table.cols(),
                spec.vocab_size,
                spec.embed_dim
            )));
        }
        let mut embedding = embedding;
        embedding.trainable = spec.embed_trainable;
        let mut channels = spec.embed_dim;
        let blocks = spec
            .conv
            .iter()
            .map(|b| {
                let conv = Conv1DLayer::glorot(channels, b.filters, b.kernel, b.activation, rng);
                channels = b.filters;
                ConvBlock {
                    conv,
                    pool: MaxPool1DLayer::new(b.pool),
                    dropout: SequenceDropout { rate: b.dropout },
                }
            })
            .collect();
        let bilstm = BiLstmLayer::new(
            spec.variant,
            channels,
            spec.hidden,
            spec.cell_config(),
            DropoutSpec::new(spec.input_dropout, spec.recurrent_dropout)?,
            rng,
        );
        let hidden = DenseLayer::glorot(
            2 * spec.hidden,
            spec.dense_units,
            spec.dense_activation,
            rng,
        );
        let head = DenseLayer::glorot(spec.dense_units, spec.classes, ActivationKind::Softmax, rng);
        Ok(Self {
            spec: spec.clone(),
            embedding,
            blocks,
            bilstm,
            hidden,
            head,
        })
    }

    pub fn spec(&self) -> &ArchitectureSpec {
        &self.spec
    }

    pub fn classes(&self) -> usize {
        self.head.outputs()
    }

    /// A zero-filled copy used to accumulate gradients.
    pub fn zeros_like(&self) -> Model {
        let mut z = self.clone();
        z.zero();
        z.embedding.table.fill(0.0);
        z
    }

    /// Trainable scalars per layer, in pipeline order.
    pub fn layer_param_counts(&self) -> Vec<(String, usize)> {
        let mut out = vec![("embedding".to_string(), self.embedding.scalar_count())];
        for (b, block) in self.blocks.iter().enumerate() {
            out.push((format!("conv{}", b + 1), block.conv.scalar_count()));
        }
        out.push(("bilstm".into(), self.bilstm.scalar_count()));
        out.push(("dense1".into(), self.hidden.scalar_count()));
        out.push(("dense2".into(), self.head.scalar_count()));
        out
    }

    /// Class probabilities for `tokens` plus the cache for [`Model::backward_into`].
    pub fn forward(&self, tokens: &[usize], mode: &mut Mode<'_>) -> Result<(Matrix, ModelCache)> {
        if tokens.len() != self.spec.seq_len {
            return Err(Error::data(format!(
                "model expects sequences of length {}, got {}",
                self.spec.seq_len,
                tokens.len()
            )));
        }
        let mut seq = self.embedding.forward(tokens)?;
        let mut block_caches = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let (conv_out, conv) = block.conv.forward(&seq)?;
            let (pooled, pool) = block.pool.forward(&conv_out);
            let (dropped, masks) = block.dropout.forward(pooled, mode);
            block_caches.push(BlockCache { conv, pool, masks });
            seq = dropped;
        }
        let (features, bilstm) = self.bilstm.forward(&seq, mode)?;
        let (hidden_out, hidden) = self.hidden.forward(&features)?;
        let (probs, head) = self.head.forward(&hidden_out)?;
        let cache = ModelCache {
            tokens: tokens.to_vec(),
            blocks: block_caches,
            bilstm,
            hidden,
            head,
        };
        Ok((probs, cache))
    }

    /// Eval-mode class probabilities.
    pub fn predict(&self, tokens: &[usize]) -> Result<Matrix> {
        Ok(self.forward(tokens, &mut Mode::Eval)?.0)
    }

    /// Backpropagates `d_logits`, the gradient with respect to the softmax
    /// head's pre-activation, accumulating into `grads`.
    pub fn backward_into(&self, cache: &ModelCache, d_logits: &Matrix, grads: &mut Model) {
        let d_hidden =
            self.head
                .backward_preactivation_into(&cache.head, d_logits, &mut grads.head);
        let d_features = self
            .hidden
            .backward_into(&cache.hidden, &d_hidden, &mut grads.hidden);
        let mut d_seq = self
            .bilstm
            .backward_into(&cache.bilstm, &d_features, &mut grads.bilstm);
        for ((block, bc), gb) in self
            .blocks
            .iter()
            .zip(&cache.blocks)
            .zip(grads.blocks.iter_mut())
            .rev()
        {
            let d_pooled = SequenceDropout::backward(bc.masks.as_deref(), d_seq);
            let d_conv = block.pool.backward(&bc.pool, &d_pooled);
            d_seq = block.conv.backward_into(&bc.conv, &d_conv, &mut gb.conv);
        }
        self.embedding
            .backward_into(&cache.tokens, &d_seq, &mut grads.embedding);
    }
}

impl ParamSet for Model {
    fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out: Vec<(String, &Matrix)> =
            prefixed("embedding", self.embedding.named_tensors()).collect();
        for (b, block) in self.blocks.iter().enumerate() {
            out.extend(prefixed(
                &format!("conv{}", b + 1),
                block.conv.named_tensors(),
            ));
        }
        out.extend(prefixed("bilstm", self.bilstm.named_tensors()));
        out.extend(prefixed("dense1", self.hidden.named_tensors()));
        out.extend(prefixed("dense2", self.head.named_tensors()));
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = self.embedding.tensors_mut();
        for block in self.blocks.iter_mut() {
            out.extend(block.conv.tensors_mut());
        }
        out.extend(self.bilstm.tensors_mut());
        out.extend(self.hidden.tensors_mut());
        out.extend(self.head.tensors_mut());
        out
    }
}
