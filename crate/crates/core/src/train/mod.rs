//! Loss, optimizers, the training loop, gradient checking and collapse
//! detection.

mod collapse;
mod gradcheck;
mod loss;
mod optim;

pub use collapse::{collapse_threshold, detect_collapse, detect_collapse_in};
pub use gradcheck::{
    check_gradients, grad_check_model, relative_error, GradCheckReport, TensorCheck,
    UnrolledCellProblem, Violation,
};
pub use loss::{argmax, cross_entropy, cross_entropy_logit_grad, loss_and_grad, PROB_FLOOR};
pub use optim::{Optimizer, OptimizerConfig, OptimizerKind};

use serde::{Deserialize, Serialize};

use crate::activations::ActivationKind;
use crate::cells::Variant;
use crate::data::{split, Dataset, Split, TaskSpec};
use crate::error::{Error, Result};
use crate::layers::{ArchitectureSpec, EmbeddingLayer, Mode, Model};
use crate::linalg::{Matrix, Rng};
use crate::params::ParamSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub optimizer: OptimizerKind,
    pub batch_size: usize,
    pub val_fraction: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            batch_size: 16,
            val_fraction: 0.2,
        }
    }
}

/// Everything that determines one training run.
///
/// `variant` and `activation` (the cell activation) take precedence over the
/// matching fields of `architecture`; vocabulary size, sequence length and
/// class count are taken from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub activation: ActivationKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    #[serde(default)]
    pub task: TaskSpec,
    #[serde(default)]
    pub architecture: ArchitectureSpec,
    #[serde(default)]
    pub training: TrainingConfig,
}

impl ExperimentConfig {
    /// Defaults for everything but the swept quantities.
    pub fn new(
        variant: Variant,
        activation: ActivationKind,
        learning_rate: f64,
        epochs: usize,
        seed: u64,
    ) -> Self {
        Self {
            variant,
            activation,
            learning_rate,
            epochs,
            seed,
            task: TaskSpec::default(),
            architecture: ArchitectureSpec::default(),
            training: TrainingConfig::default(),
        }
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig::new(self.training.optimizer, self.learning_rate)
    }

    /// The architecture actually built for `data`.
    pub fn resolved_architecture(
        &self,
        data: &Dataset,
        embeddings: Option<&Matrix>,
    ) -> ArchitectureSpec {
        let mut spec = self.architecture.clone();
        spec.vocab_size = data.vocab_size;
        spec.seq_len = data.t_max;
        spec.classes = data.class_count;
        spec.variant = self.variant;
        spec.cell_activation = self.activation;
        if let Some(table) = embeddings {
            spec.embed_dim = table.cols();
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.training.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        if !(self.training.val_fraction > 0.0 && self.training.val_fraction < 1.0) {
            return Err(Error::config(format!(
                "validation fraction must be in (0, 1), got {}",
                self.training.val_fraction
            )));
        }
        Ok(())
    }
}

/// Metrics after one epoch. `epoch` counts from 1.
///
/// Losses are mean cross-entropy; a loss is NaN when any example in that
/// split diverged, and diverged examples count as misclassified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub collapsed: bool,
    pub nonfinite: bool,
}

/// Final model plus the per-epoch history.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: Model,
    pub records: Vec<EpochRecord>,
    /// True when training stopped early because no update in an epoch succeeded.
    pub aborted: bool,
}

/// Trains on `data` and returns one record per completed epoch.
pub fn fit(config: &ExperimentConfig, data: &Dataset) -> Result<Vec<EpochRecord>> {
    Ok(fit_model(config, data, None)?.records)
}

/// Splits `data` by the run seed, builds the model (around `embeddings` when
/// given), and trains for `config.epochs` epochs.
///
/// Each run draws independent streams for the split, initialization, shuffling
/// and dropout from `config.seed`, so results are a pure function of
/// `(config, data)`.
pub fn fit_model(
    config: &ExperimentConfig,
    data: &Dataset,
    embeddings: Option<&Matrix>,
) -> Result<FitOutcome> {
    config.validate()?;
    data.validate()?;
    let mut master = Rng::new(config.seed);
    let split_seed = master.next_u64();
    let mut init_rng = master.fork();
    let mut shuffle_rng = master.fork();
    let mut dropout_rng = master.fork();

    let mut data = data.clone();
    split(&mut data, config.training.val_fraction, split_seed)?;
    let mut train_idx = data.indices(Split::Train);
    let val_idx = data.indices(Split::Validation);
    if train_idx.is_empty() {
        return Err(Error::data(
            "no training examples left after the validation split",
        ));
    }

    let spec = config.resolved_architecture(&data, embeddings);
    let mut model = match embeddings {
        Some(table) => Model::assemble_with_embedding(
            &spec,
            EmbeddingLayer::new(table.clone(), spec.embed_trainable),
            &mut init_rng,
        )?,
        None => Model::assemble(&spec, &mut init_rng)?,
    };
    let mut grads = model.zeros_like();
    let mut optimizer = Optimizer::new(config.optimizer());
    let mut records = Vec::with_capacity(config.epochs);
    let mut aborted = false;

    for epoch in 1..=config.epochs {
        shuffle_rng.shuffle(&mut train_idx);
        let mut train = Tally::default();
        let mut updates = 0usize;
        let mut nonfinite = false;

        for batch in train_idx.chunks(config.training.batch_size) {
            grads.zero();
            let mut ok = 0usize;
            for &i in batch {
                let ex = &data.examples[i];
                let mut mode = Mode::Train(&mut dropout_rng);
                match evaluate(&model, &ex.tokens, ex.label, &mut mode)? {
                    Some((loss, correct, probs, cache)) => {
                        train.record(loss, correct);
                        let d_logits = cross_entropy_logit_grad(&probs, ex.label);
                        model.backward_into(&cache, &d_logits, &mut grads);
                        ok += 1;
                    }
                    None => train.diverged(),
                }
            }
            if ok == 0 {
                continue;
            }
            grads.scale(1.0 / ok as f64);
            if !grads.all_finite() {
                nonfinite = true;
                continue;
            }
            optimizer.step(&mut model, &grads)?;
            updates += 1;
        }

        let mut val = Tally::default();
        for &i in &val_idx {
            let ex = &data.examples[i];
            match evaluate(&model, &ex.tokens, ex.label, &mut Mode::Eval)? {
                Some((loss, correct, ..)) => val.record(loss, correct),
                None => val.diverged(),
            }
        }

        nonfinite |= train.diverged > 0 || val.diverged > 0;
        records.push(EpochRecord {
            epoch,
            train_loss: train.loss(),
            train_acc: train.accuracy(),
            val_loss: val.loss(),
            val_acc: val.accuracy(),
            collapsed: false,
            nonfinite,
        });
        if updates == 0 {
            aborted = true;
            break;
        }
    }

    if let Some(start) = detect_collapse_in(&records, data.class_count) {
        records[start..].iter_mut().for_each(|r| r.collapsed = true);
    }
    Ok(FitOutcome {
        model,
        records,
        aborted,
    })
}

type Evaluated = (f64, bool, Matrix, crate::layers::ModelCache);

/// Forward pass and loss for one example. `None` means the example diverged.
fn evaluate(
    model: &Model,
    tokens: &[usize],
    label: usize,
    mode: &mut Mode<'_>,
) -> Result<Option<Evaluated>> {
    let (probs, cache) = match model.forward(tokens, mode) {
        Ok(out) => out,
        Err(Error::Divergence(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !probs.is_finite() {
        return Ok(None);
    }
    let loss = cross_entropy(&probs, label)?;
    if !loss.is_finite() {
        return Ok(None);
    }
    let correct = argmax(&probs) == label;
    Ok(Some((loss, correct, probs, cache)))
}

#[derive(Default)]
struct Tally {
    loss_sum: f64,
    correct: usize,
    finite: usize,
    diverged: usize,
}

impl Tally {
    fn record(&mut self, loss: f64, correct: bool) {
        self.loss_sum += loss;
        self.correct += usize::from(correct);
        self.finite += 1;
    }

    fn diverged(&mut self) {
        self.diverged += 1;
    }

    fn total(&self) -> usize {
        self.finite + self.diverged
    }

    fn loss(&self) -> f64 {
        if self.diverged > 0 || self.finite == 0 {
            f64::NAN
        } else {
            self.loss_sum / self.finite as f64
        }
    }

    fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.correct as f64 / self.total() as f64
        }
    }
}
