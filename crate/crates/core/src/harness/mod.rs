//! Experiment harness: versioned TOML configs, the sweep grid with its
//! summary tables and curve files, seed-variance studies, parameter and
//! operation reports, timing, gradient-check suites, and comparison against
//! the reference grid.
//!
//! Config schema (version 1). Every section is optional and unknown keys are
//! rejected:
//!
//! ```toml
//! version = 1
//!
//! [sweep]            # SweepGrid
//! variants = ["lstm", "lstm1", "lstm2", "lstm3"]
//! activations = ["tanh", "linear", "sigmoid", "softmax", "relu"]
//! learning_rates = [2e-3, 1e-3, 5e-4]
//! epochs = 20
//! seeds = [0]
//!
//! [seed_variance]    # SeedVarianceSpec
//! variant = "lstm3"
//! activation = "tanh"
//! learning_rate = 2e-3
//! epochs = 20
//! seeds = [0, 100, 500, 1000, 5000, 9001, 10000, 100000]
//!
//! [task]             # TaskSpec: source = "synthetic" | "corpus" | "cache"
//! source = "synthetic"
//! kind = "majority-token"
//! alphabet = 4
//! length = 20
//! examples = 2000
//! classes = 4
//! seed = 0
//!
//! [training]         # TrainingConfig
//! optimizer = "adam"
//! batch_size = 16
//! val_fraction = 0.2
//!
//! [architecture]     # ArchitectureSpec; missing keys take desk-scale defaults
//! conv = [{ filters = 8, kernel = 3, pool = 2, dropout = 0.0 }]
//! input_dropout = 0.0
//! recurrent_dropout = 0.0
//! ```
//!
//! Without an `[architecture]` section the compact one-block architecture is
//! used, which fits short synthetic sequences.

mod bench;
mod checks;
mod compare;
mod curves;
mod io;
mod reduction;
mod reference;
mod summary;
mod sweep;
mod variance;

pub use bench::{bench_step, BenchReport, BenchRow};
pub use checks::{
    desk_model_case, run_grad_check_suite, GradCheckSuite, CELL_EPS, CELL_TOLERANCE, MODEL_EPS,
    MODEL_TOLERANCE,
};
pub use compare::{compare_reference, Comparison, Finding, Grid, OrdinalClaim};
pub use curves::{curve_csv, CURVE_HEADER};
pub use reduction::{report_reduction, ReductionReport, ReductionRow};
pub use reference::{ReferenceTable, REFERENCE_LEARNING_RATES};
pub use summary::{SummaryRow, SummaryTable};
pub use sweep::{
    curve_file_name, run_sweep, run_sweep_on, RunResult, SweepGrid, SweepOutcome, SweepSpec,
    ACCURACY_SUMMARY_FILE, LOSS_SUMMARY_FILE,
};
pub use variance::{
    seed_variance, SeedVarianceReport, SeedVarianceSpec, Spread, SEED_VARIANCE_FILE, STUDY_SEEDS,
};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::TaskSpec;
use crate::error::{Error, Result};
use crate::layers::ArchitectureSpec;
use crate::train::{ExperimentConfig, TrainingConfig};

pub const CONFIG_VERSION: u32 = 1;

fn default_architecture() -> ArchitectureSpec {
    ArchitectureSpec::compact()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub version: u32,
    #[serde(default)]
    pub sweep: SweepGrid,
    #[serde(default)]
    pub seed_variance: SeedVarianceSpec,
    #[serde(default)]
    pub task: TaskSpec,
    #[serde(default = "default_architecture")]
    pub architecture: ArchitectureSpec,
    #[serde(default)]
    pub training: TrainingConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            sweep: SweepGrid::default(),
            seed_variance: SeedVarianceSpec::default(),
            task: TaskSpec::default(),
            architecture: default_architecture(),
            training: TrainingConfig::default(),
        }
    }
}

impl HarnessConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        if config.version != CONFIG_VERSION {
            return Err(Error::config(format!(
                "unsupported config version {}, expected {CONFIG_VERSION}",
                config.version
            )));
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            grid: self.sweep.clone(),
            task: self.task.clone(),
            architecture: self.architecture.clone(),
            training: self.training.clone(),
        }
    }

    /// Base run of the seed-variance study; the seed is replaced per run.
    pub fn seed_variance_config(&self) -> ExperimentConfig {
        let sv = &self.seed_variance;
        ExperimentConfig {
            variant: sv.variant,
            activation: sv.activation,
            learning_rate: sv.learning_rate,
            epochs: sv.epochs,
            seed: sv.seeds.first().copied().unwrap_or(0),
            task: self.task.clone(),
            architecture: self.architecture.clone(),
            training: self.training.clone(),
        }
    }
}
