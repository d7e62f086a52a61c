use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curves::curve_csv;
use super::io::{ensure_writable, write_atomic};
use super::summary::{SummaryRow, SummaryTable};
use crate::activations::ActivationKind;
use crate::cells::Variant;
use crate::data::{LoadedTask, TaskSpec};
use crate::error::{Error, Result};
use crate::layers::ArchitectureSpec;
use crate::train::{fit_model, EpochRecord, ExperimentConfig, TrainingConfig};

pub const ACCURACY_SUMMARY_FILE: &str = "summary_accuracy.csv";
pub const LOSS_SUMMARY_FILE: &str = "summary_loss.csv";

/// The swept axes. Their cross product defines the run set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub variants: Vec<Variant>,
    pub activations: Vec<ActivationKind>,
    pub learning_rates: Vec<f64>,
    pub epochs: usize,
    pub seeds: Vec<u64>,
}

impl Default for SweepGrid {
    /// The reference grid: 4 variants x 5 activations x 3 learning rates.
    fn default() -> Self {
        Self {
            variants: Variant::ALL.to_vec(),
            activations: ActivationKind::ALL.to_vec(),
            learning_rates: vec![2e-3, 1e-3, 5e-4],
            epochs: 20,
            seeds: vec![0],
        }
    }
}

/// A grid plus everything shared by its runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub grid: SweepGrid,
    pub task: TaskSpec,
    pub architecture: ArchitectureSpec,
    pub training: TrainingConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let empty = [
            ("variants", g.variants.is_empty()),
            ("activations", g.activations.is_empty()),
            ("learning_rates", g.learning_rates.is_empty()),
            ("seeds", g.seeds.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::config(format!("sweep list `{name}` is empty")));
        }
        if g.epochs == 0 {
            return Err(Error::config("sweep needs at least one epoch"));
        }
        Ok(())
    }

    /// Run configs ordered by activation, learning rate, variant, then seed.
    pub fn runs(&self) -> Vec<ExperimentConfig> {
        let g = &self.grid;
        let mut runs = Vec::new();
        for &activation in &g.activations {
            for &learning_rate in &g.learning_rates {
                for &variant in &g.variants {
                    for &seed in &g.seeds {
                        runs.push(ExperimentConfig {
                            variant,
                            activation,
                            learning_rate,
                            epochs: g.epochs,
                            seed,
                            task: self.task.clone(),
                            architecture: self.architecture.clone(),
                            training: self.training.clone(),
                        });
                    }
                }
            }
        }
        runs
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub records: Vec<EpochRecord>,
    pub aborted: bool,
    pub curve_file: PathBuf,
}

impl RunResult {
    pub fn final_record(&self) -> Option<&EpochRecord> {
        self.records.last()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub runs: Vec<RunResult>,
    /// Final-epoch validation accuracy, mean over seeds.
    pub accuracy: SummaryTable,
    /// Final-epoch validation loss, mean over seeds.
    pub loss: SummaryTable,
    /// Every file written, summaries first.
    pub files: Vec<PathBuf>,
}

pub fn curve_file_name(config: &ExperimentConfig) -> String {
    format!(
        "curve_{}_{}_lr{:e}_seed{}.csv",
        config.variant.name(),
        config.activation,
        config.learning_rate,
        config.seed
    )
}

/// Loads the task, trains every grid cell with up to `jobs` runs in flight, and
/// writes the two summary tables plus one curve file per run into `out`.
/// Output bytes depend only on `spec`.
pub fn run_sweep(spec: &SweepSpec, out: &Path, jobs: usize) -> Result<SweepOutcome> {
    spec.validate()?;
    ensure_writable(out)?;
    let task = spec.task.load()?;
    run_sweep_on(spec, &task, out, jobs)
}

/// [`run_sweep`] on an already materialized task.
pub fn run_sweep_on(
    spec: &SweepSpec,
    task: &LoadedTask,
    out: &Path,
    jobs: usize,
) -> Result<SweepOutcome> {
    spec.validate()?;
    ensure_writable(out)?;
    let configs = spec.runs();
    let runs = with_pool(jobs, || {
        configs
            .into_par_iter()
            .map(|config| {
                let fitted = fit_model(&config, &task.dataset, task.embeddings.as_ref())?;
                let curve_file = out.join(curve_file_name(&config));
                write_atomic(&curve_file, &curve_csv(&fitted.records))?;
                Ok(RunResult {
                    config,
                    records: fitted.records,
                    aborted: fitted.aborted,
                    curve_file,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let accuracy = summarize(spec, &runs, |r| r.val_acc);
    let loss = summarize(spec, &runs, |r| r.val_loss);
    let acc_path = out.join(ACCURACY_SUMMARY_FILE);
    let loss_path = out.join(LOSS_SUMMARY_FILE);
    write_atomic(&acc_path, &accuracy.to_csv())?;
    write_atomic(&loss_path, &loss.to_csv())?;

    let mut files = vec![acc_path, loss_path];
    files.extend(runs.iter().map(|r| r.curve_file.clone()));
    Ok(SweepOutcome {
        runs,
        accuracy,
        loss,
        files,
    })
}

pub(crate) fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Err(Error::config("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

fn summarize(
    spec: &SweepSpec,
    runs: &[RunResult],
    metric: impl Fn(&EpochRecord) -> f64,
) -> SummaryTable {
    let g = &spec.grid;
    let mut rows = Vec::new();
    for &activation in &g.activations {
        for &learning_rate in &g.learning_rates {
            let values = g
                .variants
                .iter()
                .map(|&variant| {
                    let finals: Vec<f64> = runs
                        .iter()
                        .filter(|r| {
                            r.config.activation == activation
                                && r.config.learning_rate == learning_rate
                                && r.config.variant == variant
                        })
                        .map(|r| r.final_record().map_or(f64::NAN, &metric))
                        .collect();
                    finals.iter().sum::<f64>() / finals.len() as f64
                })
                .collect();
            rows.push(SummaryRow {
                activation,
                learning_rate,
                values,
            });
        }
    }
    SummaryTable {
        variants: g.variants.clone(),
        rows,
    }
}
