use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curves::curve_csv;
use super::io::{ensure_writable, write_atomic};
use super::sweep::with_pool;
use crate::activations::ActivationKind;
use crate::cells::Variant;
use crate::data::LoadedTask;
use crate::error::{Error, Result};
use crate::train::{fit_model, EpochRecord, ExperimentConfig};

/// Seeds of the reference variance study.
pub const STUDY_SEEDS: [u64; 8] = [0, 100, 500, 1000, 5000, 9001, 10000, 100000];

pub const SEED_VARIANCE_FILE: &str = "seed_variance.csv";

/// Which configuration the seed study repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedVarianceSpec {
    pub variant: Variant,
    pub activation: ActivationKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seeds: Vec<u64>,
}

impl Default for SeedVarianceSpec {
    fn default() -> Self {
        Self {
            variant: Variant::Slim3,
            activation: ActivationKind::Tanh,
            learning_rate: 2e-3,
            epochs: 20,
            seeds: STUDY_SEEDS.to_vec(),
        }
    }
}

/// Order statistics of a sample. `std` is the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Spread {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Spread {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
        }
    }

    /// `max - min`.
    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone)]
pub struct SeedVarianceReport {
    pub seeds: Vec<u64>,
    /// One record sequence per seed, in `seeds` order.
    pub curves: Vec<Vec<EpochRecord>>,
    /// Validation-accuracy spread at each epoch over the runs that reached it.
    pub per_epoch: Vec<Spread>,
    /// Spread of each run's last validation accuracy.
    pub final_spread: Spread,
}

impl SeedVarianceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,runs,min,max,mean,std\n");
        for (e, s) in self.per_epoch.iter().enumerate() {
            let runs = self.curves.iter().filter(|c| c.len() > e).count();
            let _ = writeln!(
                out,
                "{},{runs},{},{},{},{}",
                e + 1,
                s.min,
                s.max,
                s.mean,
                s.std
            );
        }
        out
    }

    /// Writes the spread table and one curve file per seed into `out`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        ensure_writable(out)?;
        let table = out.join(SEED_VARIANCE_FILE);
        write_atomic(&table, &self.to_csv())?;
        let mut files = vec![table];
        for (seed, curve) in self.seeds.iter().zip(&self.curves) {
            let path = out.join(format!("curve_seed{seed}.csv"));
            write_atomic(&path, &curve_csv(curve))?;
            files.push(path);
        }
        Ok(files)
    }
}

impl fmt::Display for SeedVarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6} {:>10}", "seed", "final_acc")?;
        for (seed, curve) in self.seeds.iter().zip(&self.curves) {
            let last = curve.last().map_or(f64::NAN, |r| r.val_acc);
            writeln!(f, "{seed:>6} {last:>10.4}")?;
        }
        let s = &self.final_spread;
        write!(
            f,
            "final spread over {} seeds: min {:.4} max {:.4} mean {:.4} std {:.4} range {:.4}",
            self.seeds.len(),
            s.min,
            s.max,
            s.mean,
            s.std,
            s.range()
        )
    }
}

/// Trains `base` once per seed (overriding `base.seed`) on `task`.
pub fn seed_variance(
    base: &ExperimentConfig,
    task: &LoadedTask,
    seeds: &[u64],
    jobs: usize,
) -> Result<SeedVarianceReport> {
    if seeds.len() < 2 {
        return Err(Error::config(
            "a seed-variance study needs at least 2 seeds",
        ));
    }
    if base.epochs == 0 {
        return Err(Error::config(
            "a seed-variance study needs at least one epoch",
        ));
    }
    let curves = with_pool(jobs, || {
        seeds
            .par_iter()
            .map(|&seed| {
                let config = ExperimentConfig {
                    seed,
                    ..base.clone()
                };
                Ok(fit_model(&config, &task.dataset, task.embeddings.as_ref())?.records)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let longest = curves.iter().map(Vec::len).max().unwrap_or(0);
    let per_epoch = (0..longest)
        .map(|e| {
            let accs: Vec<f64> = curves
                .iter()
                .filter_map(|c| c.get(e))
                .map(|r| r.val_acc)
                .collect();
            Spread::of(&accs)
        })
        .collect();
    let finals: Vec<f64> = curves
        .iter()
        .map(|c| c.last().map_or(f64::NAN, |r| r.val_acc))
        .collect();
    Ok(SeedVarianceReport {
        seeds: seeds.to_vec(),
        curves,
        per_epoch,
        final_spread: Spread::of(&finals),
    })
}
