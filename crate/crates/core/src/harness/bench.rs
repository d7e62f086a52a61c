use std::fmt;
use std::time::{Duration, Instant};

use crate::cells::{step_cost, CellConfig, Variant};
use crate::error::{Error, Result};
use crate::train::UnrolledCellProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: Variant,
    /// Deterministic multiply-accumulates per forward step.
    pub macs: u64,
    pub flops: u64,
    pub median: Duration,
    pub min: Duration,
    pub max: Duration,
}

/// Wall time of forward plus backward over a sequence. Timing is informative
/// only; the operation counts carry the ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub steps: usize,
    pub repeats: usize,
    /// Sorted by `macs`, ties in request order.
    pub rows: Vec<BenchRow>,
}

pub fn bench_step(
    variants: &[Variant],
    input_dim: usize,
    hidden_dim: usize,
    steps: usize,
    repeats: usize,
    seed: u64,
) -> Result<BenchReport> {
    if repeats < 5 {
        return Err(Error::config(format!(
            "bench needs at least 5 repeats, got {repeats}"
        )));
    }
    if input_dim == 0 || hidden_dim == 0 || steps == 0 {
        return Err(Error::config(
            "bench dimensions and step count must be at least 1",
        ));
    }
    let mut rows = Vec::with_capacity(variants.len());
    for &variant in variants {
        let problem = UnrolledCellProblem::random(
            variant,
            CellConfig::default(),
            input_dim,
            hidden_dim,
            steps,
            seed,
        );
        let mut times = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let start = Instant::now();
            std::hint::black_box(problem.gradient()?);
            times.push(start.elapsed());
        }
        times.sort();
        let cost = step_cost(variant, input_dim, hidden_dim);
        rows.push(BenchRow {
            variant,
            macs: cost.gate_macs + cost.block_macs,
            flops: cost.total(),
            median: times[repeats / 2],
            min: times[0],
            max: times[repeats - 1],
        });
    }
    rows.sort_by_key(|r| r.macs);
    Ok(BenchReport {
        input_dim,
        hidden_dim,
        steps,
        repeats,
        rows,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "m = {}, n = {}, {} steps, {} repeats (forward + backward)",
            self.input_dim, self.hidden_dim, self.steps, self.repeats
        )?;
        writeln!(
            f,
            "{:<8} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "variant", "macs/step", "flops/step", "median", "min", "max"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<8} {:>12} {:>12} {:>12.3?} {:>12.3?} {:>12.3?}",
                r.variant.name(),
                r.macs,
                r.flops,
                r.median,
                r.min,
                r.max
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_by_count_with_duplicates() {
        let report = bench_step(
            &[
                Variant::Standard,
                Variant::Slim3,
                Variant::Slim1,
                Variant::Slim1,
            ],
            4,
            8,
            3,
            5,
            0,
        )
        .unwrap();
        let order: Vec<_> = report.rows.iter().map(|r| r.variant).collect();
        assert_eq!(
            order,
            [
                Variant::Slim3,
                Variant::Slim1,
                Variant::Slim1,
                Variant::Standard
            ]
        );
        assert_eq!(report.rows[1].macs, report.rows[2].macs);
        assert!(report
            .rows
            .iter()
            .all(|r| r.min <= r.median && r.median <= r.max));
    }

    #[test]
    fn too_few_repeats() {
        assert!(matches!(
            bench_step(&[Variant::Slim1], 2, 2, 2, 4, 0).unwrap_err(),
            Error::Config(_)
        ));
    }
}
