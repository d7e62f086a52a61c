use std::fmt;

use crate::cells::{param_count, step_cost, Variant};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionRow {
    pub variant: Variant,
    pub params: usize,
    /// `params / params(Standard)`.
    pub param_ratio: f64,
    /// Multiply-accumulates per step (gate and input-block matrix products).
    pub macs: u64,
    pub flops: u64,
    pub flop_ratio: f64,
}

/// Parameter and per-step operation counts of every variant at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub rows: Vec<ReductionRow>,
}

pub fn report_reduction(input_dim: usize, hidden_dim: usize) -> Result<ReductionReport> {
    if input_dim == 0 || hidden_dim == 0 {
        return Err(Error::config(
            "input and hidden dimensions must be at least 1",
        ));
    }
    let base_params = param_count(Variant::Standard, input_dim, hidden_dim) as f64;
    let base_flops = step_cost(Variant::Standard, input_dim, hidden_dim).total() as f64;
    let rows = Variant::ALL
        .into_iter()
        .map(|variant| {
            let params = param_count(variant, input_dim, hidden_dim);
            let cost = step_cost(variant, input_dim, hidden_dim);
            ReductionRow {
                variant,
                params,
                param_ratio: params as f64 / base_params,
                macs: cost.gate_macs + cost.block_macs,
                flops: cost.total(),
                flop_ratio: cost.total() as f64 / base_flops,
            }
        })
        .collect();
    Ok(ReductionReport {
        input_dim,
        hidden_dim,
        rows,
    })
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "input m = {}, hidden n = {}",
            self.input_dim, self.hidden_dim
        )?;
        writeln!(
            f,
            "{:<8} {:>10} {:>8} {:>12} {:>12} {:>8}",
            "variant", "params", "ratio", "macs/step", "flops/step", "ratio"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<8} {:>10} {:>8.3} {:>12} {:>12} {:>8.3}",
                r.variant.name(),
                r.params,
                r.param_ratio,
                r.macs,
                r.flops,
                r.flop_ratio
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cell_counts_and_ratios() {
        let r = report_reduction(3, 4).unwrap();
        let params: Vec<_> = r.rows.iter().map(|r| r.params).collect();
        assert_eq!(params, [128, 92, 80, 44]);
        let ratios: Vec<_> = r
            .rows
            .iter()
            .map(|r| (r.param_ratio * 1000.0).round() / 1000.0)
            .collect();
        assert_eq!(ratios, [1.0, 0.719, 0.625, 0.344]);
        assert!(r.to_string().contains("lstm3"));
    }

    #[test]
    fn slim3_ratio_tends_to_a_quarter() {
        let r = report_reduction(3, 4000).unwrap();
        assert!((r.rows[3].param_ratio - 0.25).abs() < 1e-3);
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(report_reduction(0, 4).is_err());
    }
}
