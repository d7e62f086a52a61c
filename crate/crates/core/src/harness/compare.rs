use std::fmt;

use super::reference::ReferenceTable;
use super::summary::SummaryTable;
use crate::activations::ActivationKind;
use crate::cells::Variant;
use crate::error::{Error, Result};

/// A rank statement about grid means that can be evaluated on any full grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalClaim {
    /// Lowest mean accuracy over all activation rows.
    WorstActivation(ActivationKind),
    /// Highest mean accuracy over all activation rows.
    BestActivation(ActivationKind),
    WorstVariant(Variant),
    BestVariant(Variant),
}

impl OrdinalClaim {
    /// The reference findings, checked in this order.
    pub const REFERENCE: [OrdinalClaim; 4] = [
        OrdinalClaim::WorstActivation(ActivationKind::Softmax),
        OrdinalClaim::BestActivation(ActivationKind::Tanh),
        OrdinalClaim::WorstVariant(Variant::Slim2),
        OrdinalClaim::BestVariant(Variant::Standard),
    ];

    pub fn holds(self, grid: &Grid) -> bool {
        match self {
            OrdinalClaim::WorstActivation(a) => grid.extreme_activation(false) == a,
            OrdinalClaim::BestActivation(a) => grid.extreme_activation(true) == a,
            OrdinalClaim::WorstVariant(v) => grid.extreme_variant(false) == v,
            OrdinalClaim::BestVariant(v) => grid.extreme_variant(true) == v,
        }
    }
}

impl fmt::Display for OrdinalClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdinalClaim::WorstActivation(a) => {
                write!(f, "{a} has the lowest mean accuracy among activations")
            }
            OrdinalClaim::BestActivation(a) => {
                write!(f, "{a} has the highest mean accuracy among activations")
            }
            OrdinalClaim::WorstVariant(v) => write!(
                f,
                "{} has the lowest mean accuracy among variants",
                v.name()
            ),
            OrdinalClaim::BestVariant(v) => write!(
                f,
                "{} has the highest mean accuracy among variants",
                v.name()
            ),
        }
    }
}

/// Full 15 x 4 accuracy grid in reference row and column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    values: Vec<[f64; 4]>,
}

impl Grid {
    pub fn reference() -> Self {
        Self {
            values: ReferenceTable::accuracy_fractions(),
        }
    }

    /// Reorders a sweep summary into reference layout. Any missing or extra
    /// row or column is a configuration error.
    pub fn from_summary(table: &SummaryTable) -> Result<Self> {
        let all_present = Variant::ALL.iter().all(|v| table.variants.contains(v));
        if !all_present || table.variants.len() != 4 {
            return Err(Error::config(format!(
                "comparison needs exactly the 4 variant columns, summary has {}",
                table.variants.len()
            )));
        }
        let expected = ReferenceTable::rows().count();
        if table.rows.len() != expected {
            return Err(Error::config(format!(
                "comparison needs the full {expected}-row grid, summary has {} rows",
                table.rows.len()
            )));
        }
        let values = ReferenceTable::rows()
            .map(|(a, lr)| {
                let mut row = [0.0; 4];
                for (slot, v) in row.iter_mut().zip(Variant::ALL) {
                    *slot = table.get(a, lr, v).ok_or_else(|| {
                        Error::config(format!(
                            "summary has no row for activation {a}, learning rate {lr:e}"
                        ))
                    })?;
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn activation_means(&self) -> Vec<(ActivationKind, f64)> {
        let per = self.values.len() / ActivationKind::ALL.len();
        ActivationKind::ALL
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let rows = &self.values[i * per..(i + 1) * per];
                (
                    a,
                    rows.iter().flatten().sum::<f64>() / (rows.len() * 4) as f64,
                )
            })
            .collect()
    }

    pub fn variant_means(&self) -> Vec<(Variant, f64)> {
        Variant::ALL
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                (
                    v,
                    self.values.iter().map(|r| r[j]).sum::<f64>() / self.values.len() as f64,
                )
            })
            .collect()
    }

    fn extreme_activation(&self, best: bool) -> ActivationKind {
        extreme(self.activation_means(), best)
    }

    fn extreme_variant(&self, best: bool) -> Variant {
        extreme(self.variant_means(), best)
    }
}

/// NaN means rank lowest.
fn extreme<K: Copy>(means: Vec<(K, f64)>, best: bool) -> K {
    let key = |m: f64| if m.is_nan() { f64::NEG_INFINITY } else { m };
    let pick = means.into_iter().reduce(|acc, x| {
        let better = if best {
            key(x.1) > key(acc.1)
        } else {
            key(x.1) < key(acc.1)
        };
        if better {
            x
        } else {
            acc
        }
    });
    pick.expect("grid has rows").0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub claim: OrdinalClaim,
    pub reference: bool,
    pub measured: bool,
}

impl Finding {
    pub fn agrees(&self) -> bool {
        self.reference == self.measured
    }
}

/// Measured grid beside the reference grid, with agreement on ordinal
/// findings only. Absolute values are shown for context, never judged.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub measured: Grid,
    pub reference: Grid,
    pub findings: Vec<Finding>,
}

pub fn compare_reference(accuracy: &SummaryTable) -> Result<Comparison> {
    let measured = Grid::from_summary(accuracy)?;
    let reference = Grid::reference();
    let findings = OrdinalClaim::REFERENCE
        .into_iter()
        .map(|claim| Finding {
            claim,
            reference: claim.holds(&reference),
            measured: claim.holds(&measured),
        })
        .collect();
    Ok(Comparison {
        measured,
        reference,
        findings,
    })
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<10} {:>9}", "activation", "lr")?;
        for v in Variant::ALL {
            write!(f, " {:>8} {:>8}", v.name(), "ref")?;
        }
        writeln!(f)?;
        for (i, (a, lr)) in ReferenceTable::rows().enumerate() {
            write!(f, "{:<10} {:>9}", a.name(), format!("{lr:e}"))?;
            for j in 0..4 {
                write!(
                    f,
                    " {:>7.2}% {:>7.2}%",
                    100.0 * self.measured.values[i][j],
                    100.0 * self.reference.values[i][j]
                )?;
            }
            writeln!(f)?;
        }
        writeln!(f)?;
        for finding in &self.findings {
            writeln!(
                f,
                "[{}] {} (reference: {}, measured: {})",
                if finding.agrees() { "agree" } else { "differ" },
                finding.claim,
                finding.reference,
                finding.measured
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::summary::SummaryRow;

    fn reference_summary() -> SummaryTable {
        SummaryTable {
            variants: Variant::ALL.to_vec(),
            rows: ReferenceTable::rows()
                .zip(ReferenceTable::accuracy_fractions())
                .map(|((activation, learning_rate), values)| SummaryRow {
                    activation,
                    learning_rate,
                    values: values.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn reference_confirms_every_reference_finding() {
        let grid = Grid::reference();
        for claim in OrdinalClaim::REFERENCE {
            assert!(claim.holds(&grid), "{claim}");
        }
    }

    #[test]
    fn reference_against_itself_agrees() {
        let c = compare_reference(&reference_summary()).unwrap();
        assert!(c.findings.iter().all(Finding::agrees));
        assert_eq!(c.measured, c.reference);
        assert!(c
            .to_string()
            .contains("[agree] softmax has the lowest mean accuracy"));
    }

    #[test]
    fn shuffled_rows_and_columns_are_realigned() {
        let mut t = reference_summary();
        t.rows.reverse();
        t.variants.reverse();
        for r in &mut t.rows {
            r.values.reverse();
        }
        assert_eq!(Grid::from_summary(&t).unwrap(), Grid::reference());
    }

    #[test]
    fn flipped_ranking_is_reported() {
        let mut t = reference_summary();
        for r in &mut t.rows {
            r.values[2] = 0.99;
        }
        let c = compare_reference(&t).unwrap();
        let worst_variant = &c.findings[2];
        assert!(!worst_variant.agrees());
    }

    #[test]
    fn grid_shape_mismatch_is_config_error() {
        let mut t = reference_summary();
        t.rows.pop();
        assert!(matches!(
            compare_reference(&t).unwrap_err(),
            Error::Config(_)
        ));
        let mut t = reference_summary();
        t.variants.pop();
        t.rows.iter_mut().for_each(|r| {
            r.values.pop();
        });
        assert!(compare_reference(&t).is_err());
        let mut t = reference_summary();
        t.rows[0].learning_rate = 3e-3;
        assert!(compare_reference(&t).is_err());
    }
}
