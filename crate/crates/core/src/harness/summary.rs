use std::fmt::Write as _;

use crate::activations::ActivationKind;
use crate::cells::Variant;
use crate::error::{Error, Result};

/// One `(activation, learning_rate)` row with a value per variant column.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub activation: ActivationKind,
    pub learning_rate: f64,
    pub values: Vec<f64>,
}

/// Results grid: rows keyed by `(activation, learning_rate)`, one column per
/// variant. Serialized as comma-separated text with the header
/// `activation,learning_rate,<variant>...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub variants: Vec<Variant>,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(
        &self,
        activation: ActivationKind,
        learning_rate: f64,
        variant: Variant,
    ) -> Option<f64> {
        let col = self.variants.iter().position(|&v| v == variant)?;
        self.rows
            .iter()
            .find(|r| r.activation == activation && r.learning_rate == learning_rate)
            .map(|r| r.values[col])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("activation,learning_rate");
        for v in &self.variants {
            out.push(',');
            out.push_str(v.name());
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{:e}", row.activation, row.learning_rate);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::data("summary table is empty"))?;
        let mut cols = header.split(',');
        if cols.next() != Some("activation") || cols.next() != Some("learning_rate") {
            return Err(Error::data(
                "summary header must start with `activation,learning_rate`",
            ));
        }
        let variants = cols
            .map(|c| {
                c.trim()
                    .parse::<Variant>()
                    .map_err(|e| Error::data(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for (i, line) in lines {
            let bad = |what: &str| Error::data(format!("summary line {}: {what}", i + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != variants.len() + 2 {
                return Err(bad(&format!(
                    "expected {} fields, found {}",
                    variants.len() + 2,
                    fields.len()
                )));
            }
            let activation = fields[0].parse().map_err(|_| bad("unknown activation"))?;
            let learning_rate = fields[1]
                .parse()
                .map_err(|_| bad("learning rate is not a number"))?;
            let values = fields[2..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| bad("value is not a number")))
                .collect::<Result<Vec<_>>>()?;
            rows.push(SummaryRow {
                activation,
                learning_rate,
                values,
            });
        }
        Ok(Self { variants, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SummaryTable {
        SummaryTable {
            variants: vec![Variant::Standard, Variant::Slim3],
            rows: vec![
                SummaryRow {
                    activation: ActivationKind::Tanh,
                    learning_rate: 2e-3,
                    values: vec![0.75, 0.5],
                },
                SummaryRow {
                    activation: ActivationKind::Relu,
                    learning_rate: 5e-4,
                    values: vec![f64::NAN, 1.0 / 3.0],
                },
            ],
        }
    }

    #[test]
    fn layout() {
        let csv = table().to_csv();
        assert_eq!(
            csv,
            "activation,learning_rate,lstm,lstm3\ntanh,2e-3,0.75,0.5\nrelu,5e-4,NaN,0.3333333333333333\n"
        );
    }

    #[test]
    fn round_trip_is_exact() {
        let back = SummaryTable::from_csv(&table().to_csv()).unwrap();
        assert_eq!(back.variants, table().variants);
        assert_eq!(back.rows[0], table().rows[0]);
        assert!(back.rows[1].values[0].is_nan());
        assert_eq!(
            back.get(ActivationKind::Relu, 5e-4, Variant::Slim3),
            Some(1.0 / 3.0)
        );
    }

    #[test]
    fn malformed_tables_are_data_errors() {
        assert!(matches!(
            SummaryTable::from_csv("").unwrap_err(),
            Error::Data(_)
        ));
        assert!(SummaryTable::from_csv("act,lr,lstm\n").is_err());
        assert!(SummaryTable::from_csv("activation,learning_rate,lstm\ntanh,2e-3\n").is_err());
        assert!(SummaryTable::from_csv("activation,learning_rate,lstm9\n").is_err());
    }
}
