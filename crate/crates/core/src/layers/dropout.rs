use serde::{Deserialize, Serialize};

use super::Mode;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

/// Inverted-dropout mask: each entry is `0` with probability `rate`, otherwise
/// `1 / (1 - rate)`.
pub fn sample_mask(len: usize, rate: f64, rng: &mut Rng) -> Matrix {
    let keep = 1.0 / (1.0 - rate);
    Matrix::column(
        (0..len)
            .map(|_| if rng.next_uniform() < rate { 0.0 } else { keep })
            .collect(),
    )
}

pub(crate) fn check_rate(name: &str, rate: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::config(format!(
            "{name} must be in [0, 1), got {rate}"
        )));
    }
    Ok(())
}

/// Dropout rates of the bidirectional layer: `input_rate` on `x_t`,
/// `recurrent_rate` on `h_{t-1}`. Each mask is drawn once per sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropoutSpec {
    pub input_rate: f64,
    pub recurrent_rate: f64,
}

impl DropoutSpec {
    pub const NONE: DropoutSpec = DropoutSpec {
        input_rate: 0.0,
        recurrent_rate: 0.0,
    };

    pub fn new(input_rate: f64, recurrent_rate: f64) -> Result<Self> {
        check_rate("input dropout rate", input_rate)?;
        check_rate("recurrent dropout rate", recurrent_rate)?;
        Ok(Self {
            input_rate,
            recurrent_rate,
        })
    }
}

/// Per-element, per-time-step dropout used after each conv block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceDropout {
    pub rate: f64,
}

impl SequenceDropout {
    /// Returns the masked sequence and the masks (absent in eval mode or at rate 0).
    pub fn forward(
        &self,
        seq: Vec<Matrix>,
        mode: &mut Mode<'_>,
    ) -> (Vec<Matrix>, Option<Vec<Matrix>>) {
        let rng = match mode.rng() {
            Some(rng) if self.rate > 0.0 => rng,
            _ => return (seq, None),
        };
        let masks: Vec<Matrix> = seq
            .iter()
            .map(|x| sample_mask(x.rows(), self.rate, rng))
            .collect();
        let out = seq
            .into_iter()
            .zip(&masks)
            .map(|(x, m)| hadamard(&x, m))
            .collect();
        (out, Some(masks))
    }

    pub fn backward(masks: Option<&[Matrix]>, d_out: Vec<Matrix>) -> Vec<Matrix> {
        match masks {
            None => d_out,
            Some(masks) => d_out
                .iter()
                .zip(masks)
                .map(|(d, m)| hadamard(d, m))
                .collect(),
        }
    }
}

pub(crate) fn hadamard(a: &Matrix, b: &Matrix) -> Matrix {
    debug_assert_eq!(a.shape(), b.shape());
    Matrix::from_vec(
        a.rows(),
        a.cols(),
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x * y)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverted_scaling_has_unit_mean() {
        let mut rng = Rng::new(30);
        let rate = 0.3;
        let draws = 10_000;
        let width = 4;
        let mut sums = vec![0.0; width];
        for _ in 0..draws {
            let m = sample_mask(width, rate, &mut rng);
            for (s, v) in sums.iter_mut().zip(m.as_slice()) {
                *s += v;
            }
        }
        for s in sums {
            let mean = s / draws as f64;
            assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
        }
    }

    #[test]
    fn rates_must_be_below_one() {
        assert!(DropoutSpec::new(0.2, 0.3).is_ok());
        assert!(DropoutSpec::new(1.0, 0.0).is_err());
        assert!(DropoutSpec::new(0.0, -0.1).is_err());
    }

    #[test]
    fn eval_mode_is_identity() {
        let seq = vec![Matrix::column(vec![1.0, 2.0])];
        let (out, masks) = SequenceDropout { rate: 0.5 }.forward(seq.clone(), &mut Mode::Eval);
        assert_eq!(out, seq);
        assert!(masks.is_none());
    }
}
