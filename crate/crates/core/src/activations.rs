//! The five activation functions swept by the harness.
//!
//! Softmax is normalized across the whole vector it is applied to. When it is
//! used as a gate or cell activation that means across the hidden dimension.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Tanh,
    Sigmoid,
    Linear,
    Relu,
    Softmax,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 5] = [
        ActivationKind::Tanh,
        ActivationKind::Linear,
        ActivationKind::Sigmoid,
        ActivationKind::Softmax,
        ActivationKind::Relu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Linear => "linear",
            ActivationKind::Relu => "relu",
            ActivationKind::Softmax => "softmax",
        }
    }

    /// Applies the activation to a slice in place.
    pub fn apply_in_place(self, v: &mut [f64]) {
        match self {
            ActivationKind::Tanh => v.iter_mut().for_each(|x| *x = x.tanh()),
            ActivationKind::Sigmoid => v.iter_mut().for_each(|x| *x = sigmoid(*x)),
            ActivationKind::Linear => {}
            ActivationKind::Relu => v.iter_mut().for_each(|x| *x = x.max(0.0)),
            ActivationKind::Softmax => softmax_in_place(v),
        }
    }

    /// `J^T * upstream` given the activation's *output* `y`.
    ///
    /// ReLU reads the sign of the pre-activation off `y` (`y > 0` iff `z > 0`),
    /// so the derivative at exactly zero is zero.
    pub fn backprop_slice(self, y: &[f64], upstream: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), upstream.len());
        debug_assert_eq!(y.len(), out.len());
        match self {
            ActivationKind::Tanh => {
                for ((o, &y), &u) in out.iter_mut().zip(y).zip(upstream) {
                    *o = u * (1.0 - y * y);
                }
            }
            ActivationKind::Sigmoid => {
                for ((o, &y), &u) in out.iter_mut().zip(y).zip(upstream) {
                    *o = u * y * (1.0 - y);
                }
            }
            ActivationKind::Linear => out.copy_from_slice(upstream),
            ActivationKind::Relu => {
                for ((o, &y), &u) in out.iter_mut().zip(y).zip(upstream) {
                    *o = if y > 0.0 { u } else { 0.0 };
                }
            }
            ActivationKind::Softmax => {
                let dot: f64 = y.iter().zip(upstream).map(|(a, b)| a * b).sum();
                for ((o, &y), &u) in out.iter_mut().zip(y).zip(upstream) {
                    *o = y * u - y * dot;
                }
            }
        }
    }

    pub fn apply(self, v: &Matrix) -> Matrix {
        let mut out = v.clone();
        self.apply_in_place(out.as_mut_slice());
        out
    }

    pub fn backprop(self, y: &Matrix, upstream: &Matrix) -> Matrix {
        let mut out = y.zeros_like();
        self.backprop_slice(y.as_slice(), upstream.as_slice(), out.as_mut_slice());
        out
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh" => Ok(ActivationKind::Tanh),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "linear" => Ok(ActivationKind::Linear),
            "relu" => Ok(ActivationKind::Relu),
            "softmax" => Ok(ActivationKind::Softmax),
            other => Err(Error::config(format!(
                "unknown activation `{other}` (expected tanh, linear, sigmoid, relu or softmax)"
            ))),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Max-shifted softmax over the whole slice.
pub fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    v.iter_mut().for_each(|x| *x /= total);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rng;
    use proptest::prelude::*;

    fn col(v: &[f64]) -> Matrix {
        Matrix::column(v.to_vec())
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            ActivationKind::Sigmoid.apply(&col(&[0.0, 0.0])).as_slice(),
            &[0.5, 0.5]
        );
        assert_eq!(
            ActivationKind::Softmax.apply(&col(&[0.0, 0.0])).as_slice(),
            &[0.5, 0.5]
        );
        assert_eq!(
            ActivationKind::Relu.apply(&col(&[-1.0, 2.0])).as_slice(),
            &[0.0, 2.0]
        );
    }

    #[test]
    fn backprop_examples() {
        let u = col(&[0.3, -2.0]);
        assert_eq!(
            ActivationKind::Linear
                .backprop(&col(&[9.0, -4.0]), &u)
                .as_slice(),
            u.as_slice()
        );
        assert_eq!(
            ActivationKind::Sigmoid
                .backprop(&col(&[0.5]), &col(&[1.0]))
                .as_slice(),
            &[0.25]
        );
        let s = ActivationKind::Softmax.backprop(&col(&[0.5, 0.5]), &col(&[1.0, 0.0]));
        assert_eq!(s.as_slice(), &[0.25, -0.25]);
        // Finite-difference view of the same softmax example.
        let h = 1e-6;
        let plus = ActivationKind::Softmax.apply(&col(&[h, 0.0]));
        let minus = ActivationKind::Softmax.apply(&col(&[-h, 0.0]));
        let fd0 = (plus.as_slice()[0] - minus.as_slice()[0]) / (2.0 * h);
        let fd1 = (plus.as_slice()[1] - minus.as_slice()[1]) / (2.0 * h);
        // J^T u with u = e0 is the first row of J, i.e. d y0 / d v_j; by symmetry
        // d y0/d v0 = fd0 and d y0/d v1 = d y1/d v0 = fd1.
        assert!((fd0 - 0.25).abs() < 1e-9);
        assert!((fd1 + 0.25).abs() < 1e-9);
    }

    #[test]
    fn relu_derivative_at_zero_is_zero() {
        let y = ActivationKind::Relu.apply(&col(&[0.0]));
        assert_eq!(
            ActivationKind::Relu.backprop(&y, &col(&[1.0])).as_slice(),
            &[0.0]
        );
    }

    #[test]
    fn parse_spellings() {
        for kind in ActivationKind::ALL {
            assert_eq!(kind.name().parse::<ActivationKind>().unwrap(), kind);
        }
        assert!("Tanh".parse::<ActivationKind>().is_err());
        assert!("gelu".parse::<ActivationKind>().is_err());
    }

    #[test]
    fn sigmoid_is_stable_for_large_inputs() {
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert!(ActivationKind::Softmax
            .apply(&col(&[1000.0, 0.0]))
            .is_finite());
    }

    fn fd_relative_error(kind: ActivationKind, v: &[f64], u: &[f64]) -> f64 {
        let y = kind.apply(&col(v));
        let analytic = kind.backprop(&y, &col(u));
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for j in 0..v.len() {
            let mut plus = v.to_vec();
            let mut minus = v.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let fp: f64 = kind
                .apply(&col(&plus))
                .as_slice()
                .iter()
                .zip(u)
                .map(|(a, b)| a * b)
                .sum();
            let fm: f64 = kind
                .apply(&col(&minus))
                .as_slice()
                .iter()
                .zip(u)
                .map(|(a, b)| a * b)
                .sum();
            let numeric = (fp - fm) / (2.0 * h);
            let a = analytic.as_slice()[j];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(err);
        }
        worst
    }

    #[test]
    fn backprop_matches_finite_differences_for_all_kinds() {
        let mut rng = Rng::new(2024);
        for kind in ActivationKind::ALL {
            for n in 1..=8 {
                let v: Vec<f64> = (0..n)
                    .map(|_| {
                        // keep ReLU inputs away from the kink
                        let x = rng.next_uniform() * 4.0 - 2.0;
                        if x.abs() < 0.01 {
                            0.5
                        } else {
                            x
                        }
                    })
                    .collect();
                let u: Vec<f64> = (0..n).map(|_| rng.next_uniform() * 2.0 - 1.0).collect();
                let err = fd_relative_error(kind, &v, &u);
                assert!(err < 1e-6, "{kind} n={n} rel err {err}");
            }
        }
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one_and_is_shift_invariant(v in proptest::collection::vec(-20.0f64..20.0, 1..=8), shift in -50.0f64..50.0) {
            let y = ActivationKind::Softmax.apply(&col(&v));
            prop_assert!((y.sum() - 1.0).abs() < 1e-12);
            let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
            let ys = ActivationKind::Softmax.apply(&col(&shifted));
            for (a, b) in y.as_slice().iter().zip(ys.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn bounded_ranges(v in proptest::collection::vec(-15.0f64..15.0, 1..=8)) {
            let s = ActivationKind::Sigmoid.apply(&col(&v));
            prop_assert!(s.as_slice().iter().all(|&x| x > 0.0 && x < 1.0));
            let t = ActivationKind::Tanh.apply(&col(&v));
            prop_assert!(t.as_slice().iter().all(|&x| x > -1.0 && x < 1.0));
        }
    }
}
