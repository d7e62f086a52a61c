use crate::error::{Error, Result};
use crate::layers::{Mode, Model};
use crate::linalg::Matrix;

/// Added to the target probability before the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Categorical cross-entropy `-ln(p[label] + 1e-12)`, clamped at zero.
pub fn cross_entropy(probs: &Matrix, label: usize) -> Result<f64> {
    if probs.cols() != 1 {
        return Err(Error::config(
            "cross-entropy expects a column vector of probabilities",
        ));
    }
    if label >= probs.rows() {
        return Err(Error::data(format!(
            "label {label} out of range for {} classes",
            probs.rows()
        )));
    }
    let total = probs.sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::data(format!("probabilities sum to {total}, not 1")));
    }
    let p = probs.as_slice()[label];
    Ok(-(p + PROB_FLOOR).min(1.0).ln())
}

/// Gradient of cross-entropy with respect to the softmax pre-activation:
/// `probs - onehot(label)`.
pub fn cross_entropy_logit_grad(probs: &Matrix, label: usize) -> Matrix {
    let mut g = probs.clone();
    g.as_mut_slice()[label] -= 1.0;
    g
}

/// Index of the largest probability; ties pick the first.
pub fn argmax(v: &Matrix) -> usize {
    let mut best = 0;
    for (i, &x) in v.as_slice().iter().enumerate() {
        if x > v.as_slice()[best] {
            best = i;
        }
    }
    best
}

/// Forward, loss, and backward for one example, accumulating parameter
/// gradients into `grads`. Returns the loss and the class probabilities.
pub fn loss_and_grad(
    model: &Model,
    tokens: &[usize],
    label: usize,
    mode: &mut Mode<'_>,
    grads: &mut Model,
) -> Result<(f64, Matrix)> {
    let (probs, cache) = model.forward(tokens, mode)?;
    let loss = cross_entropy(&probs, label)?;
    let d_logits = cross_entropy_logit_grad(&probs, label);
    model.backward_into(&cache, &d_logits, grads);
    Ok((loss, probs))
}
