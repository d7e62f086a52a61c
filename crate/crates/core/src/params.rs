//! Uniform access to the trainable tensors of any layer or model.
//!
//! Gradients are stored in the same container type as the parameters, so the
//! presence of every tensor (and its order) is identical on both sides.

use crate::linalg::Matrix;

pub trait ParamSet {
    /// Every trainable tensor with a stable name, in a fixed order.
    fn named_tensors(&self) -> Vec<(String, &Matrix)>;

    /// The same tensors as [`ParamSet::named_tensors`], in the same order.
    fn tensors_mut(&mut self) -> Vec<&mut Matrix>;

    fn tensors(&self) -> Vec<&Matrix> {
        self.named_tensors().into_iter().map(|(_, m)| m).collect()
    }

    fn tensor_names(&self) -> Vec<String> {
        self.named_tensors().into_iter().map(|(n, _)| n).collect()
    }

    fn scalar_count(&self) -> usize {
        self.tensors().iter().map(|m| m.len()).sum()
    }

    fn zero(&mut self) {
        self.tensors_mut().into_iter().for_each(|m| m.fill(0.0));
    }

    fn scale(&mut self, factor: f64) {
        self.tensors_mut().into_iter().for_each(|m| m.scale(factor));
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|m| m.is_finite())
    }
}

/// Prefixes child tensor names, for composing nested parameter sets.
pub(crate) fn prefixed<'a>(
    prefix: &str,
    inner: Vec<(String, &'a Matrix)>,
) -> impl Iterator<Item = (String, &'a Matrix)> + use<'a> {
    let prefix = prefix.to_string();
    inner
        .into_iter()
        .map(move |(name, m)| (format!("{prefix}.{name}"), m))
}
