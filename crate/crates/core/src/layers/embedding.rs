use crate::error::{Error, Result};
use crate::linalg::{glorot_uniform, Matrix, Rng};
use crate::params::ParamSet;

/// Token-id lookup table; row `id` is the vector of token `id`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingLayer {
    pub table: Matrix,
    pub trainable: bool,
}

impl EmbeddingLayer {
    pub fn new(table: Matrix, trainable: bool) -> Self {
        Self { table, trainable }
    }

    pub fn glorot(vocab_size: usize, dim: usize, rng: &mut Rng) -> Self {
        Self::new(glorot_uniform(vocab_size, dim, rng), true)
    }

    pub fn vocab_size(&self) -> usize {
        self.table.rows()
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }

    pub fn forward(&self, tokens: &[usize]) -> Result<Vec<Matrix>> {
        tokens
            .iter()
            .enumerate()
            .map(|(pos, &id)| {
                if id >= self.vocab_size() {
                    return Err(Error::data(format!(
                        "token id {id} at position {pos} is outside the vocabulary of size {}",
                        self.vocab_size()
                    )));
                }
                Ok(Matrix::column(self.table.row(id).to_vec()))
            })
            .collect()
    }

    /// Scatters `d_seq` into the rows of `grads.table`; no-op when frozen.
    pub fn backward_into(&self, tokens: &[usize], d_seq: &[Matrix], grads: &mut EmbeddingLayer) {
        if !self.trainable {
            return;
        }
        for (&id, d) in tokens.iter().zip(d_seq) {
            for (g, v) in grads.table.row_mut(id).iter_mut().zip(d.as_slice()) {
                *g += v;
            }
        }
    }
}

impl ParamSet for EmbeddingLayer {
    fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        if self.trainable {
            vec![("table".to_string(), &self.table)]
        } else {
            Vec::new()
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        if self.trainable {
            vec![&mut self.table]
        } else {
            Vec::new()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_table_lookup() {
        let layer = EmbeddingLayer::new(Matrix::identity(3), true);
        let out = layer.forward(&[0, 2]).unwrap();
        assert_eq!(out[0].as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(out[1].as_slice(), &[0.0, 0.0, 1.0]);
        assert!(layer.forward(&[]).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_id_names_position() {
        let layer = EmbeddingLayer::new(Matrix::identity(3), true);
        let err = layer.forward(&[0, 1, 3]).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
        assert!(err.to_string().contains("position 2"));
    }

    #[test]
    fn frozen_table_has_no_trainable_tensors() {
        let layer = EmbeddingLayer::new(Matrix::identity(3), false);
        assert_eq!(layer.scalar_count(), 0);
        let mut grads = layer.clone();
        grads.table.fill(0.0);
        layer.backward_into(&[1], &[Matrix::column(vec![1.0; 3])], &mut grads);
        assert_eq!(grads.table.sum(), 0.0);
    }

    #[test]
    fn repeated_tokens_accumulate() {
        let layer = EmbeddingLayer::new(Matrix::identity(2), true);
        let mut grads = EmbeddingLayer::new(Matrix::zeros(2, 2), true);
        let d = [
            Matrix::column(vec![1.0, 2.0]),
            Matrix::column(vec![3.0, 4.0]),
        ];
        layer.backward_into(&[1, 1], &d, &mut grads);
        assert_eq!(grads.table.row(1), &[4.0, 6.0]);
        assert_eq!(grads.table.row(0), &[0.0, 0.0]);
    }
}
