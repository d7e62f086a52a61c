//! Dense matrices, the seeded generator, and weight initialization.

mod matrix;
mod rng;

pub use matrix::{elementwise, matmul, ElementwiseOp, Matrix};
pub use rng::Rng;

/// Glorot/Xavier uniform: samples in `[-L, L]` with `L = sqrt(6 / (rows + cols))`.
pub fn glorot_uniform(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| (2.0 * rng.next_uniform() - 1.0) * limit)
        .collect();
    Matrix::from_vec(rows, cols, data)
}
