use crate::activations::ActivationKind;
use crate::error::{Error, Result};
use crate::linalg::{glorot_uniform, Matrix, Rng};
use crate::params::ParamSet;

/// Valid 1-D cross-correlation over time followed by bias and activation.
///
/// `weights` is `out_channels x (kernel_width * in_channels)`; column
/// `j * in_channels + c` multiplies channel `c` at window offset `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv1DLayer {
    in_channels: usize,
    out_channels: usize,
    kernel_width: usize,
    pub weights: Matrix,
    pub bias: Matrix,
    pub activation: ActivationKind,
}

#[derive(Debug, Clone)]
pub struct Conv1DCache {
    input: Vec<Matrix>,
    output: Vec<Matrix>,
}

impl Conv1DLayer {
    pub fn new(
        weights: Matrix,
        bias: Matrix,
        kernel_width: usize,
        activation: ActivationKind,
    ) -> Result<Self> {
        let out_channels = weights.rows();
        if kernel_width == 0 || !weights.cols().is_multiple_of(kernel_width) {
            return Err(Error::config(format!(
                "conv weights {}x{} are not divisible into kernel width {kernel_width}",
                weights.rows(),
                weights.cols()
            )));
        }
        if bias.shape() != (out_channels, 1) {
            return Err(Error::config(format!(
                "conv bias must be {out_channels}x1, got {}x{}",
                bias.rows(),
                bias.cols()
            )));
        }
        Ok(Self {
            in_channels: weights.cols() / kernel_width,
            out_channels,
            kernel_width,
            weights,
            bias,
            activation,
        })
    }

    pub fn glorot(
        in_channels: usize,
        out_channels: usize,
        kernel_width: usize,
        activation: ActivationKind,
        rng: &mut Rng,
    ) -> Self {
        Self {
            in_channels,
            out_channels,
            kernel_width,
            weights: glorot_uniform(out_channels, in_channels * kernel_width, rng),
            bias: Matrix::zeros(out_channels, 1),
            activation,
        }
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn kernel_width(&self) -> usize {
        self.kernel_width
    }

    pub fn output_len(&self, input_len: usize) -> Option<usize> {
        (input_len >= self.kernel_width).then(|| input_len - self.kernel_width + 1)
    }

    fn window(&self, seq: &[Matrix], start: usize) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.kernel_width * self.in_channels);
        for x in &seq[start..start + self.kernel_width] {
            w.extend_from_slice(x.as_slice());
        }
        w
    }

    pub fn forward(&self, seq: &[Matrix]) -> Result<(Vec<Matrix>, Conv1DCache)> {
        let out_len = self.output_len(seq.len()).ok_or_else(|| {
            Error::data(format!(
                "sequence of length {} is shorter than conv kernel width {}",
                seq.len(),
                self.kernel_width
            ))
        })?;
        if let Some(x) = seq.iter().find(|x| x.shape() != (self.in_channels, 1)) {
            return Err(Error::config(format!(
                "conv expects {}x1 inputs, got {}x{}",
                self.in_channels,
                x.rows(),
                x.cols()
            )));
        }
        let output: Vec<Matrix> = (0..out_len)
            .map(|t| {
                let mut z = self.bias.as_slice().to_vec();
                self.weights.mul_vec_acc(&self.window(seq, t), &mut z);
                self.activation.apply_in_place(&mut z);
                Matrix::column(z)
            })
            .collect();
        let cache = Conv1DCache {
            input: seq.to_vec(),
            output: output.clone(),
        };
        Ok((output, cache))
    }

    pub fn backward_into(
        &self,
        cache: &Conv1DCache,
        d_out: &[Matrix],
        grads: &mut Conv1DLayer,
    ) -> Vec<Matrix> {
        assert_eq!(d_out.len(), cache.output.len(), "conv upstream length");
        let mut d_in = vec![Matrix::zeros(self.in_channels, 1); cache.input.len()];
        let mut dz = vec![0.0; self.out_channels];
        let mut d_window = vec![0.0; self.in_channels * self.kernel_width];
        for (t, (y, dy)) in cache.output.iter().zip(d_out).enumerate() {
            self.activation
                .backprop_slice(y.as_slice(), dy.as_slice(), &mut dz);
            let window = self.window(&cache.input, t);
            grads.weights.add_outer(&dz, &window);
            for (b, d) in grads.bias.as_mut_slice().iter_mut().zip(&dz) {
                *b += d;
            }
            d_window.fill(0.0);
            self.weights.mul_t_vec_acc(&dz, &mut d_window);
            for (j, chunk) in d_window.chunks(self.in_channels).enumerate() {
                for (a, b) in d_in[t + j].as_mut_slice().iter_mut().zip(chunk) {
                    *a += b;
                }
            }
        }
        d_in
    }
}

impl ParamSet for Conv1DLayer {
    fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        vec![
            ("weights".into(), &self.weights),
            ("bias".into(), &self.bias),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        vec![&mut self.weights, &mut self.bias]
    }
}
