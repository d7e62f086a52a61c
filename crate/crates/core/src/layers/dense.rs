use crate::activations::ActivationKind;
use crate::error::{Error, Result};
use crate::linalg::{glorot_uniform, Matrix, Rng};
use crate::params::ParamSet;

/// `y = act(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Matrix,
    pub activation: ActivationKind,
}

#[derive(Debug, Clone)]
pub struct DenseCache {
    input: Matrix,
    output: Matrix,
}

impl DenseCache {
    pub fn output(&self) -> &Matrix {
        &self.output
    }
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Matrix, activation: ActivationKind) -> Result<Self> {
        if bias.shape() != (weights.rows(), 1) {
            return Err(Error::config(format!(
                "dense bias must be {}x1, got {}x{}",
                weights.rows(),
                bias.rows(),
                bias.cols()
            )));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn glorot(
        inputs: usize,
        outputs: usize,
        activation: ActivationKind,
        rng: &mut Rng,
    ) -> Self {
        Self {
            weights: glorot_uniform(outputs, inputs, rng),
            bias: Matrix::zeros(outputs, 1),
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, DenseCache)> {
        if x.shape() != (self.inputs(), 1) {
            return Err(Error::config(format!(
                "dense layer expects {}x1 input, got {}x{}",
                self.inputs(),
                x.rows(),
                x.cols()
            )));
        }
        let mut z = self.bias.as_slice().to_vec();
        self.weights.mul_vec_acc(x.as_slice(), &mut z);
        self.activation.apply_in_place(&mut z);
        let y = Matrix::column(z);
        let cache = DenseCache {
            input: x.clone(),
            output: y.clone(),
        };
        Ok((y, cache))
    }

    /// Backward from the gradient with respect to the layer output.
    pub fn backward_into(&self, cache: &DenseCache, dy: &Matrix, grads: &mut DenseLayer) -> Matrix {
        let mut dz = vec![0.0; self.outputs()];
        self.activation
            .backprop_slice(cache.output.as_slice(), dy.as_slice(), &mut dz);
        self.backward_preactivation_into(cache, &Matrix::column(dz), grads)
    }

    /// Backward from the gradient with respect to `W x + b`, skipping the
    /// activation (used when the loss supplies that gradient directly).
    pub fn backward_preactivation_into(
        &self,
        cache: &DenseCache,
        dz: &Matrix,
        grads: &mut DenseLayer,
    ) -> Matrix {
        grads
            .weights
            .add_outer(dz.as_slice(), cache.input.as_slice());
        grads.bias.add_assign(dz);
        let mut dx = vec![0.0; self.inputs()];
        self.weights.mul_t_vec_acc(dz.as_slice(), &mut dx);
        Matrix::column(dx)
    }
}

impl ParamSet for DenseLayer {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_layer() {
        let layer = DenseLayer::new(
            Matrix::identity(3),
            Matrix::zeros(3, 1),
            ActivationKind::Linear,
        )
        .unwrap();
        let x = Matrix::column(vec![1.0, -2.0, 0.5]);
        assert_eq!(layer.forward(&x).unwrap().0, x);
    }

    #[test]
    fn shape_mismatch_is_config_error() {
        let layer = DenseLayer::glorot(3, 2, ActivationKind::Relu, &mut Rng::new(0));
        assert!(matches!(
            layer.forward(&Matrix::zeros(2, 1)).unwrap_err(),
            Error::Config(_)
        ));
        assert!(DenseLayer::new(
            Matrix::zeros(2, 3),
            Matrix::zeros(3, 1),
            ActivationKind::Linear
        )
        .is_err());
    }
}
