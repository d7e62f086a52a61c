use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::params::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl OptimizerConfig {
    pub fn adam(learning_rate: f64) -> Self {
        Self {
            kind: OptimizerKind::Adam,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn sgd(learning_rate: f64) -> Self {
        Self {
            kind: OptimizerKind::Sgd,
            ..Self::adam(learning_rate)
        }
    }

    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        match kind {
            OptimizerKind::Sgd => Self::sgd(learning_rate),
            OptimizerKind::Adam => Self::adam(learning_rate),
        }
    }
}

/// Stateful optimizer. Adam moment buffers are allocated on the first step,
/// one pair per tensor the parameter set actually has.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    steps: u64,
    moments: Vec<(Matrix, Matrix)>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Self {
        Self {
            config,
            steps: 0,
            moments: Vec::new(),
        }
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of tensors that have moment buffers.
    pub fn buffer_count(&self) -> usize {
        self.moments.len()
    }

    pub fn step<P: ParamSet + ?Sized>(&mut self, params: &mut P, grads: &P) -> Result<()> {
        let grad_tensors = grads.tensors();
        let mut param_tensors = params.tensors_mut();
        if grad_tensors.len() != param_tensors.len() {
            return Err(Error::config(format!(
                "optimizer got {} gradient tensors for {} parameters",
                grad_tensors.len(),
                param_tensors.len()
            )));
        }
        for (k, (p, g)) in param_tensors.iter().zip(&grad_tensors).enumerate() {
            if p.shape() != g.shape() {
                return Err(Error::config(format!(
                    "gradient {k} is {}x{} but parameter is {}x{}",
                    g.rows(),
                    g.cols(),
                    p.rows(),
                    p.cols()
                )));
            }
        }

        let cfg = self.config;
        self.steps += 1;
        match cfg.kind {
            OptimizerKind::Sgd => {
                for (p, g) in param_tensors.iter_mut().zip(&grad_tensors) {
                    for (w, d) in p.as_mut_slice().iter_mut().zip(g.as_slice()) {
                        *w -= cfg.learning_rate * d;
                    }
                }
            }
            OptimizerKind::Adam => {
                if self.moments.is_empty() {
                    self.moments = grad_tensors
                        .iter()
                        .map(|g| (g.zeros_like(), g.zeros_like()))
                        .collect();
                }
                if self.moments.len() != param_tensors.len()
                    || self
                        .moments
                        .iter()
                        .zip(&grad_tensors)
                        .any(|((m, _), g)| m.shape() != g.shape())
                {
                    return Err(Error::config(
                        "parameter set changed shape between optimizer steps",
                    ));
                }
                let t = self.steps as i32;
                let c1 = 1.0 - cfg.beta1.powi(t);
                let c2 = 1.0 - cfg.beta2.powi(t);
                for ((p, g), (m, v)) in param_tensors
                    .iter_mut()
                    .zip(&grad_tensors)
                    .zip(self.moments.iter_mut())
                {
                    let params = p.as_mut_slice();
                    let (ms, vs) = (m.as_mut_slice(), v.as_mut_slice());
                    for (k, &d) in g.as_slice().iter().enumerate() {
                        ms[k] = cfg.beta1 * ms[k] + (1.0 - cfg.beta1) * d;
                        vs[k] = cfg.beta2 * vs[k] + (1.0 - cfg.beta2) * d * d;
                        let m_hat = ms[k] / c1;
                        let v_hat = vs[k] / c2;
                        params[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
                    }
                }
            }
        }
        Ok(())
    }
}
