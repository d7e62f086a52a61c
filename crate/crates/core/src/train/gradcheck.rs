//! Central finite-difference verification of analytic gradients.

use std::fmt;

use super::loss::{cross_entropy, loss_and_grad};
use crate::cells::{
    init_cell, step_backward_into, step_forward, CellConfig, CellParams, CellState, Variant,
};
use crate::error::{Error, Result};
use crate::layers::{Mode, Model};
use crate::linalg::{Matrix, Rng};
use crate::params::ParamSet;

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub scalars: usize,
    pub max_rel_error: f64,
    pub worst_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub tensor: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub eps: f64,
    pub tolerance: f64,
    pub tensors: Vec<TensorCheck>,
    pub violations: Vec<Violation>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_rel_error(&self) -> f64 {
        self.tensors
            .iter()
            .map(|t| t.max_rel_error)
            .fold(0.0, f64::max)
    }

    pub fn scalars_checked(&self) -> usize {
        self.tensors.iter().map(|t| t.scalars).sum()
    }
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} tensors, {} scalars, eps {:e}, tol {:e}: max rel error {:.3e}, {} violations",
            self.tensors.len(),
            self.scalars_checked(),
            self.eps,
            self.tolerance,
            self.max_rel_error(),
            self.violations.len()
        )?;
        for t in &self.tensors {
            writeln!(
                f,
                "  {:<24} {:>6} scalars  max rel err {:.3e}",
                t.name, t.scalars, t.max_rel_error
            )?;
        }
        for v in &self.violations {
            writeln!(
                f,
                "  VIOLATION {}[{}]: analytic {:e} numeric {:e} rel {:.3e}",
                v.tensor, v.index, v.analytic, v.numeric, v.rel_error
            )?;
        }
        Ok(())
    }
}

/// Compares `analytic` against `(loss(p + eps) - loss(p - eps)) / (2 eps)`
/// for every scalar of `params`.
pub fn check_gradients<P: ParamSet + Clone>(
    params: &P,
    analytic: &P,
    eps: f64,
    tolerance: f64,
    mut loss: impl FnMut(&P) -> f64,
) -> GradCheckReport {
    let names = params.tensor_names();
    let analytic = analytic.tensors();
    assert_eq!(
        names.len(),
        analytic.len(),
        "analytic gradient tensor count"
    );
    let mut probe = params.clone();
    let mut tensors = Vec::with_capacity(names.len());
    let mut violations = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let len = analytic[k].len();
        let mut worst = (0.0f64, 0usize);
        for j in 0..len {
            let original = probe.tensors_mut()[k].as_slice()[j];
            probe.tensors_mut()[k].as_mut_slice()[j] = original + eps;
            let plus = loss(&probe);
            probe.tensors_mut()[k].as_mut_slice()[j] = original - eps;
            let minus = loss(&probe);
            probe.tensors_mut()[k].as_mut_slice()[j] = original;
            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[k].as_slice()[j];
            let rel = relative_error(a, numeric);
            // a non-finite probe counts as a violation
            if rel.is_nan() || rel > worst.0 {
                worst = (rel, j);
            }
            if rel.is_nan() || rel >= tolerance {
                violations.push(Violation {
                    tensor: name.clone(),
                    index: j,
                    analytic: a,
                    numeric,
                    rel_error: rel,
                });
            }
        }
        tensors.push(TensorCheck {
            name: name.clone(),
            scalars: len,
            max_rel_error: worst.0,
            worst_index: worst.1,
        });
    }
    GradCheckReport {
        eps,
        tolerance,
        tensors,
        violations,
    }
}

fn has_dropout(model: &Model) -> bool {
    model.bilstm.dropout.input_rate > 0.0
        || model.bilstm.dropout.recurrent_rate > 0.0
        || model.blocks.iter().any(|b| b.dropout.rate > 0.0)
}

/// Checks every trainable tensor of `model` on one labelled example.
/// All dropout rates must be zero.
pub fn grad_check_model(
    model: &Model,
    tokens: &[usize],
    label: usize,
    eps: f64,
    tolerance: f64,
) -> Result<GradCheckReport> {
    if has_dropout(model) {
        return Err(Error::config(
            "gradient checks need a model with all dropout rates set to zero",
        ));
    }
    let mut analytic = model.zeros_like();
    loss_and_grad(model, tokens, label, &mut Mode::Eval, &mut analytic)?;
    let loss = |m: &Model| -> f64 {
        match m.predict(tokens) {
            Ok(p) => cross_entropy(&p, label).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    Ok(check_gradients(model, &analytic, eps, tolerance, loss))
}

/// A single cell unrolled over a fixed random sequence, with scalar loss
/// `sum_t a_t . h_t + b . c_T`. Used to verify BPTT through the cell alone.
#[derive(Debug, Clone)]
pub struct UnrolledCellProblem {
    pub params: CellParams,
    pub cfg: CellConfig,
    pub initial: CellState,
    pub inputs: Vec<Matrix>,
    pub h_weights: Vec<Matrix>,
    pub c_weight: Matrix,
}

impl UnrolledCellProblem {
    pub fn random(
        variant: Variant,
        cfg: CellConfig,
        input_dim: usize,
        hidden_dim: usize,
        steps: usize,
        seed: u64,
    ) -> Self {
        let mut rng = Rng::new(seed);
        let mut params = init_cell(variant, input_dim, hidden_dim, &mut rng);
        // move every tensor off its deterministic init so all terms matter
        for t in params.tensors_mut() {
            t.as_mut_slice()
                .iter_mut()
                .for_each(|v| *v += 0.5 * (rng.next_uniform() - 0.5));
        }
        let mut col =
            |n: usize| Matrix::column((0..n).map(|_| rng.next_uniform() * 2.0 - 1.0).collect());
        let initial = CellState {
            h: col(hidden_dim),
            c: col(hidden_dim),
        };
        let inputs = (0..steps).map(|_| col(input_dim)).collect();
        let h_weights = (0..steps).map(|_| col(hidden_dim)).collect();
        let c_weight = col(hidden_dim);
        Self {
            params,
            cfg,
            initial,
            inputs,
            h_weights,
            c_weight,
        }
    }

    fn dot(a: &Matrix, b: &Matrix) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x * y)
            .sum()
    }

    pub fn loss(&self, params: &CellParams) -> Result<f64> {
        let mut state = self.initial.clone();
        let mut total = 0.0;
        for (x, a) in self.inputs.iter().zip(&self.h_weights) {
            state = step_forward(params, &self.cfg, x, &state)?.0;
            total += Self::dot(a, &state.h);
        }
        Ok(total + Self::dot(&self.c_weight, &state.c))
    }

    /// Analytic gradient of [`UnrolledCellProblem::loss`] by BPTT.
    pub fn gradient(&self) -> Result<CellParams> {
        let mut state = self.initial.clone();
        let mut caches = Vec::with_capacity(self.inputs.len());
        for x in &self.inputs {
            let (next, cache) = step_forward(&self.params, &self.cfg, x, &state)?;
            caches.push(cache);
            state = next;
        }
        let mut grads = self.params.zeros_like();
        let mut dh = Matrix::zeros(self.params.hidden_dim(), 1);
        let mut dc = self.c_weight.clone();
        for (cache, a) in caches.iter().zip(&self.h_weights).rev() {
            dh.add_assign(a);
            let (dh_prev, dc_prev, _) =
                step_backward_into(&self.params, &self.cfg, cache, &dh, &dc, &mut grads);
            dh = dh_prev;
            dc = dc_prev;
        }
        Ok(grads)
    }

    pub fn check(&self, eps: f64, tolerance: f64) -> Result<GradCheckReport> {
        let analytic = self.gradient()?;
        Ok(check_gradients(
            &self.params,
            &analytic,
            eps,
            tolerance,
            |p| self.loss(p).unwrap_or(f64::NAN),
        ))
    }
}
