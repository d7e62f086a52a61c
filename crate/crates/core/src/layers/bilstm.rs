use super::dropout::{hadamard, sample_mask, DropoutSpec};
use super::Mode;
use crate::cells::{
    init_cell, step_backward_into, step_forward, CellConfig, CellParams, CellState, StepCache,
    Variant,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::params::{prefixed, ParamSet};

/// Two independent cells reading the sequence in opposite directions. The
/// output is `[h_T(forward); h_T(backward)]`, the concatenation of both final
/// hidden states.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmLayer {
    pub forward_cell: CellParams,
    pub backward_cell: CellParams,
    pub cfg: CellConfig,
    pub dropout: DropoutSpec,
}

/// Caches of one direction, in processing order.
#[derive(Debug, Clone)]
pub struct DirectionCache {
    pub steps: Vec<StepCache>,
    pub input_mask: Option<Matrix>,
    pub recurrent_mask: Option<Matrix>,
}

#[derive(Debug, Clone)]
pub struct BiLstmCache {
    pub forward: DirectionCache,
    pub backward: DirectionCache,
}

impl BiLstmLayer {
    pub fn new(
        variant: Variant,
        input_dim: usize,
        hidden_dim: usize,
        cfg: CellConfig,
        dropout: DropoutSpec,
        rng: &mut Rng,
    ) -> Self {
        let forward_cell = init_cell(variant, input_dim, hidden_dim, rng);
        let backward_cell = init_cell(variant, input_dim, hidden_dim, rng);
        Self {
            forward_cell,
            backward_cell,
            cfg,
            dropout,
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward_cell.hidden_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.forward_cell.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        2 * self.hidden_dim()
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.zero();
        z
    }

    fn run_direction<'s>(
        &self,
        cell: &CellParams,
        inputs: impl Iterator<Item = &'s Matrix>,
        mode: &mut Mode<'_>,
    ) -> Result<(Matrix, DirectionCache)> {
        let (input_mask, recurrent_mask) = match mode.rng() {
            Some(rng) => (
                (self.dropout.input_rate > 0.0)
                    .then(|| sample_mask(cell.input_dim(), self.dropout.input_rate, rng)),
                (self.dropout.recurrent_rate > 0.0)
                    .then(|| sample_mask(cell.hidden_dim(), self.dropout.recurrent_rate, rng)),
            ),
            None => (None, None),
        };
        let mut state = CellState::zeros(cell.hidden_dim());
        let mut steps = Vec::new();
        for x in inputs {
            let x = match &input_mask {
                Some(mask) => hadamard(x, mask),
                None => x.clone(),
            };
            if let Some(mask) = &recurrent_mask {
                state.h = hadamard(&state.h, mask);
            }
            let (next, cache) = step_forward(cell, &self.cfg, &x, &state)?;
            steps.push(cache);
            state = next;
        }
        let cache = DirectionCache {
            steps,
            input_mask,
            recurrent_mask,
        };
        Ok((state.h, cache))
    }

    pub fn forward(&self, seq: &[Matrix], mode: &mut Mode<'_>) -> Result<(Matrix, BiLstmCache)> {
        if seq.is_empty() {
            return Err(Error::data("bidirectional LSTM received an empty sequence"));
        }
        let (h_fwd, fwd) = self.run_direction(&self.forward_cell, seq.iter(), mode)?;
        let (h_bwd, bwd) = self.run_direction(&self.backward_cell, seq.iter().rev(), mode)?;
        let mut out = h_fwd.into_vec();
        out.extend_from_slice(h_bwd.as_slice());
        Ok((
            Matrix::column(out),
            BiLstmCache {
                forward: fwd,
                backward: bwd,
            },
        ))
    }

    /// Full BPTT through both directions. Returns the gradient with respect to
    /// every input step, in original sequence order.
    pub fn backward_into(
        &self,
        cache: &BiLstmCache,
        d_output: &Matrix,
        grads: &mut BiLstmLayer,
    ) -> Vec<Matrix> {
        let n = self.hidden_dim();
        assert_eq!(d_output.shape(), (2 * n, 1), "BiLSTM upstream shape");
        let len = cache.forward.steps.len();
        let mut d_seq = vec![Matrix::zeros(self.input_dim(), 1); len];
        let d_fwd = Matrix::column(d_output.as_slice()[..n].to_vec());
        let d_bwd = Matrix::column(d_output.as_slice()[n..].to_vec());

        let directions = [
            (
                &self.forward_cell,
                &mut grads.forward_cell,
                &cache.forward,
                d_fwd,
                false,
            ),
            (
                &self.backward_cell,
                &mut grads.backward_cell,
                &cache.backward,
                d_bwd,
                true,
            ),
        ];
        for (cell, cell_grads, dir, d_h_last, reversed) in directions {
            let mut dh = d_h_last;
            let mut dc = Matrix::zeros(n, 1);
            for (k, step) in dir.steps.iter().enumerate().rev() {
                let (dh_prev, dc_prev, dx) =
                    step_backward_into(cell, &self.cfg, step, &dh, &dc, cell_grads);
                let dx = match &dir.input_mask {
                    Some(mask) => hadamard(&dx, mask),
                    None => dx,
                };
                let t = if reversed { len - 1 - k } else { k };
                d_seq[t].add_assign(&dx);
                dh = match &dir.recurrent_mask {
                    Some(mask) => hadamard(&dh_prev, mask),
                    None => dh_prev,
                };
                dc = dc_prev;
            }
        }
        d_seq
    }
}

impl ParamSet for BiLstmLayer {
    fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        prefixed("fwd", self.forward_cell.named_tensors())
            .chain(prefixed("bwd", self.backward_cell.named_tensors()))
            .collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = self.forward_cell.tensors_mut();
        out.extend(self.backward_cell.tensors_mut());
        out
    }
}
