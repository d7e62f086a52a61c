//! Standard LSTM and the three SLIM reductions of its gating equations.
//!
//! Every variant shares the input block and memory update:
//!
//! ```text
//! g_t = act(W_c x_t + U_c h_{t-1} + b_c)      candidate
//! c_t = f_t * c_{t-1} + i_t * g_t
//! h_t = o_t * act(c_t)
//! ```
//!
//! and differs only in which terms feed the gates `i_t, f_t, o_t = gate_act(...)`:
//!
//! | variant  | gate pre-activation       |
//! |----------|---------------------------|
//! | Standard | `W x_t + U h_{t-1} + b`   |
//! | Slim1    | `U h_{t-1} + b`           |
//! | Slim2    | `U h_{t-1}`               |
//! | Slim3    | `b`                       |
//!
//! Removed terms are structurally absent from [`CellParams`], and therefore
//! from the gradients and optimizer state derived from it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::activations::ActivationKind;
use crate::error::{Error, Result};
use crate::linalg::{glorot_uniform, Matrix, Rng};
use crate::params::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "lstm")]
    Standard,
    #[serde(rename = "lstm1")]
    Slim1,
    #[serde(rename = "lstm2")]
    Slim2,
    #[serde(rename = "lstm3")]
    Slim3,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Standard,
        Variant::Slim1,
        Variant::Slim2,
        Variant::Slim3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "lstm",
            Variant::Slim1 => "lstm1",
            Variant::Slim2 => "lstm2",
            Variant::Slim3 => "lstm3",
        }
    }

    /// Gates read `W_g x_t`.
    pub fn gate_input_weights(self) -> bool {
        matches!(self, Variant::Standard)
    }

    /// Gates read `U_g h_{t-1}`.
    pub fn gate_recurrent_weights(self) -> bool {
        !matches!(self, Variant::Slim3)
    }

    pub fn gate_bias(self) -> bool {
        !matches!(self, Variant::Slim2)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown variant `{s}` (expected lstm, lstm1, lstm2 or lstm3)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input,
    Forget,
    Output,
}

impl Gate {
    pub const ALL: [Gate; 3] = [Gate::Input, Gate::Forget, Gate::Output];

    fn index(self) -> usize {
        self as usize
    }

    fn suffix(self) -> &'static str {
        match self {
            Gate::Input => "i",
            Gate::Forget => "f",
            Gate::Output => "o",
        }
    }
}

/// Parameters of one gate. Which fields exist is fixed by the variant at
/// construction and cannot change afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    w: Option<Matrix>,
    u: Option<Matrix>,
    b: Option<Matrix>,
}

impl GateParams {
    pub fn w(&self) -> Option<&Matrix> {
        self.w.as_ref()
    }

    pub fn u(&self) -> Option<&Matrix> {
        self.u.as_ref()
    }

    pub fn b(&self) -> Option<&Matrix> {
        self.b.as_ref()
    }

    pub fn w_mut(&mut self) -> Option<&mut Matrix> {
        self.w.as_mut()
    }

    pub fn u_mut(&mut self) -> Option<&mut Matrix> {
        self.u.as_mut()
    }

    pub fn b_mut(&mut self) -> Option<&mut Matrix> {
        self.b.as_mut()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightInit {
    Glorot,
    Zeros,
}

/// Initialization scheme for [`init_cell_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellInit {
    pub weights: WeightInit,
    /// Initial value of every entry of `b_f`; all other biases start at zero.
    pub forget_bias: f64,
}

impl Default for CellInit {
    fn default() -> Self {
        Self {
            weights: WeightInit::Glorot,
            forget_bias: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellParams {
    variant: Variant,
    input_dim: usize,
    hidden_dim: usize,
    pub w_c: Matrix,
    pub u_c: Matrix,
    pub b_c: Matrix,
    gates: [GateParams; 3],
}

impl CellParams {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn gate(&self, gate: Gate) -> &GateParams {
        &self.gates[gate.index()]
    }

    pub fn gate_mut(&mut self, gate: Gate) -> &mut GateParams {
        &mut self.gates[gate.index()]
    }

    /// Copy of these parameters as a `target` cell, keeping only the gate
    /// terms `target` has. `target` must not need a term this cell lacks.
    pub fn restrict(&self, target: Variant) -> Result<CellParams> {
        let keeps = |has: fn(Variant) -> bool| !has(target) || has(self.variant);
        if !(keeps(Variant::gate_input_weights)
            && keeps(Variant::gate_recurrent_weights)
            && keeps(Variant::gate_bias))
        {
            return Err(Error::config(format!(
                "cannot restrict {} to {}: the target has gate terms the source lacks",
                self.variant.name(),
                target.name()
            )));
        }
        let gates = self.gates.clone().map(|g| GateParams {
            w: g.w.filter(|_| target.gate_input_weights()),
            u: g.u.filter(|_| target.gate_recurrent_weights()),
            b: g.b.filter(|_| target.gate_bias()),
        });
        Ok(CellParams {
            variant: target,
            gates,
            ..self.clone()
        })
    }

    /// A zero-filled container with the same variant and shapes; used for gradients.
    pub fn zeros_like(&self) -> CellParams {
        let mut z = self.clone();
        z.zero();
        z
    }
}

impl ParamSet for CellParams {
    fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out = vec![
            ("W_c".to_string(), &self.w_c),
            ("U_c".to_string(), &self.u_c),
            ("b_c".to_string(), &self.b_c),
        ];
        for gate in Gate::ALL {
            let p = &self.gates[gate.index()];
            let s = gate.suffix();
            if let Some(w) = &p.w {
                out.push((format!("W_{s}"), w));
            }
            if let Some(u) = &p.u {
                out.push((format!("U_{s}"), u));
            }
            if let Some(b) = &p.b {
                out.push((format!("b_{s}"), b));
            }
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = vec![&mut self.w_c, &mut self.u_c, &mut self.b_c];
        for p in self.gates.iter_mut() {
            out.extend(p.w.as_mut());
            out.extend(p.u.as_mut());
            out.extend(p.b.as_mut());
        }
        out
    }
}

/// Activations used by a cell: `gate_activation` on the three gates,
/// `cell_activation` on the candidate and on `c_t` before the output gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellConfig {
    pub gate_activation: ActivationKind,
    pub cell_activation: ActivationKind,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            gate_activation: ActivationKind::Sigmoid,
            cell_activation: ActivationKind::Tanh,
        }
    }
}

impl CellConfig {
    pub fn with_cell_activation(cell_activation: ActivationKind) -> Self {
        Self {
            cell_activation,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub h: Matrix,
    pub c: Matrix,
}

impl CellState {
    pub fn zeros(hidden_dim: usize) -> Self {
        Self {
            h: Matrix::zeros(hidden_dim, 1),
            c: Matrix::zeros(hidden_dim, 1),
        }
    }
}

/// Everything the backward pass needs from one forward step. Activation
/// outputs are stored instead of pre-activations; ReLU derivatives are read off
/// the sign of the output.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub x: Matrix,
    pub h_prev: Matrix,
    pub c_prev: Matrix,
    pub input_gate: Matrix,
    pub forget_gate: Matrix,
    pub output_gate: Matrix,
    pub candidate: Matrix,
    pub c: Matrix,
    pub c_activated: Matrix,
}

impl StepCache {
    fn gate_output(&self, gate: Gate) -> &Matrix {
        match gate {
            Gate::Input => &self.input_gate,
            Gate::Forget => &self.forget_gate,
            Gate::Output => &self.output_gate,
        }
    }
}

pub fn init_cell(
    variant: Variant,
    input_dim: usize,
    hidden_dim: usize,
    rng: &mut Rng,
) -> CellParams {
    init_cell_with(variant, input_dim, hidden_dim, rng, CellInit::default())
}

pub fn init_cell_with(
    variant: Variant,
    input_dim: usize,
    hidden_dim: usize,
    rng: &mut Rng,
    init: CellInit,
) -> CellParams {
    assert!(
        input_dim >= 1 && hidden_dim >= 1,
        "cell dimensions must be positive"
    );
    let (m, n) = (input_dim, hidden_dim);
    let mut weight = |rows: usize, cols: usize| match init.weights {
        WeightInit::Glorot => glorot_uniform(rows, cols, rng),
        WeightInit::Zeros => Matrix::zeros(rows, cols),
    };
    let w_c = weight(n, m);
    let u_c = weight(n, n);
    let b_c = Matrix::zeros(n, 1);
    let mut gate = |g: Gate| GateParams {
        w: variant.gate_input_weights().then(|| weight(n, m)),
        u: variant.gate_recurrent_weights().then(|| weight(n, n)),
        b: variant.gate_bias().then(|| {
            let value = if g == Gate::Forget {
                init.forget_bias
            } else {
                0.0
            };
            Matrix::filled(n, 1, value)
        }),
    };
    let gates = [gate(Gate::Input), gate(Gate::Forget), gate(Gate::Output)];
    CellParams {
        variant,
        input_dim: m,
        hidden_dim: n,
        w_c,
        u_c,
        b_c,
        gates,
    }
}

/// Closed-form trainable scalar count of one cell.
pub fn param_count(variant: Variant, input_dim: usize, hidden_dim: usize) -> usize {
    let (m, n) = (input_dim, hidden_dim);
    let block = n * m + n * n + n;
    let per_gate = match variant {
        Variant::Standard => n * m + n * n + n,
        Variant::Slim1 => n * n + n,
        Variant::Slim2 => n * n,
        Variant::Slim3 => n,
    };
    block + 3 * per_gate
}

/// Forward arithmetic of one time step, split by where it happens.
///
/// Each term of `W x`, `U h` is one multiply-accumulate. Summing the partial
/// products of different matrices and adding the bias each count one add per
/// hidden unit. The memory and output equations cost three multiplies and one
/// add per unit. Activation functions are not counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCost {
    pub gate_macs: u64,
    pub block_macs: u64,
    pub adds: u64,
    pub elementwise_muls: u64,
}

impl StepCost {
    pub fn multiplies(&self) -> u64 {
        self.gate_macs + self.block_macs + self.elementwise_muls
    }

    pub fn total(&self) -> u64 {
        self.multiplies() + self.adds
    }
}

pub fn step_cost(variant: Variant, input_dim: usize, hidden_dim: usize) -> StepCost {
    let (m, n) = (input_dim as u64, hidden_dim as u64);
    // pre-activation adds: one per extra term beyond the first
    let terms_adds = |terms: u64| terms.saturating_sub(1) * n;
    let gate_terms = variant.gate_input_weights() as u64
        + variant.gate_recurrent_weights() as u64
        + variant.gate_bias() as u64;
    let gate_macs = 3
        * (if variant.gate_input_weights() {
            n * m
        } else {
            0
        } + if variant.gate_recurrent_weights() {
            n * n
        } else {
            0
        });
    StepCost {
        gate_macs,
        block_macs: n * m + n * n,
        adds: terms_adds(3) + 3 * terms_adds(gate_terms) + n,
        elementwise_muls: 3 * n,
    }
}

/// Total forward operation tally of one step (see [`StepCost`]).
pub fn flops_per_step(variant: Variant, input_dim: usize, hidden_dim: usize) -> u64 {
    step_cost(variant, input_dim, hidden_dim).total()
}

fn check_vec(name: &str, m: &Matrix, len: usize) -> Result<()> {
    if m.shape() != (len, 1) {
        return Err(Error::config(format!(
            "{name} must be {len}x1, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// One forward step. Errors with [`Error::Divergence`] if `h_t` or `c_t` is
/// not finite.
pub fn step_forward(
    params: &CellParams,
    cfg: &CellConfig,
    x: &Matrix,
    prev: &CellState,
) -> Result<(CellState, StepCache)> {
    let (m, n) = (params.input_dim, params.hidden_dim);
    check_vec("x_t", x, m)?;
    check_vec("h_{t-1}", &prev.h, n)?;
    check_vec("c_{t-1}", &prev.c, n)?;
    let xs = x.as_slice();
    let hs = prev.h.as_slice();

    let mut candidate = params.b_c.clone().into_vec();
    params.w_c.mul_vec_acc(xs, &mut candidate);
    params.u_c.mul_vec_acc(hs, &mut candidate);
    cfg.cell_activation.apply_in_place(&mut candidate);

    let gate_out = |g: Gate| {
        let p = params.gate(g);
        let mut z = match &p.b {
            Some(b) => b.as_slice().to_vec(),
            None => vec![0.0; n],
        };
        if let Some(w) = &p.w {
            w.mul_vec_acc(xs, &mut z);
        }
        if let Some(u) = &p.u {
            u.mul_vec_acc(hs, &mut z);
        }
        cfg.gate_activation.apply_in_place(&mut z);
        z
    };
    let i = gate_out(Gate::Input);
    let f = gate_out(Gate::Forget);
    let o = gate_out(Gate::Output);

    let c: Vec<f64> = (0..n)
        .map(|k| f[k] * prev.c.as_slice()[k] + i[k] * candidate[k])
        .collect();
    let mut c_act = c.clone();
    cfg.cell_activation.apply_in_place(&mut c_act);
    let h: Vec<f64> = o.iter().zip(&c_act).map(|(a, b)| a * b).collect();

    if !c.iter().chain(&h).all(|v| v.is_finite()) {
        return Err(Error::Divergence(format!(
            "{} cell ({} gates, {} cell activation) produced a non-finite state; max |c_(t-1)| = {:e}",
            params.variant,
            cfg.gate_activation,
            cfg.cell_activation,
            prev.c.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs()))
        )));
    }

    let state = CellState {
        h: Matrix::column(h),
        c: Matrix::column(c.clone()),
    };
    let cache = StepCache {
        x: x.clone(),
        h_prev: prev.h.clone(),
        c_prev: prev.c.clone(),
        input_gate: Matrix::column(i),
        forget_gate: Matrix::column(f),
        output_gate: Matrix::column(o),
        candidate: Matrix::column(candidate),
        c: Matrix::column(c),
        c_activated: Matrix::column(c_act),
    };
    Ok((state, cache))
}

/// Gradients flowing out of one step.
#[derive(Debug, Clone)]
pub struct StepGrads {
    pub params: CellParams,
    pub dh_prev: Matrix,
    pub dc_prev: Matrix,
    pub dx: Matrix,
}

/// Backward through one step, returning fresh parameter gradients.
pub fn step_backward(
    params: &CellParams,
    cfg: &CellConfig,
    cache: &StepCache,
    dh: &Matrix,
    dc: &Matrix,
) -> StepGrads {
    let mut grads = params.zeros_like();
    let (dh_prev, dc_prev, dx) = step_backward_into(params, cfg, cache, dh, dc, &mut grads);
    StepGrads {
        params: grads,
        dh_prev,
        dc_prev,
        dx,
    }
}

/// Backward through one step, accumulating parameter gradients into `grads`.
/// Returns `(dh_prev, dc_prev, dx)`.
pub fn step_backward_into(
    params: &CellParams,
    cfg: &CellConfig,
    cache: &StepCache,
    dh: &Matrix,
    dc: &Matrix,
    grads: &mut CellParams,
) -> (Matrix, Matrix, Matrix) {
    let (m, n) = (params.input_dim, params.hidden_dim);
    let dh = dh.as_slice();
    let o = cache.output_gate.as_slice();
    let s = cache.c_activated.as_slice();

    // h = o * act(c)
    let d_o: Vec<f64> = dh.iter().zip(s).map(|(a, b)| a * b).collect();
    let d_s: Vec<f64> = dh.iter().zip(o).map(|(a, b)| a * b).collect();
    let mut dc_total = vec![0.0; n];
    cfg.cell_activation.backprop_slice(s, &d_s, &mut dc_total);
    for (t, d) in dc_total.iter_mut().zip(dc.as_slice()) {
        *t += d;
    }

    // c = f * c_prev + i * g
    let i = cache.input_gate.as_slice();
    let f = cache.forget_gate.as_slice();
    let g = cache.candidate.as_slice();
    let c_prev = cache.c_prev.as_slice();
    let d_i: Vec<f64> = dc_total.iter().zip(g).map(|(a, b)| a * b).collect();
    let d_g: Vec<f64> = dc_total.iter().zip(i).map(|(a, b)| a * b).collect();
    let d_f: Vec<f64> = dc_total.iter().zip(c_prev).map(|(a, b)| a * b).collect();
    let dc_prev: Vec<f64> = dc_total.iter().zip(f).map(|(a, b)| a * b).collect();

    let xs = cache.x.as_slice();
    let hs = cache.h_prev.as_slice();
    let mut dx = vec![0.0; m];
    let mut dh_prev = vec![0.0; n];

    let mut dz = vec![0.0; n];
    cfg.cell_activation.backprop_slice(g, &d_g, &mut dz);
    grads.w_c.add_outer(&dz, xs);
    grads.u_c.add_outer(&dz, hs);
    for (b, d) in grads.b_c.as_mut_slice().iter_mut().zip(&dz) {
        *b += d;
    }
    params.w_c.mul_t_vec_acc(&dz, &mut dx);
    params.u_c.mul_t_vec_acc(&dz, &mut dh_prev);

    for (gate, upstream) in [
        (Gate::Input, &d_i),
        (Gate::Forget, &d_f),
        (Gate::Output, &d_o),
    ] {
        let y = cache.gate_output(gate).as_slice();
        cfg.gate_activation.backprop_slice(y, upstream, &mut dz);
        let p = params.gate(gate);
        let gp = grads.gate_mut(gate);
        if let (Some(w), Some(gw)) = (&p.w, gp.w.as_mut()) {
            gw.add_outer(&dz, xs);
            w.mul_t_vec_acc(&dz, &mut dx);
        }
        if let (Some(u), Some(gu)) = (&p.u, gp.u.as_mut()) {
            gu.add_outer(&dz, hs);
            u.mul_t_vec_acc(&dz, &mut dh_prev);
        }
        if let Some(gb) = gp.b.as_mut() {
            for (b, d) in gb.as_mut_slice().iter_mut().zip(&dz) {
                *b += d;
            }
        }
    }

    (
        Matrix::column(dh_prev),
        Matrix::column(dc_prev),
        Matrix::column(dx),
    )
}
