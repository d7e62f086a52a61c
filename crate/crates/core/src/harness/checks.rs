use std::fmt;

use crate::activations::ActivationKind;
use crate::cells::{CellConfig, Variant};
use crate::error::Result;
use crate::layers::{ArchitectureSpec, Model};
use crate::linalg::Rng;
use crate::train::{grad_check_model, GradCheckReport, UnrolledCellProblem};

pub const CELL_EPS: f64 = 1e-5;
pub const CELL_TOLERANCE: f64 = 1e-5;
pub const MODEL_EPS: f64 = 1e-5;
pub const MODEL_TOLERANCE: f64 = 1e-4;

/// The desk-scale model with dropout disabled, plus one example, all drawn
/// from `seed`.
pub fn desk_model_case(seed: u64) -> Result<(Model, Vec<usize>, usize)> {
    let spec = ArchitectureSpec::default().without_dropout();
    let mut rng = Rng::new(seed);
    let model = Model::assemble(&spec, &mut rng.fork())?;
    let tokens = (0..spec.seq_len)
        .map(|_| rng.next_below(spec.vocab_size))
        .collect();
    let label = rng.next_below(spec.classes);
    Ok((model, tokens, label))
}

/// Gradient checks of every variant x cell activation on a 5-step unrolled
/// cell (m = 3, n = 4), and of the desk-scale model.
#[derive(Debug, Clone)]
pub struct GradCheckSuite {
    pub cells: Vec<(Variant, ActivationKind, GradCheckReport)>,
    pub model: GradCheckReport,
}

impl GradCheckSuite {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|(_, _, r)| r.passed()) && self.model.passed()
    }
}

pub fn run_grad_check_suite(seed: u64) -> Result<GradCheckSuite> {
    let mut cells = Vec::new();
    for variant in Variant::ALL {
        for activation in ActivationKind::ALL {
            let problem = UnrolledCellProblem::random(
                variant,
                CellConfig::with_cell_activation(activation),
                3,
                4,
                5,
                seed,
            );
            cells.push((
                variant,
                activation,
                problem.check(CELL_EPS, CELL_TOLERANCE)?,
            ));
        }
    }
    let (model, tokens, label) = desk_model_case(seed)?;
    let model = grad_check_model(&model, &tokens, label, MODEL_EPS, MODEL_TOLERANCE)?;
    Ok(GradCheckSuite { cells, model })
}

impl fmt::Display for GradCheckSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (variant, activation, report) in &self.cells {
            writeln!(
                f,
                "{} cell {:<6} {:<8} max rel err {:.2e} over {} scalars",
                if report.passed() { "ok  " } else { "FAIL" },
                variant.name(),
                activation.name(),
                report.max_rel_error(),
                report.scalars_checked()
            )?;
        }
        write!(
            f,
            "{} desk-scale model max rel err {:.2e} over {} scalars, {} violations",
            if self.model.passed() { "ok  " } else { "FAIL" },
            self.model.max_rel_error(),
            self.model.scalars_checked(),
            self.model.violations.len()
        )?;
        for v in &self.model.violations {
            write!(f, "\n     {v:?}")?;
        }
        Ok(())
    }
}
