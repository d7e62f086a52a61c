//! Central finite differences against the analytic BPTT gradients: first a
//! single unrolled cell, then every layer of the desk-scale classifier.

use slim_lstm::harness::{desk_model_case, run_grad_check_suite, MODEL_EPS, MODEL_TOLERANCE};
use slim_lstm::train::{grad_check_model, UnrolledCellProblem};
use slim_lstm::{ActivationKind, CellConfig, Result, Variant};

fn main() -> Result<()> {
    let problem = UnrolledCellProblem::random(
        Variant::Slim1,
        CellConfig::with_cell_activation(ActivationKind::Relu),
        3,
        4,
        5,
        42,
    );
    let report = problem.check(1e-5, 1e-5)?;
    println!(
        "slim1/relu cell: max rel err {:.2e} over {} scalars, passed: {}",
        report.max_rel_error(),
        report.scalars_checked(),
        report.passed()
    );

    let (model, tokens, label) = desk_model_case(0)?;
    let report = grad_check_model(&model, &tokens, label, MODEL_EPS, MODEL_TOLERANCE)?;
    for t in &report.tensors {
        println!("  {t:?}");
    }

    println!("\nfull suite:\n{}", run_grad_check_suite(0)?);
    Ok(())
}
