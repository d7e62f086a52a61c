//! Runs one sequence through each cell variant and prints the gates of the
//! last step. Slim3 gates depend on the bias only, so they never change.

use slim_lstm::cells::{init_cell, param_count, step_forward};
use slim_lstm::{ActivationKind, CellConfig, CellState, Matrix, Result, Rng, Variant};

fn main() -> Result<()> {
    let (m, n) = (3, 4);
    let mut rng = Rng::new(7);
    let xs: Vec<Matrix> = (0..5)
        .map(|_| Matrix::column((0..m).map(|_| rng.next_uniform() * 2.0 - 1.0).collect()))
        .collect();
    let cfg = CellConfig::with_cell_activation(ActivationKind::Tanh);

    for variant in Variant::ALL {
        let params = init_cell(variant, m, n, &mut Rng::new(1));
        let mut state = CellState::zeros(n);
        let mut last = None;
        for x in &xs {
            let (next, cache) = step_forward(&params, &cfg, x, &state)?;
            state = next;
            last = Some(cache);
        }
        let cache = last.expect("non-empty sequence");
        println!(
            "{} ({} parameters)",
            variant.name(),
            param_count(variant, m, n)
        );
        println!("  input gate  {:.4?}", cache.input_gate.as_slice());
        println!("  forget gate {:.4?}", cache.forget_gate.as_slice());
        println!("  output gate {:.4?}", cache.output_gate.as_slice());
        println!("  h_T         {:.4?}", state.h.as_slice());
    }
    Ok(())
}
