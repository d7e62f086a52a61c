//! A reduced activation x learning-rate x variant sweep, written to an output
//! directory and compared with the reference grid's orderings.
//!
//! ```text
//! cargo run --release --example sweep_grid -- /tmp/sweep
//! ```

use std::path::PathBuf;

use slim_lstm::harness::{run_sweep, HarnessConfig, SweepGrid};
use slim_lstm::{ActivationKind, Result, Variant};

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("slim-lstm-sweep"));
    let mut spec = HarnessConfig::default().sweep_spec();
    spec.grid = SweepGrid {
        variants: Variant::ALL.to_vec(),
        activations: vec![ActivationKind::Tanh, ActivationKind::Softmax],
        learning_rates: vec![1e-3],
        epochs: 3,
        seeds: vec![0],
    };
    let outcome = run_sweep(&spec, &out, 1)?;
    print!("{}", outcome.accuracy.to_csv());
    for run in &outcome.runs {
        let flagged = run
            .records
            .iter()
            .filter(|r| r.nonfinite || r.collapsed)
            .count();
        println!("{} -> {flagged} flagged epochs", run.curve_file.display());
    }
    println!("{} files in {}", outcome.files.len(), out.display());
    Ok(())
}
