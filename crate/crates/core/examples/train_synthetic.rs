//! Trains each variant on the majority-token task and prints its learning
//! curve.
//!
//! ```text
//! cargo run --release --example train_synthetic -- 20
//! ```

use slim_lstm::data::{gen_synthetic, SyntheticTaskSpec, TaskSpec};
use slim_lstm::layers::ArchitectureSpec;
use slim_lstm::train::{fit, ExperimentConfig};
use slim_lstm::{ActivationKind, Result, Variant};

fn main() -> Result<()> {
    let epochs = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10);
    let task = SyntheticTaskSpec::default();
    let data = gen_synthetic(&task)?;
    println!(
        "{} sequences of {} tokens, {} classes",
        data.len(),
        data.t_max,
        data.class_count
    );

    for variant in Variant::ALL {
        let mut config = ExperimentConfig::new(variant, ActivationKind::Tanh, 1e-3, epochs, 0);
        config.task = TaskSpec::Synthetic(task.clone());
        config.architecture = ArchitectureSpec::compact();
        println!("\n{}", variant.name());
        println!("epoch  train_loss  train_acc  val_loss  val_acc");
        for r in fit(&config, &data)? {
            println!(
                "{:>5}  {:>10.4}  {:>9.3}  {:>8.4}  {:>7.3}",
                r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc
            );
        }
    }
    Ok(())
}
