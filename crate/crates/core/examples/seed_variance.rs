//! Repeats one configuration over the eight study seeds and reports the
//! per-epoch spread of validation accuracy.

use slim_lstm::harness::{seed_variance, HarnessConfig, STUDY_SEEDS};
use slim_lstm::Result;

fn main() -> Result<()> {
    let mut harness = HarnessConfig::default();
    harness.seed_variance.epochs = 5;
    let task = harness.task.load()?;
    let report = seed_variance(&harness.seed_variance_config(), &task, &STUDY_SEEDS, 1)?;
    println!("{report}");
    Ok(())
}
