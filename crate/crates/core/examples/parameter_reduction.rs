//! Parameter and per-step operation counts of every variant, at the small
//! cell size and at a realistic layer size.

use slim_lstm::harness::report_reduction;
use slim_lstm::Result;

fn main() -> Result<()> {
    for (m, n) in [(3, 4), (100, 64), (300, 128)] {
        println!("{}", report_reduction(m, n)?);
    }
    Ok(())
}
