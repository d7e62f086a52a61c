//! The embedded reference grid: per-activation and per-variant means and the
//! ordinal claims they support.

use slim_lstm::harness::{Grid, OrdinalClaim, ReferenceTable};
use slim_lstm::{ActivationKind, Variant};

fn main() {
    let lr = 2e-3;
    for act in ActivationKind::ALL {
        let row: Vec<String> = Variant::ALL
            .iter()
            .map(|&v| format!("{:>7.3}", ReferenceTable::accuracy(act, lr, v).unwrap()))
            .collect();
        println!("{:<8} lr {lr:e}: {}", act.name(), row.join(" "));
    }

    let grid = Grid::reference();
    println!("\nmean accuracy by activation");
    for (a, m) in grid.activation_means() {
        println!("  {:<8} {:.2}%", a.name(), 100.0 * m);
    }
    println!("mean accuracy by variant");
    for (v, m) in grid.variant_means() {
        println!("  {:<8} {:.2}%", v.name(), 100.0 * m);
    }
    println!();
    for claim in OrdinalClaim::REFERENCE {
        println!(
            "[{}] {claim}",
            if claim.holds(&grid) { "holds" } else { "fails" }
        );
    }
}
