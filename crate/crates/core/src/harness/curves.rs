use std::fmt::Write as _;

use crate::train::EpochRecord;

pub const CURVE_HEADER: &str = "epoch,train_loss,train_acc,val_loss,val_acc,collapsed,nonfinite";

/// Per-epoch records as comma-separated text, one row per epoch.
pub fn curve_csv(records: &[EpochRecord]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.epoch,
            r.train_loss,
            r.train_acc,
            r.val_loss,
            r.val_acc,
            u8::from(r.collapsed),
            u8::from(r.nonfinite)
        );
    }
    out
}
