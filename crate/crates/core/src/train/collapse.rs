use super::EpochRecord;

/// Validation accuracy below which a run counts as collapsed:
/// `max(0.05, 1.5 / classes)`.
pub fn collapse_threshold(classes: usize) -> f64 {
    0.05f64.max(1.5 / classes as f64)
}

/// First epoch index from which validation accuracy stays below the collapse
/// threshold for the rest of the run, provided some earlier epoch reached at
/// least twice the threshold. A later recovery cancels the detection.
pub fn detect_collapse(val_accuracies: &[f64], classes: usize) -> Option<usize> {
    let threshold = collapse_threshold(classes);
    let start = val_accuracies
        .iter()
        .rposition(|&a| a.is_nan() || a >= threshold)
        .map_or(0, |i| i + 1);
    if start >= val_accuracies.len() {
        return None;
    }
    val_accuracies[..start]
        .iter()
        .any(|&a| a >= 2.0 * threshold)
        .then_some(start)
}

pub fn detect_collapse_in(records: &[EpochRecord], classes: usize) -> Option<usize> {
    let accs: Vec<f64> = records.iter().map(|r| r.val_acc).collect();
    detect_collapse(&accs, classes)
}
