use crate::activations::ActivationKind;
use crate::cells::Variant;

/// Learning rates of the reference grid, in row order within each activation.
pub const REFERENCE_LEARNING_RATES: [f64; 3] = [2e-3, 1e-3, 5e-4];

/// Final validation accuracy (percent), rows `(activation, learning rate)` in
/// [`ActivationKind::ALL`] x [`REFERENCE_LEARNING_RATES`] order, columns in
/// [`Variant::ALL`] order.
const ACCURACY: [[f64; 4]; 15] = [
    [73.793, 73.718, 72.318, 74.469],
    [72.443, 72.668, 72.618, 71.768],
    [73.518, 72.343, 71.443, 70.643],
    [4.501, 4.376, 4.776, 72.668],
    [72.543, 72.468, 69.742, 73.218],
    [72.493, 71.218, 71.993, 70.893],
    [73.093, 72.343, 73.243, 71.818],
    [71.118, 70.943, 71.618, 70.993],
    [70.968, 69.792, 69.967, 68.392],
    [70.393, 60.965, 4.501, 26.132],
    [69.717, 66.317, 47.787, 58.690],
    [63.941, 49.862, 29.482, 48.012],
    [68.367, 68.467, 4.376, 73.043],
    [73.143, 73.618, 72.118, 71.943],
    [71.443, 72.593, 72.468, 73.118],
];

/// Final validation loss, same layout as [`ACCURACY`].
const LOSS: [[f64; 4]; 15] = [
    [1.26626372355, 1.17280639938, 1.30214396743, 1.19286979217],
    [1.2533884461, 1.24007106198, 1.25131325291, 1.28025298847],
    [1.12991302266, 1.25897071954, 1.25066449667, 1.25003132021],
    [2.99683079114, 2.9973659225, 2.99631883473, 1.25062232564],
    [1.12306529774, 1.17703753339, 1.22609648397, 1.1734144355],
    [1.11253687446, 1.34505273065, 1.14925828157, 1.29449143705],
    [1.17115093154, 1.18445872471, 1.18269565109, 1.23696543557],
    [1.29201206186, 1.30768913518, 1.27823424885, 1.2994762417],
    [1.25363427584, 1.29810960694, 1.20362862963, 1.34441118063],
    [1.17432751731, 1.26089545492, 2.99665749279, 2.14994023913],
    [1.2308979069, 1.30809664535, 1.65336642154, 1.38786871599],
    [1.29078156044, 1.61376436578, 1.91619378461, 1.62440377285],
    [1.22890987945, 1.30157855895, 2.99658317911, 1.11470258686],
    [1.10078433252, 1.1446512137, 1.0409039263, 1.32684082522],
    [1.27224681913, 1.14206915571, 1.10311798523, 1.20242762065],
];

/// Reference 100-epoch results of the full activation x learning-rate x
/// variant grid. Read-only; used for qualitative comparison only.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable;

impl ReferenceTable {
    fn row(activation: ActivationKind, learning_rate: f64) -> Option<usize> {
        let a = ActivationKind::ALL.iter().position(|&k| k == activation)?;
        let l = REFERENCE_LEARNING_RATES
            .iter()
            .position(|&r| (r - learning_rate).abs() <= 1e-12)?;
        Some(a * REFERENCE_LEARNING_RATES.len() + l)
    }

    fn column(variant: Variant) -> usize {
        Variant::ALL
            .iter()
            .position(|&v| v == variant)
            .expect("every variant is listed")
    }

    /// Accuracy in percent, or `None` for a learning rate outside the grid.
    pub fn accuracy(
        activation: ActivationKind,
        learning_rate: f64,
        variant: Variant,
    ) -> Option<f64> {
        Self::row(activation, learning_rate).map(|r| ACCURACY[r][Self::column(variant)])
    }

    pub fn loss(activation: ActivationKind, learning_rate: f64, variant: Variant) -> Option<f64> {
        Self::row(activation, learning_rate).map(|r| LOSS[r][Self::column(variant)])
    }

    /// `(activation, learning_rate)` keys in table row order.
    pub fn rows() -> impl Iterator<Item = (ActivationKind, f64)> {
        ActivationKind::ALL
            .into_iter()
            .flat_map(|a| REFERENCE_LEARNING_RATES.into_iter().map(move |l| (a, l)))
    }

    /// Accuracy grid as fractions in `[0, 1]`, laid out like a sweep summary.
    pub fn accuracy_fractions() -> Vec<[f64; 4]> {
        ACCURACY.iter().map(|row| row.map(|v| v / 100.0)).collect()
    }

    pub fn loss_grid() -> Vec<[f64; 4]> {
        LOSS.to_vec()
    }
}
