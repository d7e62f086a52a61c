//! Finite-difference checks of every layer's backward pass, input gradients
//! included, and of the cell under every gate/cell activation pairing.

use slim_lstm::activations::ActivationKind;
use slim_lstm::cells::{CellConfig, Variant};
use slim_lstm::layers::{
    BiLstmLayer, Conv1DLayer, DenseLayer, DropoutSpec, EmbeddingLayer, MaxPool1DLayer, Mode,
};
use slim_lstm::train::{check_gradients, relative_error, UnrolledCellProblem};
use slim_lstm::{Matrix, ParamSet, Rng};

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-5;

fn col(n: usize, rng: &mut Rng) -> Matrix {
    Matrix::column((0..n).map(|_| rng.next_uniform() * 2.0 - 1.0).collect())
}

fn seq(len: usize, dim: usize, rng: &mut Rng) -> Vec<Matrix> {
    (0..len).map(|_| col(dim, rng)).collect()
}

fn zeroed<P: ParamSet + Clone>(p: &P) -> P {
    let mut g = p.clone();
    g.zero();
    g
}

fn dot(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .sum()
}

fn dot_seq(a: &[Matrix], b: &[Matrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| dot(x, y)).sum()
}

/// Max relative error between `analytic` and central differences of `loss`
/// with respect to each input scalar.
fn input_check(
    input: &[Matrix],
    analytic: &[Matrix],
    mut loss: impl FnMut(&[Matrix]) -> f64,
) -> f64 {
    let mut probe = input.to_vec();
    let mut worst = 0.0f64;
    for t in 0..input.len() {
        for j in 0..input[t].len() {
            let original = probe[t].as_slice()[j];
            probe[t].as_mut_slice()[j] = original + EPS;
            let plus = loss(&probe);
            probe[t].as_mut_slice()[j] = original - EPS;
            let minus = loss(&probe);
            probe[t].as_mut_slice()[j] = original;
            worst = worst.max(relative_error(
                analytic[t].as_slice()[j],
                (plus - minus) / (2.0 * EPS),
            ));
        }
    }
    worst
}

#[test]
fn dense_layer_matches_finite_differences() {
    for act in [
        ActivationKind::Tanh,
        ActivationKind::Sigmoid,
        ActivationKind::Softmax,
        ActivationKind::Linear,
    ] {
        let mut rng = Rng::new(1);
        let layer = DenseLayer::glorot(5, 3, act, &mut rng);
        let x = col(5, &mut rng);
        let r = col(3, &mut rng);
        let (_, cache) = layer.forward(&x).unwrap();
        let mut grads = zeroed(&layer);
        let dx = layer.backward_into(&cache, &r, &mut grads);
        let report = check_gradients(&layer, &grads, EPS, TOL, |l| {
            dot(&l.forward(&x).unwrap().0, &r)
        });
        assert!(report.passed(), "{act}: {report}");
        let worst = input_check(std::slice::from_ref(&x), &[dx], |xs| {
            dot(&layer.forward(&xs[0]).unwrap().0, &r)
        });
        assert!(worst < TOL, "{act}: input {worst}");
    }
}

#[test]
fn conv_layer_matches_finite_differences() {
    let mut rng = Rng::new(2);
    let layer = Conv1DLayer::glorot(3, 4, 3, ActivationKind::Tanh, &mut rng);
    let input = seq(7, 3, &mut rng);
    let r = seq(5, 4, &mut rng);
    let (out, cache) = layer.forward(&input).unwrap();
    assert_eq!(out.len(), 5);
    let mut grads = zeroed(&layer);
    let d_in = layer.backward_into(&cache, &r, &mut grads);
    let report = check_gradients(&layer, &grads, EPS, TOL, |l| {
        dot_seq(&l.forward(&input).unwrap().0, &r)
    });
    assert!(report.passed(), "{report}");
    let worst = input_check(&input, &d_in, |xs| {
        dot_seq(&layer.forward(xs).unwrap().0, &r)
    });
    assert!(worst < TOL, "input {worst}");
}

#[test]
fn maxpool_routes_to_argmax() {
    let mut rng = Rng::new(3);
    let pool = MaxPool1DLayer::new(2);
    let input = seq(7, 3, &mut rng);
    let r = seq(3, 3, &mut rng);
    let (_, cache) = pool.forward(&input);
    let d_in = pool.backward(&cache, &r);
    assert_eq!(d_in.len(), 7);
    assert!(
        d_in[6].as_slice().iter().all(|&v| v == 0.0),
        "remainder gets no gradient"
    );
    let worst = input_check(&input, &d_in, |xs| dot_seq(&pool.forward(xs).0, &r));
    assert!(worst < TOL, "{worst}");
}

#[test]
fn embedding_gradient_accumulates_repeated_tokens() {
    let mut rng = Rng::new(4);
    let layer = EmbeddingLayer::glorot(6, 3, &mut rng);
    let tokens = [1, 4, 1, 0];
    let r = seq(4, 3, &mut rng);
    let mut grads = zeroed(&layer);
    layer.backward_into(&tokens, &r, &mut grads);
    let report = check_gradients(&layer, &grads, EPS, TOL, |l| {
        dot_seq(&l.forward(&tokens).unwrap(), &r)
    });
    assert!(report.passed(), "{report}");
    let frozen = EmbeddingLayer::new(layer.table.clone(), false);
    assert_eq!(frozen.scalar_count(), 0);
}

#[test]
fn bilstm_small_matches_finite_differences_in_every_variant() {
    for variant in Variant::ALL {
        let mut rng = Rng::new(5);
        let layer = BiLstmLayer::new(
            variant,
            2,
            2,
            CellConfig::default(),
            DropoutSpec::NONE,
            &mut rng,
        );
        let input = seq(3, 2, &mut rng);
        let r = col(4, &mut rng);
        let (_, cache) = layer.forward(&input, &mut Mode::Eval).unwrap();
        let mut grads = layer.zeros_like();
        let d_in = layer.backward_into(&cache, &r, &mut grads);
        let loss =
            |l: &BiLstmLayer, xs: &[Matrix]| dot(&l.forward(xs, &mut Mode::Eval).unwrap().0, &r);
        let report = check_gradients(&layer, &grads, EPS, TOL, |l| loss(l, &input));
        assert!(report.passed(), "{variant:?}: {report}");
        let worst = input_check(&input, &d_in, |xs| loss(&layer, xs));
        assert!(worst < TOL, "{variant:?} input {worst}");
    }
}

#[test]
fn bilstm_backward_replays_dropout_masks() {
    let mut rng = Rng::new(6);
    let dropout = DropoutSpec::new(0.25, 0.4).unwrap();
    let layer = BiLstmLayer::new(
        Variant::Standard,
        3,
        4,
        CellConfig::default(),
        dropout,
        &mut rng,
    );
    let input = seq(5, 3, &mut rng);
    let r = col(8, &mut rng);
    let mask_rng = Rng::new(99);
    let (_, cache) = layer
        .forward(&input, &mut Mode::Train(&mut mask_rng.clone()))
        .unwrap();
    let mut grads = layer.zeros_like();
    layer.backward_into(&cache, &r, &mut grads);
    let report = check_gradients(&layer, &grads, EPS, TOL, |l| {
        dot(
            &l.forward(&input, &mut Mode::Train(&mut mask_rng.clone()))
                .unwrap()
                .0,
            &r,
        )
    });
    assert!(report.passed(), "{report}");
}

#[test]
fn bilstm_directions_have_no_cross_gradient() {
    let mut rng = Rng::new(7);
    let n = 3;
    let layer = BiLstmLayer::new(
        Variant::Slim1,
        2,
        n,
        CellConfig::default(),
        DropoutSpec::NONE,
        &mut rng,
    );
    let input = seq(4, 2, &mut rng);
    let (_, cache) = layer.forward(&input, &mut Mode::Eval).unwrap();
    for (half, zero_prefix) in [(0..n, "bwd."), (n..2 * n, "fwd.")] {
        let mut d = Matrix::zeros(2 * n, 1);
        for i in half {
            d.set(i, 0, 1.0);
        }
        let mut grads = layer.zeros_like();
        layer.backward_into(&cache, &d, &mut grads);
        for (name, t) in grads.named_tensors() {
            if name.starts_with(zero_prefix) {
                assert!(t.as_slice().iter().all(|&v| v == 0.0), "{name}");
            }
        }
    }
}

#[test]
fn single_step_standard_and_slim3_gradients() {
    for seed in 0..5 {
        let report =
            UnrolledCellProblem::random(Variant::Standard, CellConfig::default(), 3, 4, 1, seed)
                .check(EPS, 1e-6)
                .unwrap();
        assert!(report.passed(), "{report}");
        let slim3 =
            UnrolledCellProblem::random(Variant::Slim3, CellConfig::default(), 3, 4, 1, seed);
        let report = slim3.check(EPS, 1e-6).unwrap();
        assert!(report.passed(), "{report}");
        let names = slim3.gradient().unwrap().tensor_names();
        assert!(names
            .iter()
            .all(|n| !n.starts_with("W_i") && !n.starts_with("U_f")));
        assert!(names.contains(&"b_o".to_string()));
    }
}

#[test]
fn unrolled_cell_under_every_cell_activation() {
    for variant in Variant::ALL {
        for cell_activation in ActivationKind::ALL {
            let cfg = CellConfig::with_cell_activation(cell_activation);
            for seed in 0..3 {
                let report = UnrolledCellProblem::random(variant, cfg, 3, 4, 5, seed)
                    .check(EPS, TOL)
                    .unwrap();
                assert!(
                    report.passed(),
                    "{variant:?} {cell_activation} seed {seed}: {report}"
                );
            }
        }
    }
}

#[test]
fn remaining_mismatches_are_round_off() {
    // gradients below ~1e-6 can miss the relative tolerance by central
    // difference noise alone; the absolute gap must stay at that level
    for seed in 0..100 {
        for variant in Variant::ALL {
            for cell_activation in ActivationKind::ALL {
                let cfg = CellConfig::with_cell_activation(cell_activation);
                let report = UnrolledCellProblem::random(variant, cfg, 3, 4, 5, seed)
                    .check(EPS, TOL)
                    .unwrap();
                for v in &report.violations {
                    assert!(
                        (v.analytic - v.numeric).abs() < 1e-10,
                        "seed {seed} {variant:?} {cell_activation}: {v:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn unrolled_cell_under_every_gate_activation_pairing() {
    // unbounded gates can push single gradients to ~1e-12, where the
    // central difference itself carries ~1e-5 relative noise
    const PAIRING_TOL: f64 = 1e-4;
    for variant in Variant::ALL {
        for gate_activation in ActivationKind::ALL {
            for cell_activation in ActivationKind::ALL {
                let cfg = CellConfig {
                    gate_activation,
                    cell_activation,
                };
                let report = UnrolledCellProblem::random(variant, cfg, 3, 4, 5, 11)
                    .check(EPS, PAIRING_TOL)
                    .unwrap();
                assert!(
                    report.passed(),
                    "{variant:?} {gate_activation}/{cell_activation}: {report}"
                );
            }
        }
    }
}
