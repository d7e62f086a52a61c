//! Structural invariants of cells, layers, data and training, checked over
//! generated inputs.

use proptest::prelude::*;
use slim_lstm::activations::ActivationKind;
use slim_lstm::cells::{
    init_cell, param_count, step_forward, CellConfig, CellParams, CellState, Gate, Variant,
};
use slim_lstm::data::{
    build_vocab, encode, gen_synthetic, read_dataset, write_dataset, SyntheticKind,
    SyntheticTaskSpec,
};
use slim_lstm::layers::{sample_mask, ArchitectureSpec, BiLstmLayer, DropoutSpec, Mode, Model};
use slim_lstm::train::{detect_collapse, Optimizer, OptimizerConfig};
use slim_lstm::{Matrix, ParamSet, Rng};

fn uniform(rng: &mut Rng, scale: f64) -> f64 {
    (rng.next_uniform() * 2.0 - 1.0) * scale
}

fn randomize(params: &mut CellParams, rng: &mut Rng) {
    for t in params.tensors_mut() {
        t.as_mut_slice()
            .iter_mut()
            .for_each(|v| *v = uniform(rng, 1.0));
    }
}

fn inputs(len: usize, dim: usize, rng: &mut Rng) -> Vec<Matrix> {
    (0..len)
        .map(|_| Matrix::column((0..dim).map(|_| uniform(rng, 2.0)).collect()))
        .collect()
}

fn trajectory(params: &CellParams, cfg: &CellConfig, xs: &[Matrix]) -> Vec<CellState> {
    let mut state = CellState::zeros(params.hidden_dim());
    xs.iter()
        .map(|x| {
            state = step_forward(params, cfg, x, &state).unwrap().0;
            state.clone()
        })
        .collect()
}

fn same(a: &[CellState], b: &[CellState]) -> bool {
    a.iter().zip(b).all(|(s, t)| s.h == t.h && s.c == t.c)
}

fn zero_term(params: &mut CellParams, term: char) {
    for g in Gate::ALL {
        let p = params.gate_mut(g);
        let m = match term {
            'w' => p.w_mut(),
            'u' => p.u_mut(),
            _ => p.b_mut(),
        };
        m.expect("term present").fill(0.0);
    }
}

fn activation() -> impl Strategy<Value = ActivationKind> {
    prop::sample::select(ActivationKind::ALL.to_vec())
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeroing_a_gate_term_reproduces_the_slimmer_variant(
        seed in any::<u64>(),
        act in activation(),
        m in 1usize..5,
        n in 1usize..5,
    ) {
        let mut rng = Rng::new(seed);
        let cfg = CellConfig::with_cell_activation(act);
        let mut standard = init_cell(Variant::Standard, m, n, &mut rng);
        randomize(&mut standard, &mut rng);
        let xs = inputs(10, m, &mut rng);

        zero_term(&mut standard, 'w');
        let slim1 = standard.restrict(Variant::Slim1).unwrap();
        prop_assert!(same(&trajectory(&standard, &cfg, &xs), &trajectory(&slim1, &cfg, &xs)));

        let mut no_bias = slim1.clone();
        zero_term(&mut no_bias, 'b');
        let slim2 = no_bias.restrict(Variant::Slim2).unwrap();
        prop_assert!(same(&trajectory(&no_bias, &cfg, &xs), &trajectory(&slim2, &cfg, &xs)));

        let mut no_recurrent = slim1.clone();
        zero_term(&mut no_recurrent, 'u');
        let slim3 = no_recurrent.restrict(Variant::Slim3).unwrap();
        prop_assert!(same(&trajectory(&no_recurrent, &cfg, &xs), &trajectory(&slim3, &cfg, &xs)));
    }

    #[test]
    fn bias_only_gates_are_constant_over_time(seed in any::<u64>(), act in activation()) {
        let mut rng = Rng::new(seed);
        let mut params = init_cell(Variant::Slim3, 3, 4, &mut rng);
        randomize(&mut params, &mut rng);
        let cfg = CellConfig::with_cell_activation(act);
        let mut state = CellState::zeros(4);
        let mut first: Option<[Matrix; 3]> = None;
        for x in inputs(6, 3, &mut rng) {
            let (next, cache) = step_forward(&params, &cfg, &x, &state).unwrap();
            let gates = [cache.input_gate, cache.forget_gate, cache.output_gate];
            match &first {
                None => first = Some(gates),
                Some(f) => prop_assert_eq!(f, &gates),
            }
            state = next;
        }
    }

    #[test]
    fn gates_stay_in_the_open_unit_interval(seed in any::<u64>(), v in variant(), act in activation()) {
        let mut rng = Rng::new(seed);
        let params = init_cell(v, 3, 4, &mut rng);
        let cfg = CellConfig::with_cell_activation(act);
        let mut state = CellState::zeros(4);
        for x in inputs(10, 3, &mut rng) {
            let (next, cache) = step_forward(&params, &cfg, &x, &state).unwrap();
            for gate in [&cache.input_gate, &cache.forget_gate, &cache.output_gate] {
                prop_assert!(gate.as_slice().iter().all(|&g| g > 0.0 && g < 1.0));
            }
            if act == ActivationKind::Tanh {
                prop_assert!(next.h.as_slice().iter().all(|h| h.abs() < 1.0));
            }
            state = next;
        }
    }

    #[test]
    fn parameter_counts_match_the_allocated_tensors(m in 1usize..10, n in 1usize..10, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        for v in Variant::ALL {
            prop_assert_eq!(init_cell(v, m, n, &mut rng).scalar_count(), param_count(v, m, n));
        }
        let count = |v| param_count(v, m, n);
        prop_assert_eq!(count(Variant::Standard) - count(Variant::Slim1), 3 * n * m);
        prop_assert_eq!(count(Variant::Slim1) - count(Variant::Slim2), 3 * n);
        prop_assert_eq!(count(Variant::Slim1) - count(Variant::Slim3), 3 * n * n);
    }

    #[test]
    fn bilstm_doubles_the_per_direction_difference(m in 1usize..6, n in 1usize..6, seed in any::<u64>()) {
        let layer = |v| {
            let mut rng = Rng::new(seed);
            BiLstmLayer::new(v, m, n, CellConfig::default(), DropoutSpec::new(0.0, 0.0).unwrap(), &mut rng)
        };
        let slim1 = layer(Variant::Slim1).scalar_count();
        let slim3 = layer(Variant::Slim3).scalar_count();
        prop_assert_eq!(slim1 - slim3, 2 * 3 * n * n);
    }

    #[test]
    fn padding_only_input_gives_a_probability_vector(seed in any::<u64>(), v in variant(), act in activation()) {
        let spec = ArchitectureSpec { variant: v, cell_activation: act, ..ArchitectureSpec::default() };
        let model = Model::assemble(&spec, &mut Rng::new(seed)).unwrap();
        let total: usize = model.layer_param_counts().iter().map(|(_, c)| c).sum();
        prop_assert_eq!(total, model.scalar_count());
        let p = model.predict(&vec![0; spec.seq_len]).unwrap();
        prop_assert!(p.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimizer_state_covers_exactly_the_present_tensors(seed in any::<u64>(), v in variant()) {
        let spec = ArchitectureSpec { variant: v, ..ArchitectureSpec::default() }.without_dropout();
        let mut model = Model::assemble(&spec, &mut Rng::new(seed)).unwrap();
        let names = model.tensor_names();
        let mut grads = model.zeros_like();
        for t in grads.tensors_mut() {
            t.fill(1e-3);
        }
        let mut opt = Optimizer::new(OptimizerConfig::adam(1e-3));
        for _ in 0..3 {
            opt.step(&mut model, &grads).unwrap();
        }
        prop_assert_eq!(opt.buffer_count(), model.tensors().len());
        prop_assert_eq!(model.tensor_names(), names.clone());
        let has = |prefix: &str| names.iter().any(|n| n.contains(prefix));
        prop_assert_eq!(has("W_i"), v.gate_input_weights());
        prop_assert_eq!(has("U_i"), v.gate_recurrent_weights());
        prop_assert_eq!(has("b_i"), v.gate_bias());
    }

    #[test]
    fn monotone_accuracy_is_never_collapse(
        start in 0.0f64..1.0,
        steps in prop::collection::vec(0.0f64..0.1, 0..30),
        classes in 2usize..30,
    ) {
        let mut acc = vec![start];
        for s in steps {
            acc.push((acc[acc.len() - 1] + s).min(1.0));
        }
        prop_assert_eq!(detect_collapse(&acc, classes), None);
    }

    #[test]
    fn encoding_has_fixed_length_and_known_ids(
        words in prop::collection::vec("[a-e]{1,3}", 1..40),
        query in prop::collection::vec("[a-g]{1,3}", 0..40),
        max_size in 3usize..12,
        t_max in 1usize..20,
    ) {
        let vocab = build_vocab(&[words.join(" ")], max_size).unwrap();
        let ids = encode(&vocab, &query.join(" "), t_max);
        prop_assert_eq!(ids.len(), t_max);
        prop_assert!(ids.iter().all(|&id| id < vocab.len()));
    }

    #[test]
    fn majority_labels_lead_every_rival_class_symbol(seed in any::<u64>(), classes in 2usize..5) {
        let spec = SyntheticTaskSpec { alphabet: 5, classes, examples: 40, length: 12, seed, ..SyntheticTaskSpec::default() };
        let data = gen_synthetic(&spec).unwrap();
        for ex in &data.examples {
            let mut freq = vec![0usize; spec.vocab_size()];
            ex.tokens.iter().for_each(|&t| freq[t] += 1);
            let winner = freq[ex.label + 2];
            prop_assert!((2..classes + 2).all(|t| t == ex.label + 2 || freq[t] + 2 <= winner));
        }
    }

    #[test]
    fn echo_labels_follow_the_first_symbol(seed in any::<u64>(), classes in 2usize..4) {
        let spec = SyntheticTaskSpec {
            kind: SyntheticKind::FirstTokenEcho,
            alphabet: 8,
            classes,
            examples: 40,
            length: 10,
            seed,
        };
        let data = gen_synthetic(&spec).unwrap();
        for ex in &data.examples {
            let first = ex.tokens.iter().find(|&&t| t >= 2).copied().unwrap();
            prop_assert_eq!((first - 2) % classes, ex.label);
        }
    }

    #[test]
    fn cached_datasets_round_trip(seed in any::<u64>()) {
        let spec = SyntheticTaskSpec { examples: 30, seed, ..SyntheticTaskSpec::default() };
        let data = gen_synthetic(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.txt");
        write_dataset(&data, &path).unwrap();
        prop_assert_eq!(read_dataset(&path).unwrap(), data);
    }
}

/// A 10^4-draw mean lands outside 2% about once in 370 masks at rate 0.3, so
/// one stray seed out of twenty is tolerated and the pooled mean is held tighter.
#[test]
fn inverted_dropout_keeps_the_mean_within_two_percent() {
    let means: Vec<f64> = (0..20)
        .map(|seed| sample_mask(10_000, 0.3, &mut Rng::new(seed)).sum() / 10_000.0)
        .collect();
    let outside = means.iter().filter(|m| (*m - 1.0).abs() >= 0.02).count();
    assert!(outside <= 1, "means {means:?}");
    let pooled = means.iter().sum::<f64>() / means.len() as f64;
    assert!((pooled - 1.0).abs() < 0.005, "pooled mean {pooled}");
}

#[test]
fn eval_mode_ignores_dropout_rates() {
    let spec = ArchitectureSpec::default();
    let model = Model::assemble(&spec, &mut Rng::new(3)).unwrap();
    let tokens: Vec<usize> = (0..spec.seq_len).map(|t| t % spec.vocab_size).collect();
    let (a, _) = model.forward(&tokens, &mut Mode::Eval).unwrap();
    let mut quiet = model.clone();
    quiet.bilstm.dropout = DropoutSpec::new(0.0, 0.0).unwrap();
    quiet.blocks.iter_mut().for_each(|b| b.dropout.rate = 0.0);
    let (b, _) = quiet.forward(&tokens, &mut Mode::Eval).unwrap();
    assert_eq!(a, b);
}
