use xsl_core::align::{
    adam_step, backward, forward_losses, identity_retention, perplexity, train, AlignObjective,
    Parameters, TrainingGraph, GROUP_NAMES,
};
use xsl_core::{CrossModalGraph, CrossWeightMode, Episode, RepresentationModel, TrainConfig};

/// 5 objects, 8 words; word 7 never occurs.
fn toy_graph() -> CrossModalGraph {
    let mut g = CrossModalGraph::new(5, 8);
    let episodes = [
        (vec![0, 1], vec![0, 1, 5]),
        (vec![0], vec![0, 6]),
        (vec![1, 2], vec![1, 2, 2, 5]),
        (vec![2, 3], vec![3, 2, 6]),
        (vec![3, 4], vec![4, 3]),
        (vec![4], vec![4, 5, 6]),
        (vec![0, 4], vec![]),
    ];
    for (o, w) in episodes {
        g.ingest_episode(&Episode::new(o, w), 3).unwrap();
    }
    g
}

fn toy_config() -> TrainConfig {
    TrainConfig {
        dim: 6,
        hidden: 5,
        delta: 0.3,
        layers: 3,
        lambda_align: 1.6,
        seed: 7,
        init_scale: 0.5,
        steps: 300,
        lr: 0.01,
        ..TrainConfig::default()
    }
}

fn setup(cfg: &TrainConfig) -> (TrainingGraph, RepresentationModel) {
    let tg = TrainingGraph::new(&toy_graph(), CrossWeightMode::Product);
    let model = RepresentationModel::new(5, 8, cfg);
    (tg, model)
}

#[test]
fn analytic_gradients_match_central_differences() {
    let cfg = toy_config();
    let (tg, model) = setup(&cfg);
    let objective = AlignObjective::new(&tg, cfg.delta, cfg.layers, cfg.lambda_align);
    let (_, analytic) = objective.losses_and_gradients(&model.params);

    let h = 1e-4;
    let mut numeric = model.params.zeros_like();
    let mut probe = model.params.clone();
    for g in 0..GROUP_NAMES.len() {
        let len = probe.groups()[g].len();
        for i in 0..len {
            let orig = probe.groups()[g][i];
            probe.groups_mut()[g][i] = orig + h;
            let up = objective.losses(&probe).total;
            probe.groups_mut()[g][i] = orig - h;
            let down = objective.losses(&probe).total;
            probe.groups_mut()[g][i] = orig;
            numeric.groups_mut()[g][i] = (up - down) / (2.0 * h);
        }
    }
    for (g, name) in GROUP_NAMES.iter().enumerate() {
        let (a, n) = (analytic.groups()[g], numeric.groups()[g]);
        let diff = a.iter().zip(n).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let scale = a.iter().chain(n).map(|x| x.abs()).fold(0.0, f64::max);
        let rel = if scale == 0.0 { 0.0 } else { diff / scale };
        assert!(rel < 1e-4, "{name}: relative error {rel:e}");
    }
}

#[test]
fn total_is_sum_of_components() {
    let cfg = toy_config();
    let (tg, model) = setup(&cfg);
    let l = forward_losses(&model, &tg, &cfg).unwrap();
    assert!((l.total - (l.ss_objects + l.ss_words + cfg.lambda_align * l.align)).abs() < 1e-9);
    assert!(l.align > 0.0);

    let no_align = TrainConfig { lambda_align: 0.0, ..cfg };
    let l0 = forward_losses(&model, &tg, &no_align).unwrap();
    assert_eq!(l0.total, l0.ss_objects + l0.ss_words);
}

#[test]
fn empty_cross_support_has_no_alignment_loss() {
    let mut g = CrossModalGraph::new(2, 3);
    g.ingest_episode(&Episode::new(vec![0, 1], vec![]), 2).unwrap();
    g.ingest_episode(&Episode::new(vec![], vec![0, 1, 2]), 2).unwrap();
    let tg = TrainingGraph::new(&g, CrossWeightMode::Product);
    assert!(tg.cross.is_empty());
    let cfg = toy_config();
    let model = RepresentationModel::new(2, 3, &cfg);
    assert_eq!(forward_losses(&model, &tg, &cfg).unwrap().align, 0.0);
}

#[test]
fn identical_aggregated_vectors_do_not_contribute() {
    // one object, one word, always together: e = 1
    let mut g = CrossModalGraph::new(1, 1);
    g.ingest_episode(&Episode::new(vec![0], vec![0]), 1).unwrap();
    let tg = TrainingGraph::new(&g, CrossWeightMode::Product);
    assert_eq!(tg.cross, vec![(0, 0, 1.0)]);
    let cfg = toy_config();
    let mut model = RepresentationModel::new(1, 1, &cfg);
    model.params.words = model.params.objects.clone();
    assert!(forward_losses(&model, &tg, &cfg).unwrap().align.abs() < 1e-15);
}

#[test]
fn zero_delta_equals_no_aggregation() {
    let cfg = TrainConfig { delta: 0.0, ..toy_config() };
    let (tg, model) = setup(&cfg);
    let flat = TrainConfig { layers: 0, ..cfg.clone() };
    let a = backward(&model, &tg, &cfg).unwrap();
    let b = backward(&model, &tg, &flat).unwrap();
    assert_eq!(a, b);
}

#[test]
fn word_without_cross_edges_gets_no_alignment_gradient() {
    let cfg = toy_config();
    let (tg, model) = setup(&cfg);
    assert!(tg.cross.iter().all(|&(_, w, _)| w != 7));
    let with = backward(&model, &tg, &cfg).unwrap();
    let without = backward(&model, &tg, &TrainConfig { lambda_align: 0.0, ..cfg }).unwrap();
    assert_eq!(with.words.row(7), without.words.row(7));
}

#[test]
fn zero_learning_rate_leaves_parameters() {
    let cfg = toy_config();
    let (tg, mut model) = setup(&cfg);
    let before = model.params.clone();
    let grad = backward(&model, &tg, &cfg).unwrap();
    adam_step(&mut model, &grad, 0.0, cfg.weight_decay);
    assert_eq!(model.params, before);
    assert_eq!(model.adam.step, 1);
}

#[test]
fn weight_decay_alone_shrinks_parameters() {
    let cfg = toy_config();
    let (_, mut model) = setup(&cfg);
    let before = model.params.clone();
    let zero: Parameters = before.zeros_like();
    adam_step(&mut model, &zero, 0.1, 0.5);
    for (a, b) in model.params.groups().iter().zip(before.groups()) {
        for (x, y) in a.iter().zip(b) {
            assert_eq!(*x, y - 0.1 * 0.5 * y);
        }
    }
}

#[test]
fn training_is_mostly_monotone() {
    let cfg = TrainConfig { lr: 0.001, steps: 500, ..toy_config() };
    let (tg, mut model) = setup(&cfg);
    let trace = train(&mut model, &tg, &cfg).unwrap();
    assert_eq!(trace.len(), cfg.steps);
    let down = trace.windows(2).filter(|w| w[1].total <= w[0].total).count();
    assert!(
        down as f64 >= 0.9 * (trace.len() - 1) as f64,
        "{down}/{} decreasing steps",
        trace.len() - 1
    );
}

#[test]
fn training_is_bit_reproducible() {
    let cfg = toy_config();
    let run = || {
        let (tg, mut model) = setup(&cfg);
        let trace = train(&mut model, &tg, &cfg).unwrap();
        (model, trace)
    };
    assert_eq!(run(), run());
}

#[test]
fn perplexity_bounds() {
    let cfg = toy_config();
    let (tg, mut model) = setup(&cfg);
    // zero heads give uniform outputs
    for head in [&mut model.params.object_head, &mut model.params.word_head] {
        head.w1.fill(0.0);
        head.w2.fill(0.0);
    }
    let p = perplexity(&model, &tg, &cfg).unwrap();
    assert!((p.objects - 5.0).abs() < 1e-12);
    assert!((p.words - 8.0).abs() < 1e-12);

    let (tg, mut model) = setup(&cfg);
    let trained = TrainConfig { steps: 1500, ..cfg.clone() };
    train(&mut model, &tg, &trained).unwrap();
    let p = perplexity(&model, &tg, &cfg).unwrap();
    assert!(p.objects >= 1.0 && p.words >= 1.0);
    assert!(p.objects < 1.1 && p.words < 1.1, "{p:?}");
    assert_eq!(identity_retention(&model, &tg, &cfg).unwrap(), 1.0);
}

#[test]
fn shape_mismatch_is_rejected() {
    let cfg = toy_config();
    let (tg, _) = setup(&cfg);
    let model = RepresentationModel::new(4, 8, &cfg);
    assert!(forward_losses(&model, &tg, &cfg).is_err());
}
