use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgbench_core::synth::{generate, GeneratorConfig};
use sgbench_core::{DatasetName, EntityId, RelationId, Split, Subgraph, Triple};
use sgbench_models::eval::compression_report;
use sgbench_models::structure::{sigmoid, Params};
use sgbench_models::*;

fn model(kind: ModelKind, dim: usize, n_e: usize, n_r: usize, biases: bool, seed: u64) -> StructureModel {
    let mut spec = ModelSpec::new(kind, dim, n_e, n_r);
    spec.biases = biases;
    spec.init = InitScheme::Normal;
    let mut m = StructureModel::new(spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    if biases {
        // Non-zero biases so their gradients are exercised.
        let p = m.params_mut();
        for (i, b) in p.entity_bias.iter_mut().chain(p.relation_bias.iter_mut()).enumerate() {
            *b = 0.3 * ((i as f64 * 1.7).sin());
        }
    }
    m
}

fn flat(p: &Params) -> Vec<f64> {
    p.tensors().iter().flat_map(|t| t.iter().copied()).collect()
}

fn set_flat(p: &mut Params, i: usize, value: f64) {
    let mut i = i;
    for t in p.tensors_mut() {
        if i < t.len() {
            t[i] = value;
            return;
        }
        i -= t.len();
    }
    unreachable!()
}

fn graph(triples: &[(u32, u32, u32)]) -> Subgraph {
    Subgraph::new(triples.iter().map(|&(s, r, o)| Triple::new(EntityId(s), RelationId(r), EntityId(o))).collect()).unwrap()
}

fn kind_strategy() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Transe), Just(ModelKind::Distmult), Just(ModelKind::Complex)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Analytic gradients of the codelength against central differences.
    #[test]
    fn gradient_matches_finite_differences(
        kind in kind_strategy(),
        dim in 1usize..=8,
        biases in any::<bool>(),
        seed in any::<u64>(),
        edges in prop::collection::btree_set((0u32..4, 0u32..2, 0u32..4), 1..6),
    ) {
        let m = model(kind, dim, 5, 2, biases, seed);
        let g = graph(&edges.into_iter().collect::<Vec<_>>());
        let mut entities = g.entities();
        if !entities.contains(&EntityId(4)) {
            entities.push(EntityId(4));
        }
        let mut grad = Params::zeros(m.spec());
        m.loss_and_grad(&g, &entities, &mut grad).unwrap();
        let analytic = flat(&grad);
        let base = flat(m.params());
        let h = 1e-6;
        let mut numeric = Vec::with_capacity(base.len());
        for i in 0..base.len() {
            let mut plus = m.clone();
            set_flat(plus.params_mut(), i, base[i] + h);
            let mut minus = m.clone();
            set_flat(minus.params_mut(), i, base[i] - h);
            let fp = plus.structure_codelength(&g, &entities).unwrap();
            let fm = minus.structure_codelength(&g, &entities).unwrap();
            numeric.push((fp - fm) / (2.0 * h));
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|a| a * a).sum::<f64>().sqrt());
        prop_assert!(diff / scale.max(1e-8) < 1e-4, "relative error {} for {kind}", diff / scale.max(1e-8));
    }

    /// ComplEx with zero imaginary parts is DistMult on the real parts.
    #[test]
    fn complex_without_imaginary_parts_is_distmult(
        dim in 1usize..=16,
        seed in any::<u64>(),
        edges in prop::collection::btree_set((0u32..5, 0u32..3, 0u32..5), 1..8),
    ) {
        let dm = model(ModelKind::Distmult, dim, 5, 3, false, seed);
        let mut cx = StructureModel::from_parts(
            ModelSpec::new(ModelKind::Complex, dim, 5, 3),
            Params::zeros(&ModelSpec::new(ModelKind::Complex, dim, 5, 3)),
        ).unwrap();
        let src = dm.params();
        let dst = cx.params_mut();
        for (rows_src, rows_dst) in [(&src.entity, &mut dst.entity), (&src.relation, &mut dst.relation)] {
            for (row_s, row_d) in rows_src.chunks(dim).zip(rows_dst.chunks_mut(2 * dim)) {
                row_d[..dim].copy_from_slice(row_s);
            }
        }
        let g = graph(&edges.into_iter().collect::<Vec<_>>());
        let e = g.entities();
        let a = dm.structure_loglik(&g, &e).unwrap();
        let b = cx.structure_loglik(&g, &e).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    /// Every candidate probability lies strictly inside (0, 1) for moderate scores.
    #[test]
    fn candidate_probabilities_are_proper(kind in kind_strategy(), seed in any::<u64>()) {
        let m = model(kind, 4, 6, 2, true, seed);
        let ids: Vec<EntityId> = (0..6).map(EntityId).collect();
        for (_, p) in m.candidate_probabilities(&ids).unwrap() {
            prop_assert!(p > 0.0 && p < 1.0);
        }
    }
}

/// With two entities and one relation there are four candidates, so every
/// possible structure can be enumerated and scored by hand.
#[test]
fn structure_loglik_matches_exhaustive_enumeration() {
    for kind in ModelKind::TRAINABLE {
        for seed in 0..10 {
            let m = model(kind, 3, 2, 1, seed % 2 == 0, seed);
            let candidates: Vec<Triple> = [(0, 0), (0, 1), (1, 0), (1, 1)]
                .iter()
                .map(|&(s, o)| Triple::new(EntityId(s), RelationId(0), EntityId(o)))
                .collect();
            let p: Vec<f64> = candidates.iter().map(|t| 1.0 / (1.0 + (-m.score(t)).exp())).collect();
            let entities = [EntityId(0), EntityId(1)];
            let mut total = 0.0;
            for mask in 0u32..16 {
                let present: Vec<Triple> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| candidates[i]).collect();
                let oracle: f64 = (0..4).map(|i| if mask >> i & 1 == 1 { p[i] } else { 1.0 - p[i] }).product();
                total += oracle;
                let g = Subgraph::new(present).unwrap();
                let ll = m.structure_loglik(&g, &entities).unwrap();
                assert_relative_eq!(ll, oracle.log2(), max_relative = 1e-9);
            }
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn sigmoid_of_score_is_prob() {
    let m = model(ModelKind::Complex, 4, 3, 2, true, 5);
    let t = Triple::new(EntityId(2), RelationId(1), EntityId(0));
    assert_eq!(m.prob(&t), sigmoid(m.score(&t)));
}

fn toy_paths(n_train: usize) -> sgbench_core::DatasetBundle {
    generate(&GeneratorConfig::new(DatasetName::SynPaths).with_counts(n_train, 100, 100)).unwrap()
}

#[test]
fn codelength_additivity_per_graph() {
    let b = toy_paths(200);
    let em = EntityModel::fit(&b.train, 49, EntityMode::Slot, None);
    for kind in ModelKind::ALL {
        let sm = match kind {
            ModelKind::Random => StructureModel::random(49, 3),
            k => model(k, 8, 49, 3, true, 3),
        };
        let r = compression_report(&b, Split::Test, &em, &sm).unwrap();
        for (g, c) in b.test.iter().zip(&r.per_graph) {
            let s = sm.structure_codelength(g, &g.entities()).unwrap();
            let e = em.codelength(g);
            assert!(((s + e) - c.total_bits).abs() <= 1e-9 * c.total_bits);
            assert_eq!(c.structure_bits, s);
        }
        assert_relative_eq!(r.total_bits, r.structure_bits + r.entity_bits, max_relative = 1e-9);
    }
}

#[test]
fn toy_training_beats_random_and_loss_decreases() {
    let b = toy_paths(200);
    let mut c = TrainConfig::defaults(DatasetName::SynPaths, ModelKind::Distmult);
    (c.dim, c.batch_size, c.lr, c.epochs, c.patience) = (32, 32, 0.01, 20, 20);
    let out = train(&b, ModelKind::Distmult, &c).unwrap();
    let valid = sgbench_models::train::mean_structure_bits(&out.model, &b.valid).unwrap();
    assert!(valid < 96.0, "{valid}");
    assert!(valid < out.history[0].valid_bits);
    let loss = |e: usize| out.history[e].train_bits.unwrap();
    assert!(loss(10) < loss(1), "{} !< {}", loss(10), loss(1));
    assert!(out.model.params().all_finite());
}

#[test]
fn zero_epochs_return_initialised_model() {
    let b = toy_paths(20);
    let mut c = TrainConfig::defaults(DatasetName::SynPaths, ModelKind::Complex);
    (c.dim, c.epochs) = (8, 0);
    let out = train(&b, ModelKind::Complex, &c).unwrap();
    assert_eq!(out.best_epoch, 0);
    assert_eq!(out.history.len(), 1);
    assert!(out.history[0].valid_bits.is_finite());
}

#[test]
fn divergence_is_reported() {
    let b = toy_paths(50);
    let mut c = TrainConfig::defaults(DatasetName::SynPaths, ModelKind::Distmult);
    (c.dim, c.batch_size, c.lr, c.epochs) = (4, 10, 1e300, 3);
    match train(&b, ModelKind::Distmult, &c) {
        Err(ModelError::Diverged { epoch, .. }) => assert!(epoch >= 1),
        other => panic!("expected divergence, got {:?}", other.map(|o| o.best_epoch)),
    }
}

#[test]
fn binomial_mean_edge_count_for_random_structure() {
    let m = StructureModel::random(49, 3);
    let ids: Vec<EntityId> = (0..4).map(EntityId).collect();
    let n = 10_000;
    let total: usize = (0..n)
        .map(|i| sgbench_models::eval::sample_structure(&m, &ids, &mut sgbench_models::eval::sample_rng(1, i)).unwrap().len())
        .sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 24.0).abs() < 0.5, "{mean}");
}

#[test]
fn syn_types_inclusion_tracks_unigram() {
    // Monte-Carlo inclusion frequencies rank entities like their probabilities.
    // A small training set keeps same-group probabilities far enough apart for
    // 10^5 draws to resolve their order.
    let b = generate(&GeneratorConfig::new(DatasetName::SynTypes).with_counts(300, 10, 10)).unwrap();
    let em = EntityModel::fit(&b.train, 30, EntityMode::Slot, None);
    let sizes = SizeDistribution::fit(&b.train);
    let mut counts = [0usize; 30];
    for i in 0..100_000 {
        for e in sgbench_models::entity::sample_entities(&em, &sizes, &[], &mut sgbench_models::eval::sample_rng(2, i)) {
            counts[e.index()] += 1;
        }
    }
    let rank = |xs: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
        let mut r = vec![0.0; xs.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
                j += 1;
            }
            for k in i..=j {
                r[idx[k]] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    };
    let p = em.weights();
    let f: Vec<f64> = counts.iter().map(|c| *c as f64).collect();
    let (rp, rf) = (rank(&p), rank(&f));
    let mean = (rp.len() - 1) as f64 / 2.0;
    let cov: f64 = rp.iter().zip(&rf).map(|(a, b)| (a - mean) * (b - mean)).sum();
    let var = |r: &[f64]| r.iter().map(|a| (a - mean).powi(2)).sum::<f64>();
    let rho = cov / (var(&rp) * var(&rf)).sqrt();
    assert!(rho > 0.99, "spearman {rho}");
}
