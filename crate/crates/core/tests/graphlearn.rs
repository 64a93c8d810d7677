mod common;

use approx::assert_relative_eq;
use hgl_core::graphlearn::{learn_graph_from_distances, objective, pairwise_sq_distances};
use hgl_core::{learn_graph, GLConfig, NodeSignals, PruneThreshold, WeightedGraph};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn unpruned() -> GLConfig {
    GLConfig {
        prune_eps: PruneThreshold::Absolute(0.0),
        ..Default::default()
    }
}

#[test]
fn distances_match_double_loop() {
    let mut rng = common::rng(7);
    let rows: Vec<Vec<f64>> = (0..6).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let z = pairwise_sq_distances(&NodeSignals::from_rows(&rows).unwrap());
    for i in 0..6 {
        for j in 0..6 {
            let mut d = 0.0;
            for k in 0..4 {
                d += (rows[i][k] - rows[j][k]) * (rows[i][k] - rows[j][k]);
            }
            assert_eq!(z[(i, j)], d);
        }
    }
}

#[test]
fn objective_matches_scalar_loop() {
    let mut rng = common::rng(11);
    let g = loop {
        let g = common::random_graph(5, 0.7, &mut rng);
        if (0..5).all(|i| g.degree(i) > 0.0) {
            break g;
        }
    };
    let z = common::random_distances(5, 3, &mut rng);
    let cfg = GLConfig {
        alpha: 0.7,
        beta: 1.3,
        ..Default::default()
    };
    let lib = objective(&g, &z, &cfg).unwrap();
    let oracle = common::gl_objective(g.weights(), &z, 0.7, 1.3);
    assert_relative_eq!(lib, oracle, max_relative = 1e-12);
}

#[test]
fn solver_matches_projected_gradient_oracle() {
    let mut rng = common::rng(2024);
    let cfg = unpruned();
    for trial in 0..20 {
        let n = rng.random_range(2..=6);
        let z = common::random_distances(n, 3, &mut rng);
        let (w, _) = learn_graph_from_distances(&z, &cfg).unwrap();
        let ours = objective(&w, &z, &cfg).unwrap();
        let (_, best) = common::gl_oracle(&z, cfg.alpha, cfg.beta);
        let gap = (ours - best).abs() / best.abs();
        assert!(gap <= 1e-6, "trial {trial} (n={n}): solver {ours}, oracle {best}, gap {gap:e}");
    }
}

#[test]
fn two_node_closed_form() {
    for (alpha, beta) in [(1.0, 0.5), (2.0, 3.0), (0.3, 0.01)] {
        let s = NodeSignals::from_rows(&[vec![1.0, -2.0], vec![1.0, -2.0]]).unwrap();
        let cfg = GLConfig { alpha, beta, ..unpruned() };
        let (w, report) = learn_graph(&s, &cfg).unwrap();
        let expected = (alpha / (2.0 * beta)).sqrt();
        assert!(
            (w.weight(0, 1) - expected).abs() <= 1e-6 * expected.max(1.0),
            "alpha={alpha} beta={beta}: got {}, expected {expected}",
            w.weight(0, 1)
        );
        assert!(report.converged);
    }
}

#[test]
fn clustered_signals_concentrate_weight_within_clusters() {
    let mut rng = common::rng(5);
    let mut rows = Vec::new();
    for c in 0..2 {
        let center = if c == 0 { 0.0 } else { 10.0 };
        for _ in 0..5 {
            rows.push((0..3).map(|_| center + rng.random_range(-0.5..0.5)).collect::<Vec<f64>>());
        }
    }
    let (w, _) = learn_graph(&NodeSignals::from_rows(&rows).unwrap(), &GLConfig::default()).unwrap();
    let (mut within, mut total) = (0.0, 0.0);
    for (u, v, x) in w.edges() {
        total += x;
        if (u < 5) == (v < 5) {
            within += x;
        }
    }
    assert!(within / total >= 0.9, "within-cluster share {}", within / total);
}

#[test]
fn scaling_distances_and_hyperparameters_together_keeps_output() {
    let mut rng = common::rng(99);
    let z = common::random_distances(6, 2, &mut rng);
    let cfg = GLConfig {
        alpha: 0.8,
        beta: 0.4,
        ..unpruned()
    };
    let (w1, _) = learn_graph_from_distances(&z, &cfg).unwrap();
    for c in [0.01, 3.0, 250.0] {
        let scaled = GLConfig {
            alpha: cfg.alpha * c,
            beta: cfg.beta * c,
            ..cfg
        };
        let (w2, _) = learn_graph_from_distances(&(&z * c), &scaled).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((w1.weight(i, j) - w2.weight(i, j)).abs() <= 1e-6, "c={c} ({i},{j})");
            }
        }
    }
}

#[test]
fn identical_inputs_give_bitwise_identical_output() {
    let mut rng = common::rng(3);
    let rows: Vec<Vec<f64>> = (0..8).map(|_| (0..5).map(|_| rng.random::<f64>()).collect()).collect();
    let s = NodeSignals::from_rows(&rows).unwrap();
    let (a, ra) = learn_graph(&s, &GLConfig::default()).unwrap();
    let (b, rb) = learn_graph(&s, &GLConfig::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
}

#[test]
fn pruning_respects_threshold() {
    let mut rng = common::rng(8);
    let z = common::random_distances(7, 2, &mut rng);
    let cfg = GLConfig {
        prune_eps: PruneThreshold::Relative(0.2),
        ..Default::default()
    };
    let (w, report) = learn_graph_from_distances(&z, &cfg).unwrap();
    let strongest: Vec<f64> = (0..7)
        .map(|i| (0..7).map(|j| w.weight(i, j)).fold(0.0, f64::max))
        .collect();
    for (u, v, x) in w.edges() {
        // survivors below the threshold must be some endpoint's strongest edge
        assert!(x >= report.prune_threshold || x == strongest[u] || x == strongest[v]);
    }
}

fn signals_strategy() -> impl Strategy<Value = NodeSignals> {
    (2usize..9, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), n)
            .prop_map(|rows| NodeSignals::from_rows(&rows).unwrap())
    })
}

fn check_output(w: &WeightedGraph) {
    let m = w.weights();
    let n = w.n_nodes();
    for i in 0..n {
        assert_eq!(m[(i, i)], 0.0);
        for j in 0..n {
            assert_eq!(m[(i, j)], m[(j, i)]);
            assert!(m[(i, j)] >= 0.0 && m[(i, j)].is_finite());
        }
        assert!(w.degree(i) > 0.0, "node {i} isolated");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn output_is_a_valid_connected_degree_graph(s in signals_strategy(), alpha in 0.1f64..10.0, beta in 0.1f64..10.0) {
        let cfg = GLConfig { alpha, beta, max_iters: 3000, ..Default::default() };
        let (w, report) = learn_graph(&s, &cfg).unwrap();
        check_output(&w);
        prop_assert_eq!(report.objective_trace.len(), report.iterations_run);
        prop_assert!(report.objective_trace.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn objective_trace_is_non_increasing(s in signals_strategy()) {
        let cfg = GLConfig { max_iters: 3000, ..Default::default() };
        let (_, report) = learn_graph(&s, &cfg).unwrap();
        for k in 1..report.objective_trace.len() {
            let (a, b) = (report.objective_trace[k - 1], report.objective_trace[k]);
            prop_assert!(b <= a + 1e-9 * a.abs(), "step {}: {} -> {}", k, a, b);
        }
    }

}

#[test]
fn zero_distances_give_uniform_graph() {
    let z = DMatrix::zeros(4, 4);
    let (w, _) = learn_graph_from_distances(&z, &unpruned()).unwrap();
    let x = w.weight(0, 1);
    for (_, _, y) in w.edges() {
        assert_relative_eq!(x, y, max_relative = 1e-6);
    }
    assert_eq!(w.n_edges(), 6);
}
