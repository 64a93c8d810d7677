mod common;

use hgl_core::{aggregate, evaluate, Hypergraph, Matching};
use proptest::prelude::*;

fn h(n: usize, e: &[&[usize]]) -> Hypergraph {
    Hypergraph::new(n, e.iter().map(|x| x.to_vec()).collect()).unwrap()
}

#[test]
fn identity_scores_one() {
    let mut rng = common::rng(1);
    for _ in 0..50 {
        let t = common::random_hypergraph(9, 6, &mut rng);
        if t.is_empty() {
            continue;
        }
        let r = evaluate(&t, &t, Matching::Exact, 0.5).unwrap();
        assert_eq!((r.recall, r.precision, r.f1), (1.0, 1.0, 1.0));
        assert!(r.per_hyperedge_best_jaccard.iter().all(|&j| j == 1.0));
    }
}

#[test]
fn worked_example() {
    let r = evaluate(&h(5, &[&[0, 1, 2]]), &h(5, &[&[0, 1, 2], &[3, 4]]), Matching::Exact, 0.5).unwrap();
    assert_eq!(r.recall, 0.5);
    assert_eq!(r.precision, 1.0);
    assert!((r.f1 - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn jaccard_at_threshold_one_equals_exact_on_fuzzed_pairs() {
    let mut rng = common::rng(200);
    for i in 0..200 {
        let t = common::random_hypergraph(8, 6, &mut rng);
        let l = common::random_hypergraph(8, 6, &mut rng);
        // mix in some truth hyperedges so exact matches actually occur
        let mut mixed: Vec<Vec<usize>> = l.hyperedges().to_vec();
        mixed.extend(t.hyperedges().iter().step_by(2).cloned());
        let l = Hypergraph::new_dedup(8, mixed).unwrap();
        let a = evaluate(&l, &t, Matching::Exact, 1.0).unwrap();
        let b = evaluate(&l, &t, Matching::Jaccard, 1.0).unwrap();
        assert_eq!((a.recall, a.precision, a.f1), (b.recall, b.precision, b.f1), "pair {i}");
    }
}

#[test]
fn aggregate_uses_population_std() {
    let t = h(4, &[&[0, 1], &[2, 3]]);
    let results: Vec<_> = [h(4, &[&[0, 1], &[2, 3]]), h(4, &[])]
        .iter()
        .map(|l| evaluate(l, &t, Matching::Exact, 0.5).unwrap())
        .collect();
    let agg = aggregate(&results).unwrap();
    assert_eq!(agg.f1.mean, 0.5);
    assert_eq!(agg.f1.std, 0.5);
    assert_eq!(agg.n, 2);
}

fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    any::<u64>().prop_map(|s| common::random_hypergraph(8, 7, &mut common::rng(s)))
}

proptest! {
    #[test]
    fn scores_are_bounded_and_consistent(l in hypergraph(), t in hypergraph(), thr in 0.05f64..=1.0) {
        for m in [Matching::Exact, Matching::Jaccard] {
            let r = evaluate(&l, &t, m, thr).unwrap();
            for x in [r.recall, r.precision, r.f1] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            prop_assert!(r.f1 <= r.recall.max(r.precision) + 1e-15);
            prop_assert!(r.f1 >= r.recall.min(r.precision) - 1e-15);
            prop_assert_eq!(r.per_hyperedge_best_jaccard.len(), t.len());
        }
    }

    #[test]
    fn exact_swaps_recall_and_precision(l in hypergraph(), t in hypergraph()) {
        let a = evaluate(&l, &t, Matching::Exact, 1.0).unwrap();
        let b = evaluate(&t, &l, Matching::Exact, 1.0).unwrap();
        prop_assert_eq!(a.recall, b.precision);
        prop_assert_eq!(a.precision, b.recall);
    }

    #[test]
    fn lower_threshold_never_hurts_recall(l in hypergraph(), t in hypergraph(), hi in 0.5f64..=1.0) {
        let strict = evaluate(&l, &t, Matching::Jaccard, hi).unwrap();
        let loose = evaluate(&l, &t, Matching::Jaccard, hi / 2.0).unwrap();
        let exact = evaluate(&l, &t, Matching::Exact, 1.0).unwrap();
        prop_assert!(strict.recall >= exact.recall);
        prop_assert!(loose.recall + 1e-12 >= exact.recall);
    }
}
