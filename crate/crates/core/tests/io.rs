mod common;

use hgl_core::io::{
    graph_to_csv, hypergraph_to_json, parse_graph_csv, parse_hypergraph_json, parse_signals_csv, signals_to_csv,
};
use hgl_core::{HglError, Hypergraph, NodeSignals, WeightedGraph};
use proptest::prelude::*;

proptest! {
    #[test]
    fn signals_round_trip(rows in (1usize..8, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, d), n)
    })) {
        let s = NodeSignals::from_rows(&rows).unwrap();
        let back = parse_signals_csv(&signals_to_csv(&s), false).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn hypergraph_round_trip(seed in any::<u64>()) {
        let h = common::random_hypergraph(9, 8, &mut common::rng(seed));
        prop_assert_eq!(parse_hypergraph_json(&hypergraph_to_json(&h)).unwrap(), h);
    }

    #[test]
    fn graph_round_trip(seed in any::<u64>(), n in 1usize..12) {
        let g = common::random_graph(n, 0.4, &mut common::rng(seed));
        prop_assert_eq!(parse_graph_csv(&graph_to_csv(&g)).unwrap(), g);
    }
}

#[test]
fn ragged_signals_rejected() {
    assert!(parse_signals_csv("1,2\n3\n", false).is_err());
}

#[test]
fn non_numeric_signal_reports_position() {
    match parse_signals_csv("1,2\n3,x\n", false) {
        Err(HglError::Parse { row, col, .. }) => assert_eq!((row, col), (1, 1)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn header_row_is_skipped_when_requested() {
    let s = parse_signals_csv("a,b\n1,2\n", true).unwrap();
    assert_eq!(s.n_nodes(), 1);
}

#[test]
fn invalid_hypergraph_json_rejected() {
    assert!(parse_hypergraph_json(r#"{"n_nodes": 3, "hyperedges": [[0, 5]]}"#).is_err());
    assert!(parse_hypergraph_json(r#"{"n_nodes": 3, "hyperedges": [[1]]}"#).is_err());
    assert!(parse_hypergraph_json("not json").is_err());
}

#[test]
fn graph_csv_example() {
    let g = parse_graph_csv("# n_nodes=4\n0,1,0.5\n2,3,1.25\n").unwrap();
    assert_eq!(g, WeightedGraph::from_edges(4, &[(0, 1, 0.5), (2, 3, 1.25)]).unwrap());
}

#[test]
fn incidence_round_trip() {
    let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
    assert_eq!(Hypergraph::from_incidence(&h.incidence()).unwrap(), h);
}
