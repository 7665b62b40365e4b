mod common;

use causal_reduce::{parse_graph, VertexSet};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dsep_matches_path_oracle(g in arb_dag(2, 6)) {
        let n = g.n();
        // Assign each vertex to x, y, z or none.
        for code in 0..4usize.pow(n as u32) {
            let mut part = vec![0; n];
            let mut c = code;
            for p in part.iter_mut() {
                *p = c % 4;
                c /= 4;
            }
            let x: Vec<bool> = part.iter().map(|&p| p == 1).collect();
            let y: Vec<bool> = part.iter().map(|&p| p == 2).collect();
            let z: Vec<bool> = part.iter().map(|&p| p == 3).collect();
            prop_assert_eq!(g.d_separated_mask(&x, &y, &z), dsep_oracle(&g, &x, &y, &z), "x={:?} y={:?} z={:?}", x, y, z);
        }
    }

    #[test]
    fn dsep_symmetry_and_overlap(g in arb_dag(2, 7), xb in any::<u32>(), yb in any::<u32>(), zb in any::<u32>()) {
        let n = g.n();
        let (x, y, z) = (mask(n, xb), mask(n, yb), mask(n, zb));
        prop_assert_eq!(g.d_separated_mask(&x, &y, &z), g.d_separated_mask(&y, &x, &z));
        prop_assert!(g.d_separated_mask(&vec![false; n], &y, &z));
        prop_assert_eq!(g.d_separated_mask(&x, &y, &z), dsep_oracle(&g, &x, &y, &z));
    }

    #[test]
    fn causal_paths_match_oracle(g in arb_dag(2, 7), avoid in any::<u32>()) {
        let avoid = mask(g.n(), avoid);
        for a in 0..g.n() {
            for b in 0..g.n() {
                prop_assert_eq!(g.has_causal_path_idx(a, b, &avoid), causal_path_oracle(&g, a, b, &avoid));
            }
        }
    }

    #[test]
    fn ancestry_is_reflexive_transitive_monotone(g in arb_dag(2, 7), sb in any::<u32>(), tb in any::<u32>()) {
        let reach = reach_of(&g);
        let s: Vec<usize> = (0..g.n()).filter(|&v| sb >> v & 1 == 1).collect();
        let t: Vec<usize> = (0..g.n()).filter(|&v| (sb | tb) >> v & 1 == 1).collect();
        let an = g.ancestors_mask(&s);
        let de = g.descendants_mask(&s);
        for v in 0..g.n() {
            prop_assert_eq!(an[v], s.iter().any(|&u| reach[v][u]));
            prop_assert_eq!(de[v], s.iter().any(|&u| reach[u][v]));
        }
        let an_t = g.ancestors_mask(&t);
        prop_assert!((0..g.n()).all(|v| !an[v] || an_t[v]));
        let seeds: Vec<usize> = (0..g.n()).filter(|&v| an[v]).collect();
        prop_assert_eq!(g.ancestors_mask(&seeds), an);
    }

    #[test]
    fn topo_order_respects_edges(g in arb_dag(2, 7)) {
        for (p, c) in g.edges() {
            prop_assert!(g.topo_rank(p) < g.topo_rank(c));
        }
        let again = parse_graph(&g.to_graph_text()).unwrap();
        prop_assert_eq!(again.topo_sort(), g.topo_sort());
        prop_assert_eq!(again.labels(), g.labels());
    }

    #[test]
    fn inducing_path_implies_connection(g in arb_dag(2, 7), cb in any::<u32>()) {
        let c0 = mask(g.n(), cb);
        for a in 0..g.n() {
            for b in 0..g.n() {
                if a == b || c0[a] || c0[b] {
                    continue;
                }
                if g.inducing_path_exists_idx(a, b, &c0) {
                    let (mut x, mut y) = (vec![false; g.n()], vec![false; g.n()]);
                    x[a] = true;
                    y[b] = true;
                    prop_assert!(!g.d_separated_mask(&x, &y, &c0));
                }
            }
        }
    }
}

#[test]
fn inducing_path_examples() {
    let g = parse_graph("!treatment A\n!outcome B\nA -> B\n").unwrap();
    assert!(g.inducing_path_exists("A", "B", &VertexSet::new()).unwrap());
    let g = parse_graph("!treatment A\n!outcome B\nA -> C\nB -> C\nA -> B\n").unwrap();
    assert!(g.inducing_path_exists("A", "B", &VertexSet::new()).unwrap());
    let g = parse_graph("!treatment A\n!outcome C\nB\nA -> C\nB -> C\n").unwrap();
    assert!(!g.inducing_path_exists("A", "B", &VertexSet::new()).unwrap());
}

#[test]
fn label_level_queries() {
    let g = causal_reduce::golden::graph("motivating").unwrap();
    let s = |xs: &[&str]| xs.iter().copied().collect::<VertexSet>();
    assert_eq!(g.ancestors(&s(&["O1"])).unwrap(), s(&["O1", "W4", "W2", "W3", "W1"]));
    assert!(g.d_separated(&s(&["O1"]), &s(&["W2", "W3"]), &s(&["W4"])).unwrap());
    assert!(g.d_separated(&s(&["W4"]), &s(&["O1"]), &s(&["O1"])).unwrap());
    assert!(!g.has_causal_path("I1", "Y", &s(&["A"])).unwrap());
    assert!(g.has_causal_path("A", "Y", &VertexSet::new()).unwrap());
    let d = causal_reduce::golden::graph("taxonomy_demo").unwrap();
    assert_eq!(d.descendants(&s(&["A"])).unwrap(), s(&["A", "M1", "M2", "M3", "Y", "N1"]));
}
