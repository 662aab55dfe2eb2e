mod common;

use common::{k, rng};
use dynconn::baseline::{AdjacencyGraph, UnionFind, DEFAULT_COMPONENT_CAP};
use dynconn::workload::{gen_random_dynamic, gen_star_of_lines, replay, schedule};
use dynconn::workload::{OracleStructure, QueryMode, ReplayConfig, Survival};
use dynconn::{Forest, Policy, VertexKey};
use proptest::prelude::*;
use rand::Rng;

fn random_graph(n: u64, m: usize, seed: u64) -> AdjacencyGraph {
    let mut r = rng(seed);
    let mut g = AdjacencyGraph::new();
    for v in 0..n {
        g.add_vertex(k(v));
    }
    for _ in 0..m {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            g.insert_edge(k(a), k(b)).unwrap();
        }
    }
    g
}

proptest! {
    #[test]
    fn oracle_conn_is_closure_of_edges(edges in prop::collection::vec((0u64..25, 0u64..25), 0..60)) {
        let mut g = AdjacencyGraph::new();
        let mut uf = UnionFind::new();
        for v in 0..25 {
            g.add_vertex(k(v));
            uf.add(k(v));
        }
        for (a, b) in edges.into_iter().filter(|(a, b)| a != b) {
            g.insert_edge(k(a), k(b)).unwrap();
            uf.union(k(a), k(b));
        }
        for a in 0..25 {
            prop_assert!(g.oracle_conn(k(a), k(a)).unwrap());
            for b in 0..25 {
                let c = g.oracle_conn(k(a), k(b)).unwrap();
                prop_assert_eq!(c, g.oracle_conn(k(b), k(a)).unwrap());
                prop_assert_eq!(c, uf.connected(k(a), k(b)));
            }
        }
        prop_assert_eq!(g.component_count(), uf.set_count());
    }

    #[test]
    fn opt_root_is_a_centroid_of_its_tree(n in 1u64..120, extra in 0usize..200, seed: u64) {
        let g = random_graph(n, n as usize + extra, seed);
        for r in g.component_representatives() {
            let t = g.opt_bfs_tree(r, DEFAULT_COMPONENT_CAP).unwrap();
            let sizes = t.subtree_sizes();
            for (v, p) in &t.parent {
                if *p == Some(t.root) {
                    prop_assert!(2 * sizes[v] <= t.len());
                }
            }
            // and it really is the minimum over every root
            for v in g.component_of(r).unwrap() {
                let s: usize = g.distances_from(v).unwrap().values().sum();
                prop_assert!(t.s_d <= s as u64);
            }
        }
    }

    #[test]
    fn opt_never_beats_itself_by_dtree(seed in 0u64..1000) {
        let raw = gen_random_dynamic(60, 600, 0.2, seed).unwrap();
        let s = schedule(&raw, Survival::Finite(120), 10, seed).unwrap();
        let cfg = ReplayConfig { query_mode: QueryMode::Random(20), verify: None };
        let d = replay(&s, &mut Forest::new(), &cfg).unwrap();
        let o = replay(&s, &mut OracleStructure::default(), &cfg).unwrap();
        for (a, b) in d.iter().zip(&o) {
            prop_assert!(b.s_d_total.unwrap() <= a.s_d_total.unwrap());
            prop_assert_eq!(a.n_components, b.n_components);
            // S_c is a property of the tree shape; the oracle's is the
            // optimum's, and both are bounded by the D-tree's S_d
            prop_assert!(b.s_c_total.unwrap() <= a.s_d_total.unwrap());
        }
    }
}

#[test]
fn bfs_tree_not_worse_than_dfs_like_spanning_tree() {
    // a cycle of 8: BFS from 0 has S_d 1+1+2+2+3+3+4 = 16, the path around
    // the cycle has 28
    let edges: Vec<_> = (0..8u64).map(|i| (k(i), k((i + 1) % 8))).collect();
    let g = AdjacencyGraph::from_edges(&edges).unwrap();
    let d: usize = g.distances_from(k(0)).unwrap().values().sum();
    assert_eq!(d, 16);
    let path: Vec<_> = (0..7u64).map(|i| (k(i), k(i + 1))).collect();
    let f = Forest::from_tree_edges(Policy::dtree(), &path, &[]).unwrap();
    assert_eq!(f.s_d(k(0)).unwrap(), 28);
}

#[test]
fn star_of_lines_shapes() {
    for k_lines in [1usize, 2, 4, 8, 16, 48, 96, 480] {
        let (g, stream) = gen_star_of_lines(k_lines, 480).unwrap();
        assert_eq!(stream.len(), 480);
        assert_eq!(g.component_count(), 1);
        let diam = g.diameter(VertexKey(0), DEFAULT_COMPONENT_CAP).unwrap();
        let len = 480 / k_lines;
        let expect = if k_lines == 1 { len } else { 2 * len };
        assert_eq!(diam, expect);
        // the centre is the optimal root
        let t = g.opt_bfs_tree(VertexKey(0), DEFAULT_COMPONENT_CAP).unwrap();
        if k_lines > 1 {
            assert_eq!(t.root, VertexKey(0));
        }
    }
}
