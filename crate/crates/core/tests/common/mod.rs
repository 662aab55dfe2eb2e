#![allow(dead_code)]

use std::collections::BTreeMap;

use dynconn::{Forest, Policy, VertexKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn k(x: u64) -> VertexKey {
    VertexKey(x)
}

pub fn pairs(xs: &[(u64, u64)]) -> Vec<(VertexKey, VertexKey)> {
    xs.iter().map(|&(a, b)| (k(a), k(b))).collect()
}

pub fn build(policy: Policy, tree: &[(u64, u64)], nte: &[(u64, u64)]) -> Forest {
    Forest::from_tree_edges(policy, &pairs(tree), &pairs(nte)).unwrap()
}

/// vertex -> (parent, subtree size)
pub fn shape(f: &Forest) -> BTreeMap<u64, (Option<u64>, usize)> {
    f.vertices()
        .map(|v| {
            let p = f.parent(v).unwrap().map(|p| p.0);
            (v.0, (p, f.subtree_size(v).unwrap()))
        })
        .collect()
}

pub fn expect_shape(spec: &[(u64, Option<u64>, usize)]) -> BTreeMap<u64, (Option<u64>, usize)> {
    spec.iter().map(|&(v, p, s)| (v, (p, s))).collect()
}

/// Uniformly random recursive tree on `0..n` as `(parent, child)` pairs,
/// child `i` attached below a random earlier vertex.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(VertexKey, VertexKey)> {
    (1..n as u64)
        .map(|i| (k(rng.random_range(0..i)), k(i)))
        .collect()
}

/// Random tree whose root is vertex 0, possibly far from the centroid:
/// mixes long paths with bushy attachment.
pub fn random_lopsided_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(VertexKey, VertexKey)> {
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n as u64 {
        let p = if rng.random_bool(0.6) {
            i - 1
        } else {
            rng.random_range(0..i)
        };
        out.push((k(p), k(i)));
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Depth of every vertex by walking parent links.
pub fn depths(f: &Forest) -> BTreeMap<VertexKey, usize> {
    f.vertices()
        .map(|v| (v, f.find_root(v).unwrap().depth))
        .collect()
}

/// Brute-force S_c of the tree rooted at `r`: for every tree edge, the
/// smaller side left after removing it, counted by flood fill.
pub fn brute_s_c(f: &Forest, r: VertexKey) -> u64 {
    let members: Vec<VertexKey> = f
        .vertices()
        .filter(|&v| f.find_root(v).unwrap().root == r)
        .collect();
    let n = members.len();
    let mut total = 0u64;
    for &c in &members {
        let Some(p) = f.parent(c).unwrap() else {
            continue;
        };
        // flood from c without crossing (c, p)
        let mut seen = std::collections::HashSet::from([c]);
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            let mut nb = f.children(x).unwrap();
            if let Some(q) = f.parent(x).unwrap() {
                nb.push(q);
            }
            for y in nb {
                if (x == c && y == p) || !seen.insert(y) {
                    continue;
                }
                stack.push(y);
            }
        }
        total += seen.len().min(n - seen.len()) as u64;
    }
    total
}

/// Parameters of the S_d comparison workloads: 500 vertices, a giant
/// component most of the time, 20 snapshots each.
pub mod sd_compare {
    use dynconn::workload::{
        gen_random_dynamic, replay, schedule, ConnectivityStructure, OracleStructure, QueryMode,
        ReplayConfig, Survival,
    };
    use dynconn::{Forest, Policy};

    pub const N: u64 = 500;
    pub const RAW_EDGES: usize = 5000;
    pub const CHURN: f64 = 0.2;
    pub const SURVIVAL: u64 = 1000;
    pub const SNAPSHOTS: usize = 20;
    pub const QUERIES: usize = 2000;

    /// Mean per-snapshot S_d of (opt, dtree, naive) on one seeded workload.
    pub fn means(seed: u64) -> (f64, f64, f64) {
        let raw = gen_random_dynamic(N, RAW_EDGES, CHURN, seed).unwrap();
        let s = schedule(&raw, Survival::Finite(SURVIVAL), SNAPSHOTS, seed).unwrap();
        let cfg = ReplayConfig {
            query_mode: QueryMode::Random(QUERIES),
            verify: None,
        };
        let run = |st: &mut dyn ConnectivityStructure| {
            let out = replay(&s, st, &cfg).unwrap();
            out.iter().map(|r| r.s_d_total.unwrap() as f64).sum::<f64>() / out.len() as f64
        };
        let opt = run(&mut OracleStructure::default());
        let dtree = run(&mut Forest::new());
        let naive = run(&mut Forest::with_policy(Policy::naive()));
        (opt, dtree, naive)
    }
}

/// Runs `f` over `items` on all available cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    })
}
