//! Synthetic edge streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::stream::RawEdge;
use crate::baseline::AdjacencyGraph;
use crate::dtree::VertexKey;

/// How many of the most recent raw insertions a churn step may repeat.
pub const CHURN_WINDOW: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{k} does not divide {n_total}")]
    IndivisibleParameters { k: usize, n_total: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

/// A centre vertex `0` with `k` disjoint paths of `n_total / k` vertices
/// hanging off it. Vertices of line `j` are numbered consecutively from
/// `1 + j * (n_total / k)`, nearest the centre first. The stream lists the
/// edges line by line at timestamps `0, 1, 2, ...`.
pub fn gen_star_of_lines(
    k: usize,
    n_total: usize,
) -> Result<(AdjacencyGraph, Vec<RawEdge>), GenError> {
    if k == 0 || n_total == 0 {
        return Err(GenError::InvalidParameters(
            "k and n_total must be positive".into(),
        ));
    }
    if !n_total.is_multiple_of(k) {
        return Err(GenError::IndivisibleParameters { k, n_total });
    }
    let len = (n_total / k) as u64;
    let mut stream = Vec::with_capacity(n_total);
    for j in 0..k as u64 {
        let first = 1 + j * len;
        stream.push(RawEdge::new(0, first, 0));
        for x in first..first + len - 1 {
            stream.push(RawEdge::new(x, x + 1, 0));
        }
    }
    let mut g = AdjacencyGraph::new();
    for (t, e) in stream.iter_mut().enumerate() {
        e.t = t as u64;
        g.insert_edge(e.u, e.v)
            .expect("generated edges are not loops");
    }
    Ok((g, stream))
}

/// `m` raw insertions over vertices `0..n`, one per tick (`t = i`). With
/// probability `churn` an insertion repeats one of the last
/// [`CHURN_WINDOW`] insertions instead of drawing a fresh uniform pair, which
/// exercises deletion rescheduling once survival times are applied.
pub fn gen_random_dynamic(
    n: u64,
    m: usize,
    churn: f64,
    seed: u64,
) -> Result<Vec<RawEdge>, GenError> {
    if n < 2 || m == 0 {
        return Err(GenError::InvalidParameters("need n >= 2 and m >= 1".into()));
    }
    if !(0.0..=1.0).contains(&churn) {
        return Err(GenError::InvalidParameters(format!(
            "churn {churn} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<RawEdge> = Vec::with_capacity(m);
    for i in 0..m {
        let t = i as u64;
        if !out.is_empty() && rng.random_bool(churn) {
            let back = rng.random_range(0..out.len().min(CHURN_WINDOW));
            let prev = out[out.len() - 1 - back];
            out.push(RawEdge { t, ..prev });
            continue;
        }
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        out.push(RawEdge {
            u: VertexKey(u),
            v: VertexKey(v),
            t,
        });
    }
    Ok(out)
}
