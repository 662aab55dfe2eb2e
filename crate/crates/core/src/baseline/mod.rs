//! Reference structures for differential testing and comparisons.

mod adjacency;
mod union_find;

pub use adjacency::{AdjacencyGraph, BfsTree, OracleError, DEFAULT_COMPONENT_CAP};
pub use union_find::UnionFind;

use crate::dtree::{Forest, Policy};

/// A D-tree without shape maintenance: non-tree edges are only recorded, no
/// centroid restoration happens and tree-edge deletion takes the first
/// replacement edge it finds. Answers are identical to [`Forest::new`]; only
/// the tree shapes (and hence costs) differ.
pub fn naive_dtree() -> Forest {
    Forest::with_policy(Policy::naive())
}
