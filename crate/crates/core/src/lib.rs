//! Fully dynamic graph connectivity with D-trees.
//!
//! * [`dtree`]: the D-tree spanning forest and its maintenance algorithms.
//! * [`baseline`]: reference structures used for differential testing and
//!   comparisons (BFS oracle, optimal BFS trees, union-find, naive D-tree).
//! * [`workload`]: edge-stream parsing, survival-time scheduling, synthetic
//!   generators and the replay engine that drives any structure.

pub mod baseline;
pub mod dtree;
pub mod workload;

pub use dtree::{
    DTreeError, DeleteOutcome, Forest, InsertOutcome, Policy, ReplacementRule, RootInfo, VertexKey,
    Violation,
};
