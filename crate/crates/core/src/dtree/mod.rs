//! D-tree spanning forests.
//!
//! A [`Forest`] embeds a whole undirected graph: every vertex is a node of a
//! rooted spanning tree, tree edges are parent/child links and all remaining
//! edges are stored symmetrically in the `nte` (non-tree edge) sets of their
//! endpoints. Each node carries the size of its subtree, which is all the
//! information needed to keep roots at (or near) tree centroids and hence keep
//! the sum of root distances small.
//!
//! Nodes live in an arena indexed by dense ids; children and non-tree
//! neighbours are insertion-ordered sets so traversals are reproducible.

mod metrics;
mod ops;
mod validate;

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use validate::Violation;

/// Identifier of a graph vertex.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexKey(pub u64);

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for VertexKey {
    fn from(k: u64) -> Self {
        VertexKey(k)
    }
}

pub(crate) type NodeId = usize;

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub(crate) key: VertexKey,
    pub(crate) parent: Option<NodeId>,
    pub(crate) children: IndexSet<NodeId>,
    pub(crate) size: usize,
    pub(crate) nte: IndexSet<NodeId>,
}

impl Node {
    fn new(key: VertexKey) -> Self {
        Node {
            key,
            parent: None,
            children: IndexSet::new(),
            size: 1,
            nte: IndexSet::new(),
        }
    }
}

/// Result of walking from a node up to its root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootInfo {
    pub root: VertexKey,
    /// Number of tree edges between the queried node and the root.
    pub depth: usize,
    /// Child of the root on the path, `None` when the queried node is the root.
    pub gate_child: Option<VertexKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The edge joined two trees; carries the root of the merged tree.
    TreeEdge(VertexKey),
    /// The edge closed a cycle; carries the root of the (possibly rewired) tree.
    NonTreeEdge(VertexKey),
    /// The edge was already embedded, nothing changed.
    AlreadyPresent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeleteOutcome {
    /// A non-tree edge was removed; the spanning forest is untouched.
    NonTree,
    /// A tree edge was removed and a replacement edge reconnected the halves.
    Reconnected(VertexKey),
    /// A tree edge was removed and the component split. Roots are reported as
    /// (smaller tree, larger tree).
    SplitInto(VertexKey, VertexKey),
}

impl DeleteOutcome {
    pub fn is_split(&self) -> bool {
        matches!(self, DeleteOutcome::SplitInto(..))
    }
}

/// How `delete_te` picks among candidate replacement edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReplacementRule {
    /// Scan the whole smaller tree and take the candidate whose endpoint in the
    /// larger tree is closest to its root (first in BFS order on ties).
    MinDepth,
    /// Stop at the first candidate found.
    FirstFound,
}

/// Maintenance heuristics applied by a [`Forest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    /// Reroot at a heavier child when a subtree exceeds half its tree
    /// (in `link`, `conn` and after a splitting `delete_te`).
    pub restore_centroid: bool,
    /// Rewire a deep endpoint below a shallow one when inserting a non-tree
    /// edge whose endpoint depths differ by two or more.
    pub shortcut_nte: bool,
    pub replacement: ReplacementRule,
}

impl Policy {
    /// The full D-tree heuristics.
    pub const fn dtree() -> Self {
        Policy {
            restore_centroid: true,
            shortcut_nte: true,
            replacement: ReplacementRule::MinDepth,
        }
    }

    /// No shape maintenance: plain spanning forest with sizes.
    pub const fn naive() -> Self {
        Policy {
            restore_centroid: false,
            shortcut_nte: false,
            replacement: ReplacementRule::FirstFound,
        }
    }
}

impl Default for Policy {
    fn default() -> Self {
        Policy::dtree()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DTreeError {
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexKey),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexKey),
    #[error("vertex {0} is not a root")]
    NotARoot(VertexKey),
    #[error("vertex {0} is a root")]
    IsRoot(VertexKey),
    #[error("vertices {0} and {1} are already in the same tree")]
    SameTree(VertexKey, VertexKey),
    #[error("vertices {0} and {1} are not in the same tree")]
    NotSameTree(VertexKey, VertexKey),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexKey),
    #[error("edge ({0}, {1}) already exists")]
    EdgeExists(VertexKey, VertexKey),
    #[error("no edge ({0}, {1})")]
    NoSuchEdge(VertexKey, VertexKey),
    #[error("edge ({0}, {1}) is not a tree edge")]
    NotTreeEdge(VertexKey, VertexKey),
    #[error("vertex {0} still has incident edges")]
    VertexHasEdges(VertexKey),
    #[error("malformed structure: {0}")]
    Malformed(String),
}

pub type Result<T, E = DTreeError> = std::result::Result<T, E>;

/// A spanning forest of a fully dynamic graph.
///
/// All operations, including [`Forest::conn`], may restructure trees, so the
/// forest is single-writer.
#[derive(Debug, Clone)]
pub struct Forest {
    pub(crate) nodes: Vec<Node>,
    free: Vec<NodeId>,
    pub(crate) index: HashMap<VertexKey, NodeId>,
    pub(crate) roots: IndexSet<NodeId>,
    pub(crate) nte_pairs: usize,
    pub(crate) policy: Policy,
}

impl Default for Forest {
    fn default() -> Self {
        Forest::new()
    }
}

impl Forest {
    pub fn new() -> Self {
        Forest::with_policy(Policy::dtree())
    }

    pub fn with_policy(policy: Policy) -> Self {
        Forest {
            nodes: Vec::new(),
            free: Vec::new(),
            index: HashMap::new(),
            roots: IndexSet::new(),
            nte_pairs: 0,
            policy,
        }
    }

    /// Builds a forest with an exact shape, without running any maintenance.
    ///
    /// `tree_edges` are `(parent, child)` pairs; children keep the order in
    /// which they appear. Vertices are created in order of first appearance.
    /// Sizes are computed from the resulting shape.
    pub fn from_tree_edges(
        policy: Policy,
        tree_edges: &[(VertexKey, VertexKey)],
        non_tree_edges: &[(VertexKey, VertexKey)],
    ) -> Result<Self> {
        let mut f = Forest::with_policy(policy);
        for &(p, c) in tree_edges {
            if p == c {
                return Err(DTreeError::SelfLoop(p));
            }
            let pid = f.ensure_vertex(p);
            let cid = f.ensure_vertex(c);
            if f.nodes[cid].parent.is_some() {
                return Err(DTreeError::Malformed(format!("vertex {c} has two parents")));
            }
            f.nodes[cid].parent = Some(pid);
            f.nodes[pid].children.insert(cid);
            f.roots.swap_remove(&cid);
        }
        // Sizes by post-order from the roots; anything unreached sits on a cycle.
        let mut reached = 0;
        let roots: Vec<NodeId> = f.roots.iter().copied().collect();
        for r in roots {
            let order = f.preorder(r);
            reached += order.len();
            for &(id, _) in order.iter().rev() {
                let s = 1 + f.nodes[id]
                    .children
                    .iter()
                    .map(|&c| f.nodes[c].size)
                    .sum::<usize>();
                f.nodes[id].size = s;
            }
        }
        if reached != f.index.len() {
            return Err(DTreeError::Malformed("tree edges contain a cycle".into()));
        }
        for &(u, v) in non_tree_edges {
            if u == v {
                return Err(DTreeError::SelfLoop(u));
            }
            let a = f.ensure_vertex(u);
            let b = f.ensure_vertex(v);
            if f.adjacent(a, b) {
                return Err(DTreeError::EdgeExists(u, v));
            }
            if f.walk_root(a).0 != f.walk_root(b).0 {
                return Err(DTreeError::NotSameTree(u, v));
            }
            f.add_nte(a, b);
        }
        Ok(f)
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn set_policy(&mut self, policy: Policy) {
        self.policy = policy;
    }

    pub fn add_vertex(&mut self, k: VertexKey) -> Result<()> {
        if self.index.contains_key(&k) {
            return Err(DTreeError::DuplicateVertex(k));
        }
        self.ensure_vertex(k);
        Ok(())
    }

    /// Removes an isolated vertex.
    pub fn remove_vertex(&mut self, k: VertexKey) -> Result<()> {
        let id = self.id(k)?;
        let n = &self.nodes[id];
        if n.parent.is_some() || !n.children.is_empty() || !n.nte.is_empty() {
            return Err(DTreeError::VertexHasEdges(k));
        }
        self.index.remove(&k);
        self.roots.swap_remove(&id);
        self.free.push(id);
        Ok(())
    }

    pub(crate) fn ensure_vertex(&mut self, k: VertexKey) -> NodeId {
        if let Some(&id) = self.index.get(&k) {
            return id;
        }
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id] = Node::new(k);
                id
            }
            None => {
                self.nodes.push(Node::new(k));
                self.nodes.len() - 1
            }
        };
        self.index.insert(k, id);
        self.roots.insert(id);
        id
    }

    pub(crate) fn id(&self, k: VertexKey) -> Result<NodeId> {
        self.index
            .get(&k)
            .copied()
            .ok_or(DTreeError::UnknownVertex(k))
    }

    #[inline]
    pub(crate) fn key(&self, id: NodeId) -> VertexKey {
        self.nodes[id].key
    }

    pub(crate) fn root_id(&self, k: VertexKey) -> Result<NodeId> {
        let id = self.id(k)?;
        if self.nodes[id].parent.is_some() {
            return Err(DTreeError::NotARoot(k));
        }
        Ok(id)
    }

    pub(crate) fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.nodes[a].parent == Some(b)
            || self.nodes[b].parent == Some(a)
            || self.nodes[a].nte.contains(&b)
    }

    pub(crate) fn add_nte(&mut self, a: NodeId, b: NodeId) {
        self.nodes[a].nte.insert(b);
        self.nodes[b].nte.insert(a);
        self.nte_pairs += 1;
    }

    pub(crate) fn remove_nte(&mut self, a: NodeId, b: NodeId) -> bool {
        let removed = self.nodes[a].nte.swap_remove(&b);
        if removed {
            self.nodes[b].nte.swap_remove(&a);
            self.nte_pairs -= 1;
        }
        removed
    }

    /// Nodes of the tree rooted at `r` in BFS order, with their depths.
    pub(crate) fn preorder(&self, r: NodeId) -> Vec<(NodeId, usize)> {
        let mut out = vec![(r, 0)];
        let mut head = 0;
        while head < out.len() {
            let (id, d) = out[head];
            head += 1;
            out.extend(self.nodes[id].children.iter().map(|&c| (c, d + 1)));
        }
        out
    }

    pub fn contains(&self, k: VertexKey) -> bool {
        self.index.contains_key(&k)
    }

    pub fn vertex_count(&self) -> usize {
        self.index.len()
    }

    /// Number of trees, i.e. connected components.
    pub fn component_count(&self) -> usize {
        self.roots.len()
    }

    pub fn tree_edge_count(&self) -> usize {
        self.index.len() - self.roots.len()
    }

    pub fn non_tree_edge_count(&self) -> usize {
        self.nte_pairs
    }

    pub fn edge_count(&self) -> usize {
        self.tree_edge_count() + self.nte_pairs
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexKey> + '_ {
        self.index.keys().copied()
    }

    pub fn roots(&self) -> impl Iterator<Item = VertexKey> + '_ {
        self.roots.iter().map(|&id| self.key(id))
    }

    pub fn parent(&self, k: VertexKey) -> Result<Option<VertexKey>> {
        let id = self.id(k)?;
        Ok(self.nodes[id].parent.map(|p| self.key(p)))
    }

    pub fn children(&self, k: VertexKey) -> Result<Vec<VertexKey>> {
        let id = self.id(k)?;
        Ok(self.nodes[id]
            .children
            .iter()
            .map(|&c| self.key(c))
            .collect())
    }

    pub fn subtree_size(&self, k: VertexKey) -> Result<usize> {
        Ok(self.nodes[self.id(k)?].size)
    }

    /// Non-tree-edge neighbourhood of `k`.
    pub fn nte(&self, k: VertexKey) -> Result<Vec<VertexKey>> {
        let id = self.id(k)?;
        Ok(self.nodes[id].nte.iter().map(|&c| self.key(c)).collect())
    }

    pub fn has_edge(&self, u: VertexKey, v: VertexKey) -> bool {
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&a), Some(&b)) if a != b => self.adjacent(a, b),
            _ => false,
        }
    }

    pub fn is_tree_edge(&self, u: VertexKey, v: VertexKey) -> bool {
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&a), Some(&b)) => {
                self.nodes[a].parent == Some(b) || self.nodes[b].parent == Some(a)
            }
            _ => false,
        }
    }

    /// Every embedded edge once, as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(VertexKey, VertexKey)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for &id in self.index.values() {
            let k = self.key(id);
            if let Some(p) = self.nodes[id].parent {
                let pk = self.key(p);
                out.push((k.min(pk), k.max(pk)));
            }
            for &o in &self.nodes[id].nte {
                let ok = self.key(o);
                if k < ok {
                    out.push((k, ok));
                }
            }
        }
        out.sort_unstable();
        out
    }
}
