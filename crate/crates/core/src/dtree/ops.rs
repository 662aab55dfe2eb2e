use std::collections::VecDeque;

use super::{
    DTreeError, DeleteOutcome, Forest, InsertOutcome, NodeId, ReplacementRule, Result, RootInfo,
    VertexKey,
};

impl Forest {
    /// Walks parent links up to the root: `(root, depth, gate child)`.
    #[inline]
    pub(crate) fn walk_root(&self, mut id: NodeId) -> (NodeId, usize, Option<NodeId>) {
        let mut depth = 0;
        let mut gate = None;
        while let Some(p) = self.nodes[id].parent {
            gate = Some(id);
            id = p;
            depth += 1;
        }
        (id, depth, gate)
    }

    pub(crate) fn reroot_id(&mut self, w: NodeId) -> NodeId {
        let Some(mut cur) = self.nodes[w].parent else {
            return w;
        };
        self.nodes[w].parent = None;
        let mut ch = w;
        // Reverse the parent/child links along the path to the old root.
        loop {
            let g = self.nodes[cur].parent;
            self.nodes[cur].parent = Some(ch);
            self.nodes[cur].children.swap_remove(&ch);
            self.nodes[ch].children.insert(cur);
            ch = cur;
            match g {
                Some(g) => cur = g,
                None => break,
            }
        }
        let old_root = ch;
        // Walk back down to w fixing sizes: each node loses the part that is
        // now above it, its new parent gains it.
        while let Some(p) = self.nodes[ch].parent {
            self.nodes[ch].size -= self.nodes[p].size;
            self.nodes[p].size += self.nodes[ch].size;
            ch = p;
        }
        self.roots.swap_remove(&old_root);
        self.roots.insert(w);
        w
    }

    /// Hangs root `v` below `u` (whose root is `ru`) and returns the root of
    /// the merged tree.
    pub(crate) fn link_id(&mut self, u: NodeId, ru: NodeId, v: NodeId) -> NodeId {
        self.nodes[u].children.insert(v);
        self.nodes[v].parent = Some(u);
        self.roots.swap_remove(&v);
        let added = self.nodes[v].size;
        let total = self.nodes[ru].size + added;
        let mut heavy = None;
        let mut i = Some(u);
        while let Some(x) = i {
            self.nodes[x].size += added;
            if heavy.is_none() && 2 * self.nodes[x].size > total {
                heavy = Some(x);
            }
            i = self.nodes[x].parent;
        }
        match heavy {
            Some(m) if m != ru && self.policy.restore_centroid => self.reroot_id(m),
            _ => ru,
        }
    }

    /// Cuts `v` from its parent: `(v, root of the remaining tree)`.
    pub(crate) fn unlink_id(&mut self, v: NodeId) -> (NodeId, NodeId) {
        let p = self.nodes[v].parent.expect("unlink of a root");
        let s = self.nodes[v].size;
        let mut i = v;
        while let Some(q) = self.nodes[i].parent {
            i = q;
            self.nodes[i].size -= s;
        }
        self.nodes[p].children.swap_remove(&v);
        self.nodes[v].parent = None;
        self.roots.insert(v);
        (v, i)
    }

    /// Root of `id`'s tree, rerooting at the gate child first when it holds
    /// more than half of the tree.
    pub(crate) fn locate(&mut self, id: NodeId) -> NodeId {
        let (root, _, gate) = self.walk_root(id);
        match gate {
            Some(d)
                if self.policy.restore_centroid
                    && 2 * self.nodes[d].size > self.nodes[root].size =>
            {
                self.reroot_id(d)
            }
            _ => root,
        }
    }

    /// Roots of `a` and `b` after `locate` on both. Locating `b` may reroot
    /// `a`'s tree too, in which case the first answer is stale.
    fn locate_pair(&mut self, a: NodeId, b: NodeId) -> (NodeId, NodeId) {
        let ra = self.locate(a);
        let rb = self.locate(b);
        if self.nodes[ra].parent.is_some() {
            (rb, rb)
        } else {
            (ra, rb)
        }
    }

    pub(crate) fn insert_nte_id(&mut self, u: NodeId, v: NodeId, r: NodeId) -> NodeId {
        let (_, du, _) = self.walk_root(u);
        let (_, dv, _) = self.walk_root(v);
        let (l, h, delta) = if du <= dv {
            (u, v, dv - du)
        } else {
            (v, u, du - dv)
        };
        if delta < 2 || !self.policy.shortcut_nte {
            self.add_nte(u, v);
            return r;
        }
        // The (delta-2)-nd ancestor of h is cut off; its old tree edge
        // becomes a non-tree edge and (l, h) becomes a tree edge.
        let mut i = h;
        for _ in 0..delta - 2 {
            i = self.nodes[i].parent.expect("ancestor above l");
        }
        let p = self.nodes[i].parent.expect("ancestor above l");
        self.add_nte(i, p);
        self.unlink_id(i);
        let h = self.reroot_id(h);
        self.link_id(l, r, h)
    }

    pub(crate) fn insert_te_id(&mut self, u: NodeId, v: NodeId, ru: NodeId, rv: NodeId) -> NodeId {
        if self.nodes[ru].size < self.nodes[rv].size {
            let u = self.reroot_id(u);
            self.link_id(v, rv, u)
        } else {
            let v = self.reroot_id(v);
            self.link_id(u, ru, v)
        }
    }

    pub(crate) fn delete_te_id(&mut self, u: NodeId, v: NodeId) -> DeleteOutcome {
        let ch = if self.nodes[v].parent == Some(u) {
            v
        } else {
            u
        };
        let (ch, r) = self.unlink_id(ch);
        let (small, large) = if self.nodes[ch].size < self.nodes[r].size {
            (ch, r)
        } else {
            (r, ch)
        };
        let small_total = self.nodes[small].size;
        let first_only = self.policy.replacement == ReplacementRule::FirstFound;

        // (node in small tree, node in large tree, depth of the latter)
        let mut best: Option<(NodeId, NodeId, usize)> = None;
        let mut heavy = None;
        let mut queue = VecDeque::new();
        queue.push_back(small);
        'bfs: while let Some(x) = queue.pop_front() {
            if x != small && 2 * self.nodes[x].size > small_total {
                // BFS order: the last one seen is the deepest.
                heavy = Some(x);
            }
            for &y in &self.nodes[x].nte {
                let (ry, dy, _) = self.walk_root(y);
                if ry == large && best.is_none_or(|(_, _, d)| dy < d) {
                    best = Some((x, y, dy));
                    if first_only {
                        break 'bfs;
                    }
                }
            }
            queue.extend(self.nodes[x].children.iter().copied());
        }

        match best {
            None => {
                let small = match heavy {
                    Some(m) if self.policy.restore_centroid => self.reroot_id(m),
                    _ => small,
                };
                DeleteOutcome::SplitInto(self.key(small), self.key(large))
            }
            Some((x, y, _)) => {
                self.remove_nte(x, y);
                let root = self.insert_te_id(x, y, small, large);
                DeleteOutcome::Reconnected(self.key(root))
            }
        }
    }

    /// Root, depth and gate child of `u`. Does not modify the forest.
    pub fn find_root(&self, u: VertexKey) -> Result<RootInfo> {
        let (root, depth, gate) = self.walk_root(self.id(u)?);
        Ok(RootInfo {
            root: self.key(root),
            depth,
            gate_child: gate.map(|g| self.key(g)),
        })
    }

    /// Makes `w` the root of its tree.
    pub fn reroot(&mut self, w: VertexKey) -> Result<VertexKey> {
        let id = self.id(w)?;
        {
            let r = self.reroot_id(id);
            Ok(self.key(r))
        }
    }

    /// Attaches the tree rooted at `n_v` below `n_u`, whose tree is rooted at
    /// `r_u`. Returns the root of the merged tree, which moves to the deepest
    /// node on the `n_u` path holding more than half of the merged tree when
    /// centroid restoration is enabled.
    pub fn link(&mut self, n_u: VertexKey, r_u: VertexKey, n_v: VertexKey) -> Result<VertexKey> {
        let u = self.id(n_u)?;
        let ru = self.root_id(r_u)?;
        let v = self.root_id(n_v)?;
        if self.walk_root(u).0 != ru {
            return Err(DTreeError::NotARoot(r_u));
        }
        if ru == v {
            return Err(DTreeError::SameTree(n_u, n_v));
        }
        {
            let r = self.link_id(u, ru, v);
            Ok(self.key(r))
        }
    }

    /// Cuts `n_v` from its parent. Returns `(n_v, root of the remaining tree)`.
    pub fn unlink(&mut self, n_v: VertexKey) -> Result<(VertexKey, VertexKey)> {
        let v = self.id(n_v)?;
        if self.nodes[v].parent.is_none() {
            return Err(DTreeError::IsRoot(n_v));
        }
        let (a, b) = self.unlink_id(v);
        Ok((self.key(a), self.key(b)))
    }

    /// Connectivity query. May reroot either tree as a side effect.
    pub fn conn(&mut self, u: VertexKey, v: VertexKey) -> Result<bool> {
        let a = self.id(u)?;
        let b = self.id(v)?;
        let (ra, rb) = self.locate_pair(a, b);
        Ok(ra == rb)
    }

    /// Inserts the undirected edge `(u, v)`, creating missing vertices.
    pub fn insert_edge(&mut self, u: VertexKey, v: VertexKey) -> Result<InsertOutcome> {
        if u == v {
            return Err(DTreeError::SelfLoop(u));
        }
        let a = self.ensure_vertex(u);
        let b = self.ensure_vertex(v);
        if self.adjacent(a, b) {
            return Ok(InsertOutcome::AlreadyPresent);
        }
        let (ra, rb) = self.locate_pair(a, b);
        if ra == rb {
            let root = self.insert_nte_id(a, b, ra);
            Ok(InsertOutcome::NonTreeEdge(self.key(root)))
        } else {
            let root = self.insert_te_id(a, b, ra, rb);
            Ok(InsertOutcome::TreeEdge(self.key(root)))
        }
    }

    /// Inserts `(n_u, n_v)` between two nodes of the tree rooted at `r`.
    pub fn insert_nte(
        &mut self,
        n_u: VertexKey,
        n_v: VertexKey,
        r: VertexKey,
    ) -> Result<VertexKey> {
        let u = self.id(n_u)?;
        let v = self.id(n_v)?;
        let r_id = self.root_id(r)?;
        if u == v {
            return Err(DTreeError::SelfLoop(n_u));
        }
        if self.adjacent(u, v) {
            return Err(DTreeError::EdgeExists(n_u, n_v));
        }
        if self.walk_root(u).0 != r_id || self.walk_root(v).0 != r_id {
            return Err(DTreeError::NotSameTree(n_u, n_v));
        }
        {
            let r = self.insert_nte_id(u, v, r_id);
            Ok(self.key(r))
        }
    }

    /// Inserts the tree edge `(n_u, n_v)` joining the trees rooted at `r_u` and
    /// `r_v`. The smaller tree (`n_v`'s on ties) is rerooted at its endpoint.
    pub fn insert_te(
        &mut self,
        n_u: VertexKey,
        n_v: VertexKey,
        r_u: VertexKey,
        r_v: VertexKey,
    ) -> Result<VertexKey> {
        let u = self.id(n_u)?;
        let v = self.id(n_v)?;
        let ru = self.root_id(r_u)?;
        let rv = self.root_id(r_v)?;
        if self.walk_root(u).0 != ru || self.walk_root(v).0 != rv {
            return Err(DTreeError::NotSameTree(n_u, n_v));
        }
        if ru == rv {
            return Err(DTreeError::SameTree(n_u, n_v));
        }
        {
            let r = self.insert_te_id(u, v, ru, rv);
            Ok(self.key(r))
        }
    }

    /// Deletes the edge `(u, v)`, whichever kind it is.
    pub fn delete_edge(&mut self, u: VertexKey, v: VertexKey) -> Result<DeleteOutcome> {
        let (Some(&a), Some(&b)) = (self.index.get(&u), self.index.get(&v)) else {
            return Err(DTreeError::NoSuchEdge(u, v));
        };
        if self.nodes[a].parent == Some(b) || self.nodes[b].parent == Some(a) {
            Ok(self.delete_te_id(a, b))
        } else if self.remove_nte(a, b) {
            Ok(DeleteOutcome::NonTree)
        } else {
            Err(DTreeError::NoSuchEdge(u, v))
        }
    }

    pub fn delete_nte(&mut self, n_u: VertexKey, n_v: VertexKey) -> Result<()> {
        let a = self.id(n_u)?;
        let b = self.id(n_v)?;
        if self.remove_nte(a, b) {
            Ok(())
        } else {
            Err(DTreeError::NoSuchEdge(n_u, n_v))
        }
    }

    /// Deletes the tree edge between `n_u` and `n_v` (either order) and
    /// searches the smaller half for a replacement edge.
    pub fn delete_te(&mut self, n_u: VertexKey, n_v: VertexKey) -> Result<DeleteOutcome> {
        let a = self.id(n_u)?;
        let b = self.id(n_v)?;
        if self.nodes[a].parent != Some(b) && self.nodes[b].parent != Some(a) {
            return Err(DTreeError::NotTreeEdge(n_u, n_v));
        }
        Ok(self.delete_te_id(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::super::Policy;
    use super::*;

    fn k(x: u64) -> VertexKey {
        VertexKey(x)
    }

    fn path(n: u64) -> Forest {
        let edges: Vec<_> = (1..n).map(|i| (k(i), k(i + 1))).collect();
        Forest::from_tree_edges(Policy::dtree(), &edges, &[]).unwrap()
    }

    #[test]
    fn find_root_of_root() {
        let f = path(3);
        let info = f.find_root(k(1)).unwrap();
        assert_eq!(
            info,
            RootInfo {
                root: k(1),
                depth: 0,
                gate_child: None
            }
        );
        let info = f.find_root(k(3)).unwrap();
        assert_eq!(
            info,
            RootInfo {
                root: k(1),
                depth: 2,
                gate_child: Some(k(2))
            }
        );
        assert_eq!(f.find_root(k(9)), Err(DTreeError::UnknownVertex(k(9))));
    }

    #[test]
    fn reroot_at_root_is_noop() {
        let mut f = path(4);
        let before = f.edges();
        assert_eq!(f.reroot(k(1)).unwrap(), k(1));
        assert_eq!(f.parent(k(2)).unwrap(), Some(k(1)));
        assert_eq!(f.edges(), before);
    }

    #[test]
    fn reroot_path_reverses_it() {
        let mut f = path(4);
        f.reroot(k(4)).unwrap();
        assert_eq!(f.parent(k(1)).unwrap(), Some(k(2)));
        assert_eq!(f.subtree_size(k(4)).unwrap(), 4);
        assert_eq!(f.subtree_size(k(2)).unwrap(), 2);
        assert!(f.validate().is_empty());
    }

    #[test]
    fn link_two_singletons() {
        let mut f = Forest::new();
        f.add_vertex(k(1)).unwrap();
        f.add_vertex(k(2)).unwrap();
        assert_eq!(f.link(k(1), k(1), k(2)).unwrap(), k(1));
        assert_eq!(f.subtree_size(k(1)).unwrap(), 2);
        assert_eq!(f.parent(k(2)).unwrap(), Some(k(1)));
    }

    #[test]
    fn link_precondition_errors() {
        let mut f = path(3);
        f.add_vertex(k(9)).unwrap();
        assert_eq!(f.link(k(3), k(2), k(9)), Err(DTreeError::NotARoot(k(2))));
        assert_eq!(f.link(k(3), k(1), k(2)), Err(DTreeError::NotARoot(k(2))));
        assert_eq!(
            f.link(k(3), k(1), k(1)),
            Err(DTreeError::SameTree(k(3), k(1)))
        );
        f.add_vertex(k(8)).unwrap();
        // n_u not in r_u's tree
        assert_eq!(f.link(k(8), k(1), k(9)), Err(DTreeError::NotARoot(k(1))));
    }

    #[test]
    fn unlink_two_node_tree() {
        let mut f = path(2);
        assert_eq!(f.unlink(k(2)).unwrap(), (k(2), k(1)));
        assert_eq!(f.subtree_size(k(1)).unwrap(), 1);
        assert_eq!(f.subtree_size(k(2)).unwrap(), 1);
        assert_eq!(f.unlink(k(1)), Err(DTreeError::IsRoot(k(1))));
    }

    #[test]
    fn conn_reflexive_without_reroot() {
        let mut f = path(3);
        assert!(f.conn(k(1), k(1)).unwrap());
        assert_eq!(f.find_root(k(3)).unwrap().root, k(1));
    }

    #[test]
    fn conn_restores_centroid_through_gate_child() {
        // 1 - 2 - 3 - 4 - 5 rooted at 1: gate child 2 has size 4 > 5/2.
        let mut f = path(5);
        assert!(f.conn(k(5), k(1)).unwrap());
        assert_eq!(f.find_root(k(1)).unwrap().root, k(2));
        // Second query moves one more step toward the centroid 3.
        assert!(f.conn(k(5), k(5)).unwrap());
        assert_eq!(f.find_root(k(1)).unwrap().root, k(3));
        assert!(f.validate().is_empty());
    }

    #[test]
    fn insert_same_edge_twice_is_noop() {
        let mut f = Forest::new();
        assert_eq!(
            f.insert_edge(k(1), k(2)).unwrap(),
            InsertOutcome::TreeEdge(k(1))
        );
        let before = f.edges();
        assert_eq!(
            f.insert_edge(k(2), k(1)).unwrap(),
            InsertOutcome::AlreadyPresent
        );
        assert_eq!(f.edges(), before);
        assert_eq!(f.insert_edge(k(3), k(3)), Err(DTreeError::SelfLoop(k(3))));
    }

    #[test]
    fn insert_between_siblings_only_touches_nte() {
        let e = |a, b| (k(a), k(b));
        let mut f = Forest::from_tree_edges(Policy::dtree(), &[e(1, 2), e(1, 3)], &[]).unwrap();
        assert_eq!(f.insert_nte(k(2), k(3), k(1)).unwrap(), k(1));
        assert_eq!(f.nte(k(2)).unwrap(), vec![k(3)]);
        assert_eq!(f.parent(k(3)).unwrap(), Some(k(1)));
        assert_eq!(
            f.insert_nte(k(2), k(3), k(1)),
            Err(DTreeError::EdgeExists(k(2), k(3)))
        );
    }

    #[test]
    fn insert_nte_precondition_errors() {
        let mut f = path(3);
        f.add_vertex(k(7)).unwrap();
        assert_eq!(
            f.insert_nte(k(1), k(7), k(1)),
            Err(DTreeError::NotSameTree(k(1), k(7)))
        );
        assert_eq!(
            f.insert_nte(k(1), k(3), k(2)),
            Err(DTreeError::NotARoot(k(2)))
        );
    }

    #[test]
    fn locating_second_endpoint_may_move_first_root() {
        // 3 -> 7 -> 4: locating 4 reroots at 7, which is also 3's tree
        let mut f = Forest::new();
        f.insert_edge(k(3), k(7)).unwrap();
        f.insert_edge(k(7), k(4)).unwrap();
        f.reroot(k(3)).unwrap();
        assert!(f.conn(k(3), k(4)).unwrap());
        f.reroot(k(3)).unwrap();
        assert_eq!(
            f.insert_edge(k(3), k(4)).unwrap(),
            InsertOutcome::NonTreeEdge(k(7))
        );
        assert!(f.validate().is_empty());
    }

    #[test]
    fn insert_te_merges_singletons() {
        let mut f = Forest::new();
        f.add_vertex(k(1)).unwrap();
        f.add_vertex(k(2)).unwrap();
        let root = f.insert_te(k(1), k(2), k(1), k(2)).unwrap();
        // equal sizes: n_v's tree is hung below n_u
        assert_eq!(root, k(1));
        assert_eq!(f.parent(k(2)).unwrap(), Some(k(1)));
        assert_eq!(f.component_count(), 1);
        assert_eq!(
            f.insert_te(k(1), k(2), k(1), k(1)),
            Err(DTreeError::SameTree(k(1), k(2)))
        );
    }

    #[test]
    fn delete_sole_edge_splits() {
        let mut f = Forest::new();
        f.insert_edge(k(1), k(2)).unwrap();
        let out = f.delete_edge(k(1), k(2)).unwrap();
        // sizes tie after the cut, so the old root's side counts as "smaller"
        assert_eq!(out, DeleteOutcome::SplitInto(k(1), k(2)));
        assert_eq!(f.component_count(), 2);
        assert_eq!(
            f.delete_edge(k(1), k(2)),
            Err(DTreeError::NoSuchEdge(k(1), k(2)))
        );
    }

    #[test]
    fn delete_te_accepts_either_order() {
        let mut f = path(3);
        assert!(matches!(
            f.delete_te(k(2), k(1)).unwrap(),
            DeleteOutcome::SplitInto(..)
        ));
        let mut f = path(3);
        assert!(matches!(
            f.delete_te(k(1), k(2)).unwrap(),
            DeleteOutcome::SplitInto(..)
        ));
        assert_eq!(
            f.delete_te(k(1), k(3)),
            Err(DTreeError::NotTreeEdge(k(1), k(3)))
        );
    }

    #[test]
    fn delete_nte_errors_on_missing_edge() {
        let mut f = path(3);
        assert_eq!(
            f.delete_nte(k(1), k(3)),
            Err(DTreeError::NoSuchEdge(k(1), k(3)))
        );
        // tree edges are not in nte
        assert_eq!(
            f.delete_nte(k(1), k(2)),
            Err(DTreeError::NoSuchEdge(k(1), k(2)))
        );
    }

    #[test]
    fn split_restores_centroid_of_smaller_tree() {
        // root 1 with a long path 2-3-4-5 and a path 6-7-8-9-10-11 below it.
        let e = |a, b| (k(a), k(b));
        let edges = [
            e(1, 2),
            e(2, 3),
            e(3, 4),
            e(4, 5),
            e(1, 6),
            e(6, 7),
            e(7, 8),
            e(8, 9),
            e(9, 10),
            e(10, 11),
        ];
        let mut f = Forest::from_tree_edges(Policy::dtree(), &edges, &[]).unwrap();
        // Cutting (1, 6) leaves {1..5} rooted at 1 (smaller, 5 < 6).
        let out = f.delete_edge(k(1), k(6)).unwrap();
        // {1,2,3,4,5} is a path rooted at its end; its centroid is 3.
        assert_eq!(out, DeleteOutcome::SplitInto(k(3), k(6)));
        assert!(f.validate().is_empty());
    }
}
