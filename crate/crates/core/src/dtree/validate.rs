use serde::Serialize;

use super::{Forest, NodeId, VertexKey};

/// A broken structural invariant found by [`Forest::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A node references an arena slot that holds no live vertex.
    DanglingReference {
        vertex: VertexKey,
    },
    /// The key map and the node disagree on a key.
    KeyMismatch {
        vertex: VertexKey,
    },
    /// `child.parent == parent` and `parent.children ∋ child` disagree.
    ParentChildMismatch {
        parent: VertexKey,
        child: VertexKey,
    },
    /// The root set does not match the parent-less nodes.
    RootSetMismatch {
        vertex: VertexKey,
    },
    /// Parent links from this node never reach a root.
    Cycle {
        vertex: VertexKey,
    },
    SizeMismatch {
        vertex: VertexKey,
        stored: usize,
        actual: usize,
    },
    NteSelfLoop {
        vertex: VertexKey,
    },
    NteAsymmetry {
        from: VertexKey,
        to: VertexKey,
    },
    NteAcrossTrees {
        a: VertexKey,
        b: VertexKey,
    },
    /// The pair is both a tree edge and a non-tree edge.
    TreeAndNonTree {
        a: VertexKey,
        b: VertexKey,
    },
    NteCountMismatch {
        stored: usize,
        actual: usize,
    },
}

impl Forest {
    /// Checks every structural invariant by full traversal. Never mutates.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut alive = vec![false; self.nodes.len()];
        for (&k, &id) in &self.index {
            alive[id] = true;
            if self.nodes[id].key != k {
                out.push(Violation::KeyMismatch { vertex: k });
            }
        }

        for &id in self.index.values() {
            let n = &self.nodes[id];
            match n.parent {
                Some(p) if !alive[p] => out.push(Violation::DanglingReference { vertex: n.key }),
                Some(p) => {
                    if !self.nodes[p].children.contains(&id) {
                        out.push(Violation::ParentChildMismatch {
                            parent: self.nodes[p].key,
                            child: n.key,
                        });
                    }
                    if self.roots.contains(&id) {
                        out.push(Violation::RootSetMismatch { vertex: n.key });
                    }
                }
                None => {
                    if !self.roots.contains(&id) {
                        out.push(Violation::RootSetMismatch { vertex: n.key });
                    }
                }
            }
            for &c in &n.children {
                if !alive[c] {
                    out.push(Violation::DanglingReference { vertex: n.key });
                } else if self.nodes[c].parent != Some(id) {
                    out.push(Violation::ParentChildMismatch {
                        parent: n.key,
                        child: self.nodes[c].key,
                    });
                }
            }
        }
        for &r in &self.roots {
            if !alive[r] {
                out.push(Violation::DanglingReference {
                    vertex: self.nodes[r].key,
                });
            }
        }
        if !out.is_empty() {
            // Pointer structure is broken; derived checks would only add noise.
            return out;
        }

        // Root of every node, with a step bound to catch cycles.
        let limit = self.index.len();
        let mut root_of: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut cyclic = false;
        for &id in self.index.values() {
            let mut cur = id;
            let mut steps = 0;
            while let Some(p) = self.nodes[cur].parent {
                cur = p;
                steps += 1;
                if steps > limit {
                    out.push(Violation::Cycle {
                        vertex: self.nodes[id].key,
                    });
                    cyclic = true;
                    break;
                }
            }
            if steps <= limit {
                root_of[id] = Some(cur);
            }
        }
        if cyclic {
            return out;
        }

        for &r in &self.roots {
            let order = self.preorder(r);
            let mut actual = vec![1usize; order.len()];
            let pos: std::collections::HashMap<NodeId, usize> = order
                .iter()
                .enumerate()
                .map(|(i, &(id, _))| (id, i))
                .collect();
            for (i, &(id, _)) in order.iter().enumerate().rev() {
                if let Some(p) = self.nodes[id].parent {
                    actual[pos[&p]] += actual[i];
                }
            }
            for (i, &(id, _)) in order.iter().enumerate() {
                if self.nodes[id].size != actual[i] {
                    out.push(Violation::SizeMismatch {
                        vertex: self.nodes[id].key,
                        stored: self.nodes[id].size,
                        actual: actual[i],
                    });
                }
            }
        }

        let mut directed = 0usize;
        for &a in self.index.values() {
            let na = &self.nodes[a];
            for &b in &na.nte {
                directed += 1;
                if !alive[b] {
                    out.push(Violation::DanglingReference { vertex: na.key });
                    continue;
                }
                let kb = self.nodes[b].key;
                if a == b {
                    out.push(Violation::NteSelfLoop { vertex: na.key });
                    continue;
                }
                if !self.nodes[b].nte.contains(&a) {
                    out.push(Violation::NteAsymmetry {
                        from: na.key,
                        to: kb,
                    });
                }
                if root_of[a] != root_of[b] && na.key < kb {
                    out.push(Violation::NteAcrossTrees { a: na.key, b: kb });
                }
                if (na.parent == Some(b) || self.nodes[b].parent == Some(a)) && na.key < kb {
                    out.push(Violation::TreeAndNonTree { a: na.key, b: kb });
                }
            }
        }
        if directed != 2 * self.nte_pairs {
            out.push(Violation::NteCountMismatch {
                stored: self.nte_pairs,
                actual: directed / 2,
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::Policy;
    use super::*;

    fn k(x: u64) -> VertexKey {
        VertexKey(x)
    }

    fn sample() -> Forest {
        let e = |a, b| (k(a), k(b));
        Forest::from_tree_edges(Policy::dtree(), &[e(1, 2), e(1, 3), e(3, 4)], &[e(2, 4)]).unwrap()
    }

    #[test]
    fn healthy_forest_has_no_violations() {
        assert!(sample().validate().is_empty());
    }

    #[test]
    fn corrupted_size_is_reported_once() {
        let mut f = sample();
        let id = f.index[&k(4)];
        f.nodes[id].size = 5;
        // 4's size is wrong; its ancestors' stored sizes are still right.
        assert_eq!(
            f.validate(),
            vec![Violation::SizeMismatch {
                vertex: k(4),
                stored: 5,
                actual: 1
            }]
        );
    }

    #[test]
    fn broken_nte_symmetry_is_reported() {
        let mut f = sample();
        let a = f.index[&k(2)];
        let b = f.index[&k(4)];
        f.nodes[b].nte.swap_remove(&a);
        let v = f.validate();
        assert!(v.contains(&Violation::NteAsymmetry {
            from: k(2),
            to: k(4)
        }));
    }

    #[test]
    fn nte_on_tree_edge_is_reported() {
        let mut f = sample();
        let a = f.index[&k(1)];
        let b = f.index[&k(2)];
        f.add_nte(a, b);
        assert_eq!(
            f.validate(),
            vec![Violation::TreeAndNonTree { a: k(1), b: k(2) }]
        );
    }

    #[test]
    fn parent_cycle_is_reported() {
        let mut f = sample();
        let one = f.index[&k(1)];
        let two = f.index[&k(2)];
        // 1 <-> 2 point at each other; the root set still holds 1.
        f.nodes[one].parent = Some(two);
        f.nodes[two].children.insert(one);
        let v = f.validate();
        assert!(v.contains(&Violation::RootSetMismatch { vertex: k(1) }));
    }
}
