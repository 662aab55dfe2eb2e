use std::collections::HashMap;

use crate::dtree::VertexKey;

/// Insertion-only connectivity: union by rank with path compression.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    index: HashMap<VertexKey, usize>,
    keys: Vec<VertexKey>,
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl UnionFind {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&mut self, k: VertexKey) -> usize {
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(k, i);
        self.keys.push(k);
        self.parent.push(i);
        self.rank.push(0);
        self.sets += 1;
        i
    }

    fn find_slot(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    pub fn add(&mut self, k: VertexKey) {
        self.slot(k);
    }

    /// Representative of `k`'s set; unknown keys become singletons.
    pub fn find(&mut self, k: VertexKey) -> VertexKey {
        let i = self.slot(k);
        let r = self.find_slot(i);
        self.keys[r]
    }

    /// Merges the sets of `u` and `v`; returns `true` if they were distinct.
    pub fn union(&mut self, u: VertexKey, v: VertexKey) -> bool {
        let a = self.slot(u);
        let b = self.slot(v);
        let (a, b) = (self.find_slot(a), self.find_slot(b));
        if a == b {
            return false;
        }
        let (hi, lo) = if self.rank[a] >= self.rank[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.sets -= 1;
        true
    }

    pub fn connected(&mut self, u: VertexKey, v: VertexKey) -> bool {
        self.find(u) == self.find(v)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}
