use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use thiserror::Error;

use crate::dtree::VertexKey;

/// Default size limit for the all-sources oracles (`opt_bfs_tree`, `avg_sp`).
pub const DEFAULT_COMPONENT_CAP: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexKey),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexKey),
    #[error("component of {size} vertices exceeds the cap of {cap}")]
    ComponentTooLarge { size: usize, cap: usize },
}

/// Plain undirected simple graph, kept independently of any spanning forest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdjacencyGraph {
    adj: BTreeMap<VertexKey, BTreeSet<VertexKey>>,
    edges: usize,
}

/// A BFS spanning tree of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: VertexKey,
    pub s_d: u64,
    /// Parent of every vertex of the component, `None` for the root.
    pub parent: BTreeMap<VertexKey, Option<VertexKey>>,
}

impl BfsTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Tree edges as `(parent, child)`.
    pub fn edges(&self) -> Vec<(VertexKey, VertexKey)> {
        self.parent
            .iter()
            .filter_map(|(&c, &p)| p.map(|p| (p, c)))
            .collect()
    }

    /// Vertices in BFS order from the root, with their depths.
    fn order(&self) -> Vec<(VertexKey, usize)> {
        let mut children: BTreeMap<VertexKey, Vec<VertexKey>> = BTreeMap::new();
        for (&c, &p) in &self.parent {
            if let Some(p) = p {
                children.entry(p).or_default().push(c);
            }
        }
        let mut out = vec![(self.root, 0)];
        let mut i = 0;
        while i < out.len() {
            let (x, d) = out[i];
            if let Some(cs) = children.get(&x) {
                out.extend(cs.iter().map(|&c| (c, d + 1)));
            }
            i += 1;
        }
        out
    }

    pub fn depths(&self) -> BTreeMap<VertexKey, usize> {
        self.order().into_iter().collect()
    }

    pub fn subtree_sizes(&self) -> BTreeMap<VertexKey, usize> {
        let mut size: BTreeMap<VertexKey, usize> = BTreeMap::new();
        for (x, _) in self.order().into_iter().rev() {
            let s = *size.entry(x).or_insert(1);
            if let Some(p) = self.parent[&x] {
                *size.entry(p).or_insert(1) += s;
            }
        }
        size
    }

    /// Sum over tree edges of the smaller side left by removing the edge.
    pub fn s_c(&self) -> u64 {
        let n = self.len();
        self.subtree_sizes()
            .into_iter()
            .filter(|(x, _)| *x != self.root)
            .map(|(_, s)| s.min(n - s) as u64)
            .sum()
    }

    pub fn depth_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for (_, d) in self.order() {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    }
}

impl AdjacencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: &[(VertexKey, VertexKey)]) -> Result<Self, OracleError> {
        let mut g = Self::new();
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, k: VertexKey) {
        self.adj.entry(k).or_default();
    }

    /// Adds `(u, v)`; returns `false` if it was already present.
    pub fn insert_edge(&mut self, u: VertexKey, v: VertexKey) -> Result<bool, OracleError> {
        if u == v {
            return Err(OracleError::SelfLoop(u));
        }
        let fresh = self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        if fresh {
            self.edges += 1;
        }
        Ok(fresh)
    }

    /// Removes `(u, v)`; returns `false` if it was absent. Vertices stay.
    pub fn remove_edge(&mut self, u: VertexKey, v: VertexKey) -> bool {
        let gone = self.adj.get_mut(&u).is_some_and(|s| s.remove(&v));
        if gone {
            self.adj.get_mut(&v).map(|s| s.remove(&u));
            self.edges -= 1;
        }
        gone
    }

    pub fn contains(&self, k: VertexKey) -> bool {
        self.adj.contains_key(&k)
    }

    pub fn has_edge(&self, u: VertexKey, v: VertexKey) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexKey> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, k: VertexKey) -> impl Iterator<Item = VertexKey> + '_ {
        self.adj.get(&k).into_iter().flatten().copied()
    }

    /// Every edge once as `(min, max)`, ascending.
    pub fn edges(&self) -> Vec<(VertexKey, VertexKey)> {
        self.adj
            .iter()
            .flat_map(|(&u, s)| s.range(u..).map(move |&v| (u, v)))
            .collect()
    }

    fn check(&self, k: VertexKey) -> Result<(), OracleError> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(OracleError::UnknownVertex(k))
        }
    }

    /// BFS distances from `src` to every reachable vertex.
    pub fn distances_from(&self, src: VertexKey) -> Result<HashMap<VertexKey, usize>, OracleError> {
        self.check(src)?;
        let mut dist = HashMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            for y in self.neighbors(x) {
                dist.entry(y).or_insert_with(|| {
                    queue.push_back(y);
                    d + 1
                });
            }
        }
        Ok(dist)
    }

    /// Ground-truth connectivity by breadth-first search.
    pub fn oracle_conn(&self, u: VertexKey, v: VertexKey) -> Result<bool, OracleError> {
        self.check(v)?;
        if u == v {
            return self.check(u).map(|_| true);
        }
        self.check(u)?;
        let mut seen = HashSet::from([u]);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if y == v {
                    return Ok(true);
                }
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Ok(false)
    }

    /// Vertices of the component containing `k`, ascending.
    pub fn component_of(&self, k: VertexKey) -> Result<Vec<VertexKey>, OracleError> {
        let mut out: Vec<_> = self.distances_from(k)?.into_keys().collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Component index of every vertex; components are numbered in order of
    /// their smallest vertex.
    pub fn component_labels(&self) -> HashMap<VertexKey, usize> {
        let mut label = HashMap::with_capacity(self.adj.len());
        let mut next = 0;
        let mut queue = VecDeque::new();
        for &s in self.adj.keys() {
            if label.contains_key(&s) {
                continue;
            }
            label.insert(s, next);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if let Entry::Vacant(e) = label.entry(y) {
                        e.insert(next);
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// One representative (smallest vertex) per component.
    pub fn component_representatives(&self) -> Vec<VertexKey> {
        let labels = self.component_labels();
        let mut seen = vec![false; labels.values().max().map_or(0, |m| m + 1)];
        let mut reps = Vec::new();
        for &k in self.adj.keys() {
            let l = labels[&k];
            if !seen[l] {
                seen[l] = true;
                reps.push(k);
            }
        }
        reps
    }

    pub fn component_count(&self) -> usize {
        self.component_representatives().len()
    }

    fn dense_component(
        &self,
        k: VertexKey,
        cap: usize,
    ) -> Result<(Vec<VertexKey>, Vec<Vec<u32>>), OracleError> {
        let keys = self.component_of(k)?;
        if keys.len() > cap {
            return Err(OracleError::ComponentTooLarge {
                size: keys.len(),
                cap,
            });
        }
        let pos: HashMap<VertexKey, u32> = keys
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i as u32))
            .collect();
        let adj = keys
            .iter()
            .map(|&k| self.neighbors(k).map(|n| pos[&n]).collect())
            .collect();
        Ok((keys, adj))
    }

    /// Minimum-`S_d` BFS tree over all possible roots of the component of
    /// `component_of`. Equal sums go to the smallest root key.
    pub fn opt_bfs_tree(
        &self,
        component_of: VertexKey,
        cap: usize,
    ) -> Result<BfsTree, OracleError> {
        let (keys, adj) = self.dense_component(component_of, cap)?;
        let n = keys.len();
        let mut dist = vec![u32::MAX; n];
        let mut queue = Vec::with_capacity(n);
        let mut best = (u64::MAX, 0usize);
        for src in 0..n {
            let s = bfs_sum(&adj, src, &mut dist, &mut queue);
            if s < best.0 {
                best = (s, src);
            }
        }
        let (s_d, root) = best;
        // Rebuild the tree for the winning root, neighbours in key order.
        let mut parent = BTreeMap::new();
        parent.insert(keys[root], None);
        let mut queue = VecDeque::from([root]);
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                let y = y as usize;
                if !seen[y] {
                    seen[y] = true;
                    parent.insert(keys[y], Some(keys[x]));
                    queue.push_back(y);
                }
            }
        }
        Ok(BfsTree {
            root: keys[root],
            s_d,
            parent,
        })
    }

    /// `S_d` of the optimal BFS tree of every component, summed.
    pub fn opt_s_d_total(&self, cap: usize) -> Result<u64, OracleError> {
        self.component_representatives()
            .into_iter()
            .map(|r| self.opt_bfs_tree(r, cap).map(|t| t.s_d))
            .sum()
    }

    /// Mean shortest-path length over unordered vertex pairs of a component.
    /// A single vertex has no pairs and yields 0.
    pub fn avg_sp(&self, component_of: VertexKey, cap: usize) -> Result<Ratio<u64>, OracleError> {
        let (_, adj) = self.dense_component(component_of, cap)?;
        let n = adj.len() as u64;
        if n < 2 {
            return Ok(Ratio::from_integer(0));
        }
        let mut dist = vec![u32::MAX; adj.len()];
        let mut queue = Vec::with_capacity(adj.len());
        // each unordered pair is counted from both ends
        let twice: u64 = (0..adj.len())
            .map(|s| bfs_sum(&adj, s, &mut dist, &mut queue))
            .sum();
        Ok(Ratio::new(twice / 2, n * (n - 1) / 2))
    }

    /// Longest shortest path inside a component.
    pub fn diameter(&self, component_of: VertexKey, cap: usize) -> Result<usize, OracleError> {
        let (_, adj) = self.dense_component(component_of, cap)?;
        let mut dist = vec![u32::MAX; adj.len()];
        let mut queue = Vec::with_capacity(adj.len());
        let mut diam = 0;
        for s in 0..adj.len() {
            bfs_sum(&adj, s, &mut dist, &mut queue);
            diam = diam.max(queue.iter().map(|&q| dist[q as usize]).max().unwrap_or(0));
        }
        Ok(diam as usize)
    }
}

/// Sum of BFS distances from `src`; leaves the visit order in `queue` and the
/// distances in `dist`.
fn bfs_sum(adj: &[Vec<u32>], src: usize, dist: &mut [u32], queue: &mut Vec<u32>) -> u64 {
    for &q in queue.iter() {
        dist[q as usize] = u32::MAX;
    }
    queue.clear();
    dist[src] = 0;
    queue.push(src as u32);
    let mut head = 0;
    let mut sum = 0u64;
    while head < queue.len() {
        let x = queue[head] as usize;
        head += 1;
        let d = dist[x];
        sum += d as u64;
        for &y in &adj[x] {
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = d + 1;
                queue.push(y);
            }
        }
    }
    sum
}
