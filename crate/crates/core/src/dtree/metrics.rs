//! Shape metrics of D-trees: root distance sums, cut-number sums, centroids.

use std::collections::BTreeMap;

use super::{Forest, Result, VertexKey};

impl Forest {
    /// Sum of the depths of all nodes in the tree rooted at `r`.
    pub fn s_d(&self, r: VertexKey) -> Result<u64> {
        let r = self.root_id(r)?;
        Ok(self.preorder(r).iter().map(|&(_, d)| d as u64).sum())
    }

    /// Sum over tree edges of the size of the smaller side after cutting the
    /// edge. Correct for any root, centroid or not.
    pub fn s_c(&self, r: VertexKey) -> Result<u64> {
        let r = self.root_id(r)?;
        let total = self.nodes[r].size;
        Ok(self
            .preorder(r)
            .iter()
            .skip(1)
            .map(|&(id, _)| {
                let s = self.nodes[id].size;
                s.min(total - s) as u64
            })
            .sum())
    }

    /// A centroid of the tree rooted at `r`: descend into a child holding more
    /// than half of the tree until there is none. Of two adjacent centroids the
    /// one closer to `r` is returned.
    pub fn centroid(&self, r: VertexKey) -> Result<VertexKey> {
        let mut cur = self.root_id(r)?;
        let total = self.nodes[cur].size;
        'descend: loop {
            for &c in &self.nodes[cur].children {
                if 2 * self.nodes[c].size > total {
                    cur = c;
                    continue 'descend;
                }
            }
            return Ok(self.key(cur));
        }
    }

    /// Number of nodes at each depth of the tree rooted at `r`.
    pub fn depth_histogram(&self, r: VertexKey) -> Result<BTreeMap<usize, usize>> {
        let r = self.root_id(r)?;
        let mut hist = BTreeMap::new();
        for (_, d) in self.preorder(r) {
            *hist.entry(d).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// `s_d` summed over every tree of the forest.
    pub fn s_d_total(&self) -> u64 {
        self.roots().map(|r| self.s_d(r).unwrap_or(0)).sum()
    }

    pub fn s_c_total(&self) -> u64 {
        self.roots().map(|r| self.s_c(r).unwrap_or(0)).sum()
    }

    /// Depth histogram merged over all trees.
    pub fn depth_histogram_total(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for &r in &self.roots {
            for (_, d) in self.preorder(r) {
                *hist.entry(d).or_insert(0) += 1;
            }
        }
        hist
    }
}

#[cfg(test)]
mod tests {
    use super::super::{DTreeError, Policy};
    use super::*;

    fn k(x: u64) -> VertexKey {
        VertexKey(x)
    }

    #[test]
    fn singleton_metrics() {
        let mut f = Forest::new();
        f.add_vertex(k(1)).unwrap();
        assert_eq!(f.s_d(k(1)).unwrap(), 0);
        assert_eq!(f.s_c(k(1)).unwrap(), 0);
        assert_eq!(f.centroid(k(1)).unwrap(), k(1));
        assert_eq!(f.depth_histogram(k(1)).unwrap(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn two_node_tree_has_cut_sum_one() {
        let mut f = Forest::new();
        f.insert_edge(k(1), k(2)).unwrap();
        assert_eq!(f.s_c(k(1)).unwrap(), 1);
        assert_eq!(f.s_d(k(1)).unwrap(), 1);
        // two centroids, the root one wins
        assert_eq!(f.centroid(k(1)).unwrap(), k(1));
    }

    #[test]
    fn metrics_require_a_root() {
        let e = |a, b| (k(a), k(b));
        let f = Forest::from_tree_edges(Policy::dtree(), &[e(1, 2)], &[]).unwrap();
        assert_eq!(f.s_d(k(2)), Err(DTreeError::NotARoot(k(2))));
        assert_eq!(f.s_c(k(2)), Err(DTreeError::NotARoot(k(2))));
        assert_eq!(f.centroid(k(2)), Err(DTreeError::NotARoot(k(2))));
        assert_eq!(f.depth_histogram(k(2)), Err(DTreeError::NotARoot(k(2))));
    }

    #[test]
    fn s_c_uses_the_smaller_side_off_centroid() {
        // path 1-2-3-4-5 rooted at 1: cuts give 1,2,2,1
        let edges: Vec<_> = (1..5).map(|i| (k(i), k(i + 1))).collect();
        let f = Forest::from_tree_edges(Policy::dtree(), &edges, &[]).unwrap();
        assert_eq!(f.s_c(k(1)).unwrap(), 6);
        assert_eq!(f.s_d(k(1)).unwrap(), 10);
        assert_eq!(f.centroid(k(1)).unwrap(), k(3));
    }
}
