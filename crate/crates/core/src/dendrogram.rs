use crate::error::{Error, Result};

/// Node identifier: `0..n` are the leaves (points), `n + i` is the node
/// created by the `i`-th merge.
pub type NodeId = usize;

/// The level at which a merge happened.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Level {
    /// Integer neighborhood threshold `t` (median neighborhood linkage).
    Threshold(usize),
    /// Dissimilarity between the merged clusters (classical linkage).
    Height(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Merge {
    pub children: Vec<NodeId>,
    pub level: Level,
}

/// A merge tree over `n` points. Internal nodes may have more than two
/// children, since a whole component of blobs can merge at once.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    parent: Vec<Option<NodeId>>,
    leaf_order: Vec<usize>,
    span: Vec<(usize, usize)>,
}

impl PartialEq for Dendrogram {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.merges == other.merges
    }
}

impl Dendrogram {
    /// Validates the merge list and builds the derived indices.
    ///
    /// Children must refer to existing nodes, every node may be merged at
    /// most once, and the merges must end in a single root.
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("a tree needs at least one leaf".into()));
        }
        let total = n + merges.len();
        let mut parent = vec![None; total];
        for (i, m) in merges.iter().enumerate() {
            let id = n + i;
            if m.children.len() < 2 {
                return Err(Error::InvalidSpec(format!("node {id} has fewer than two children")));
            }
            for &c in &m.children {
                if c >= id {
                    return Err(Error::UnknownNode(c));
                }
                if parent[c].is_some() {
                    return Err(Error::InvalidSpec(format!("node {c} merged twice")));
                }
                parent[c] = Some(id);
            }
        }
        let roots = parent.iter().filter(|p| p.is_none()).count();
        if roots != 1 {
            return Err(Error::InvalidSpec(format!("merges leave {roots} roots, expected 1")));
        }

        let mut tree = Dendrogram {
            n,
            merges,
            parent,
            leaf_order: Vec::with_capacity(n),
            span: vec![(0, 0); total],
        };
        tree.index();
        Ok(tree)
    }

    /// Depth-first leaf order; every node covers a contiguous span of it.
    fn index(&mut self) {
        let root = self.root();
        let mut stack = vec![(root, false)];
        while let Some((node, done)) = stack.pop() {
            if done {
                let children = self.children(node);
                let lo = self.span[children[0]].0;
                let hi = self.span[*children.last().unwrap()].1;
                self.span[node] = (lo, hi);
            } else if node < self.n {
                let pos = self.leaf_order.len();
                self.leaf_order.push(node);
                self.span[node] = (pos, pos + 1);
            } else {
                stack.push((node, true));
                for &c in self.merges[node - self.n].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.n
    }

    pub fn n_nodes(&self) -> usize {
        self.n + self.merges.len()
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root(&self) -> NodeId {
        self.n + self.merges.len() - usize::from(!self.merges.is_empty())
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        node < self.n
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        if node < self.n {
            &[]
        } else {
            &self.merges[node - self.n].children
        }
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node]
    }

    pub fn level(&self, node: NodeId) -> Option<Level> {
        node.checked_sub(self.n).map(|i| self.merges[i].level)
    }

    pub fn size(&self, node: NodeId) -> usize {
        let (lo, hi) = self.span[node];
        hi - lo
    }

    /// Points under `node`, in depth-first order.
    pub fn points(&self, node: NodeId) -> &[usize] {
        let (lo, hi) = self.span[node];
        &self.leaf_order[lo..hi]
    }

    /// Depth-first leaf order and the half-open span each node covers in it.
    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    pub fn span(&self, node: NodeId) -> (usize, usize) {
        self.span[node]
    }

    /// Smallest point index under `node`.
    pub fn min_point(&self, node: NodeId) -> usize {
        self.points(node).iter().copied().min().unwrap()
    }

    /// Checks that `nodes` is a pruning (an antichain whose point sets
    /// partition all points) and returns the point sets.
    pub fn pruning_points(&self, nodes: &[NodeId]) -> Result<Vec<Vec<usize>>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::with_capacity(nodes.len());
        for &node in nodes {
            if node >= self.n_nodes() {
                return Err(Error::UnknownNode(node));
            }
            let pts = self.points(node);
            for &p in pts {
                if seen[p] {
                    return Err(Error::Overlap(p));
                }
                seen[p] = true;
            }
            out.push(pts.to_vec());
        }
        if let Some(p) = seen.iter().position(|&s| !s) {
            return Err(Error::Coverage(p));
        }
        Ok(out)
    }

    /// Flat labeling induced by a pruning: node `i` of `nodes` gets label `i + 1`.
    pub fn pruning_labels(&self, nodes: &[NodeId]) -> Result<crate::Labeling> {
        let sets = self.pruning_points(nodes)?;
        crate::Labeling::from_groups(self.n, &sets)
    }

    /// Recursive structural audit: children partition their parent, the
    /// root covers every point, and each point is exactly one leaf.
    pub fn audit(&self) -> Result<()> {
        let mut count = vec![0usize; self.n];
        for &p in &self.leaf_order {
            count[p] += 1;
        }
        if let Some(p) = count.iter().position(|&c| c != 1) {
            return Err(Error::Coverage(p));
        }
        if self.size(self.root()) != self.n {
            return Err(Error::Coverage(0));
        }
        for node in self.n..self.n_nodes() {
            let mut mine: Vec<usize> = self.points(node).to_vec();
            let mut union: Vec<usize> = self
                .children(node)
                .iter()
                .flat_map(|&c| self.points(c).iter().copied())
                .collect();
            mine.sort_unstable();
            union.sort_unstable();
            if mine != union {
                return Err(Error::InvalidSpec(format!("children of {node} do not partition it")));
            }
            if union.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Overlap(union[0]));
            }
        }
        Ok(())
    }

    /// Greedy top-down pruning: keep splitting the largest splittable node
    /// until at least `k` nodes are present.
    pub fn split_largest(&self, k: usize) -> Vec<NodeId> {
        let mut cut = vec![self.root()];
        while cut.len() < k {
            let pick = cut
                .iter()
                .enumerate()
                .filter(|(_, &c)| !self.is_leaf(c))
                .max_by_key(|(_, &c)| (self.size(c), std::cmp::Reverse(c)))
                .map(|(i, _)| i);
            let Some(i) = pick else { break };
            let node = cut.swap_remove(i);
            cut.extend_from_slice(self.children(node));
        }
        cut.sort_unstable();
        cut
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_leaf_tree() -> Dendrogram {
        // ((0 1) 2) and (3 4), joined at the root
        Dendrogram::new(
            5,
            vec![
                Merge { children: vec![0, 1], level: Level::Threshold(1) },
                Merge { children: vec![5, 2], level: Level::Threshold(2) },
                Merge { children: vec![3, 4], level: Level::Threshold(2) },
                Merge { children: vec![6, 7], level: Level::Threshold(3) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn root_pruning_is_everything() {
        let t = five_leaf_tree();
        let sets = t.pruning_points(&[t.root()]).unwrap();
        assert_eq!(sets.len(), 1);
        let mut all = sets[0].clone();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn leaf_pruning_is_singletons() {
        let t = five_leaf_tree();
        let sets = t.pruning_points(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(sets, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn mixed_depth_pruning() {
        let t = five_leaf_tree();
        let sets = t.pruning_points(&[5, 2, 7]).unwrap();
        assert_eq!(sets, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn overlap_and_coverage_errors() {
        let t = five_leaf_tree();
        assert!(matches!(t.pruning_points(&[5, 0, 2, 7]), Err(Error::Overlap(0))));
        assert!(matches!(t.pruning_points(&[5, 7]), Err(Error::Coverage(2))));
        assert!(matches!(t.pruning_points(&[42]), Err(Error::UnknownNode(42))));
    }

    #[test]
    fn rejects_forests_and_reuse() {
        let forest = Dendrogram::new(3, vec![Merge { children: vec![0, 1], level: Level::Threshold(1) }]);
        assert!(forest.is_err());
        let reuse = Dendrogram::new(
            3,
            vec![
                Merge { children: vec![0, 1], level: Level::Threshold(1) },
                Merge { children: vec![0, 2], level: Level::Threshold(1) },
            ],
        );
        assert!(reuse.is_err());
    }

    #[test]
    fn wide_nodes_audit_clean() {
        let t = Dendrogram::new(
            4,
            vec![Merge { children: vec![2, 0, 3, 1], level: Level::Threshold(4) }],
        )
        .unwrap();
        t.audit().unwrap();
        assert_eq!(t.points(t.root()), &[2, 0, 3, 1]);
        assert_eq!(t.min_point(t.root()), 0);
    }

    #[test]
    fn split_largest_reaches_k() {
        let t = five_leaf_tree();
        assert_eq!(t.split_largest(1), vec![8]);
        assert_eq!(t.split_largest(2), vec![6, 7]);
        assert_eq!(t.split_largest(3).len(), 3);
    }
}
