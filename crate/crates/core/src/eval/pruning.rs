//! Best pruning of a given size, by dynamic programming over the tree.

use crate::dendrogram::{Dendrogram, NodeId};
use crate::error::{Error, Result};
use crate::labeling::Labeling;

use super::classification_error;

const NONE: i64 = i64::MIN / 4;

/// Outcome of a best-pruning search.
#[derive(Clone, Debug, PartialEq)]
pub struct PruningResult {
    pub error: f64,
    pub nodes: Vec<NodeId>,
    /// `false` when the tree has no pruning with exactly `k` nodes (possible
    /// when nodes have more than two children) and the best smaller pruning
    /// was used instead.
    pub exact_size: bool,
}

/// Per-node table of the most points that can be matched when the subtree
/// is cut into `c` pieces matched injectively onto the target labels `mask`.
#[derive(Clone)]
struct Table {
    k: usize,
    values: Vec<i64>,
}

impl Table {
    fn empty(labels: usize, k: usize) -> Self {
        Table {
            k,
            values: vec![NONE; (1 << labels) * (k + 1)],
        }
    }

    fn get(&self, mask: usize, c: usize) -> i64 {
        self.values[mask * (self.k + 1) + c]
    }

    fn set(&mut self, mask: usize, c: usize, v: i64) {
        self.values[mask * (self.k + 1) + c] = v;
    }

    fn combine(&self, other: &Table, labels: usize) -> Table {
        let k = self.k;
        let mut out = Table::empty(labels, k);
        for mask in 0..(1usize << labels) {
            let mut sub = mask;
            loop {
                let rest = mask ^ sub;
                for c1 in 1..k {
                    let a = self.get(sub, c1);
                    if a == NONE {
                        continue;
                    }
                    for c2 in 1..=(k - c1) {
                        let b = other.get(rest, c2);
                        if b != NONE && a + b > out.get(mask, c1 + c2) {
                            out.set(mask, c1 + c2, a + b);
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        out
    }
}

struct Solver<'a> {
    tree: &'a Dendrogram,
    labels: usize,
    k: usize,
    counts: Vec<Vec<i64>>,
    /// Tables for the node itself (cut here or below).
    tables: Vec<Table>,
    /// For internal nodes, tables over growing prefixes of the children.
    prefixes: Vec<Vec<Table>>,
}

impl<'a> Solver<'a> {
    fn new(tree: &'a Dendrogram, target: &Labeling, k: usize) -> Self {
        let labels = target.k();
        let nodes = tree.n_nodes();
        let mut counts = vec![vec![0i64; labels]; nodes];
        for p in 0..tree.n_leaves() {
            counts[p][target.label(p) - 1] += 1;
        }
        let mut solver = Solver {
            tree,
            labels,
            k,
            counts,
            tables: Vec::with_capacity(nodes),
            prefixes: (0..nodes).map(|_| Vec::new()).collect(),
        };
        // Node ids are topologically ordered: children before parents.
        for v in 0..nodes {
            if !tree.is_leaf(v) {
                let mut c = vec![0i64; labels];
                for &ch in tree.children(v) {
                    for (acc, x) in c.iter_mut().zip(&solver.counts[ch]) {
                        *acc += x;
                    }
                }
                solver.counts[v] = c;
            }
            let table = solver.solve(v);
            solver.tables.push(table);
        }
        solver
    }

    fn cut_here(&self, v: NodeId, mask: usize) -> Option<i64> {
        match mask.count_ones() {
            0 => Some(0),
            1 => Some(self.counts[v][mask.trailing_zeros() as usize]),
            _ => None,
        }
    }

    fn solve(&mut self, v: NodeId) -> Table {
        let mut table = if self.tree.is_leaf(v) {
            Table::empty(self.labels, self.k)
        } else {
            let children = self.tree.children(v);
            let mut prefix = vec![self.tables[children[0]].clone()];
            for &ch in &children[1..] {
                let next = prefix.last().unwrap().combine(&self.tables[ch], self.labels);
                prefix.push(next);
            }
            let combined = prefix.last().unwrap().clone();
            self.prefixes[v] = prefix;
            combined
        };
        for mask in 0..(1usize << self.labels) {
            if let Some(val) = self.cut_here(v, mask) {
                if val > table.get(mask, 1) {
                    table.set(mask, 1, val);
                }
            }
        }
        table
    }

    fn reconstruct(&self, v: NodeId, mask: usize, c: usize, out: &mut Vec<NodeId>) {
        let want = self.tables[v].get(mask, c);
        if c == 1 && self.cut_here(v, mask) == Some(want) {
            out.push(v);
            return;
        }
        let children = self.tree.children(v);
        let prefix = &self.prefixes[v];
        let (mut mask, mut c, mut want) = (mask, c, want);
        for i in (1..children.len()).rev() {
            let ch = children[i];
            let (sub, c1) = self
                .split(&prefix[i - 1], &self.tables[ch], mask, c, want)
                .expect("table value has a witness");
            let rest = mask ^ sub;
            self.reconstruct(ch, rest, c - c1, out);
            want = prefix[i - 1].get(sub, c1);
            mask = sub;
            c = c1;
        }
        debug_assert_eq!(self.tables[children[0]].get(mask, c), want);
        self.reconstruct(children[0], mask, c, out);
    }

    fn split(&self, left: &Table, right: &Table, mask: usize, c: usize, want: i64) -> Option<(usize, usize)> {
        let mut sub = mask;
        loop {
            for c1 in 1..c {
                let (a, b) = (left.get(sub, c1), right.get(mask ^ sub, c - c1));
                if a != NONE && b != NONE && a + b == want {
                    return Some((sub, c1));
                }
            }
            if sub == 0 {
                return None;
            }
            sub = (sub - 1) & mask;
        }
    }
}

/// Lowest classification error over prunings of `tree` with `k` nodes.
///
/// Pruning nodes are matched injectively onto target clusters; unmatched
/// nodes count as errors. When no pruning has exactly `k` nodes, the best
/// pruning among the smaller sizes is returned with `exact_size = false`.
pub fn best_pruning_error(tree: &Dendrogram, target: &Labeling, k: usize) -> Result<PruningResult> {
    let n = tree.n_leaves();
    if target.len() != n {
        return Err(Error::Length {
            what: "target labeling",
            expected: n,
            got: target.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, leaves: n });
    }
    if target.k() > 16 {
        return Err(Error::InvalidSpec(format!(
            "pruning search supports at most 16 target clusters, got {}",
            target.k()
        )));
    }
    let solver = Solver::new(tree, target, k);
    let root = tree.root();
    let best_at = |c: usize| {
        (0..(1usize << solver.labels))
            .map(|m| (solver.tables[root].get(m, c), m))
            .filter(|&(v, _)| v != NONE)
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
    };
    let (size, (value, mask)) = match best_at(k) {
        Some(found) => (k, found),
        None => (1..k)
            .filter_map(|c| best_at(c).map(|f| (c, f)))
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.0.cmp(&a.0)))
            .expect("the root alone is a pruning"),
    };
    let mut nodes = Vec::with_capacity(size);
    solver.reconstruct(root, mask, size, &mut nodes);
    nodes.sort_by_key(|&v| tree.min_point(v));
    Ok(PruningResult {
        error: 1.0 - value as f64 / n as f64,
        nodes,
        exact_size: size == k,
    })
}

/// Every pruning of `tree` with at most `max_size` nodes. Exponential; for
/// small trees only.
pub fn enumerate_prunings(tree: &Dendrogram, max_size: usize) -> Vec<Vec<NodeId>> {
    fn go(tree: &Dendrogram, v: NodeId, max_size: usize) -> Vec<Vec<NodeId>> {
        let mut out = vec![vec![v]];
        if tree.is_leaf(v) {
            return out;
        }
        let mut acc: Vec<Vec<NodeId>> = vec![Vec::new()];
        for &ch in tree.children(v) {
            let options = go(tree, ch, max_size);
            let mut next = Vec::new();
            for a in &acc {
                for o in &options {
                    if a.len() + o.len() <= max_size {
                        next.push(a.iter().chain(o).copied().collect());
                    }
                }
            }
            acc = next;
        }
        out.extend(acc);
        out
    }
    go(tree, tree.root(), max_size)
}

/// The literal protocol: try every pruning of size `k` and keep the best
/// error. Returns `None` when no pruning of that size exists.
pub fn brute_force_pruning_error(tree: &Dendrogram, target: &Labeling, k: usize) -> Option<f64> {
    enumerate_prunings(tree, k)
        .into_iter()
        .filter(|p| p.len() == k)
        .map(|p| {
            let pred = tree.pruning_labels(&p).expect("enumerated prunings are valid");
            classification_error(&pred, target).expect("same length")
        })
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrogram::{Level, Merge};

    fn merge(children: &[usize]) -> Merge {
        Merge {
            children: children.to_vec(),
            level: Level::Threshold(1),
        }
    }

    #[test]
    fn k_one_is_majority() {
        let tree = Dendrogram::new(4, vec![merge(&[0, 1]), merge(&[2, 3]), merge(&[4, 5])]).unwrap();
        let target = Labeling::new(vec![1, 1, 1, 2], 2).unwrap();
        let r = best_pruning_error(&tree, &target, 1).unwrap();
        assert_eq!(r.error, 0.25);
        assert_eq!(r.nodes, vec![6]);
    }

    #[test]
    fn exact_split_found() {
        let tree = Dendrogram::new(4, vec![merge(&[0, 1]), merge(&[2, 3]), merge(&[4, 5])]).unwrap();
        let target = Labeling::new(vec![1, 1, 2, 2], 2).unwrap();
        let r = best_pruning_error(&tree, &target, 2).unwrap();
        assert_eq!(r.error, 0.0);
        assert_eq!(r.nodes, vec![4, 5]);
    }

    #[test]
    fn wide_root_has_no_size_two() {
        let tree = Dendrogram::new(3, vec![merge(&[0, 1, 2])]).unwrap();
        let target = Labeling::new(vec![1, 2, 2], 2).unwrap();
        let r = best_pruning_error(&tree, &target, 2).unwrap();
        assert!(!r.exact_size);
        assert_eq!(r.nodes, vec![3]);
        assert!(brute_force_pruning_error(&tree, &target, 2).is_none());
    }

    #[test]
    fn k_too_large() {
        let tree = Dendrogram::new(2, vec![merge(&[0, 1])]).unwrap();
        let target = Labeling::new(vec![1, 1], 1).unwrap();
        assert!(matches!(best_pruning_error(&tree, &target, 3), Err(Error::KTooLarge { .. })));
    }
}
