//! Clustering a uniform sample and extending the hierarchy to every point.
//!
//! The sample is clustered with doubled noise parameters. Any other point
//! is placed by walking down from the root, each time moving into the child
//! that holds most of its nearest sampled neighbors.

use rand::Rng;

use crate::dendrogram::{Dendrogram, NodeId};
use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::params::{ceil_count, NoiseParams};
use crate::ranking::by_similarity;
use crate::rmnl::{Rmnl, RmnlConfig};
use crate::similarity::SimilarityMatrix;

/// Pairwise similarities over the full point set, evaluated on demand.
pub trait SimilarityOracle: Sync {
    fn len(&self) -> usize;

    fn similarity(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SimilarityOracle for SimilarityMatrix {
    fn len(&self) -> usize {
        SimilarityMatrix::len(self)
    }

    fn similarity(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Default constant in the sample size bound.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 12.0;

/// `ceil(c / eta * ln(1 / (delta * eta)))` with `eta = min(alpha, nu)`,
/// at least 1.
pub fn required_sample_size(alpha: f64, nu: f64, delta: f64, c: f64) -> Result<usize> {
    for (name, v) in [("alpha", alpha), ("nu", nu), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::BadFraction { name, value: v });
        }
    }
    let eta = alpha.min(nu);
    let n = c / eta * (1.0 / (delta * eta)).ln();
    Ok((n.ceil() as usize).max(1))
}

/// Which parameters size the neighbor set used for insertion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InsertionScale {
    /// `6(alpha + nu) n` with the caller's parameters.
    #[default]
    Original,
    /// `6(2 alpha + 2 nu) n`, matching the parameters the tree was built with.
    Doubled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InductiveConfig {
    pub rmnl: RmnlConfig,
    pub insertion: InsertionScale,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InductiveModel {
    /// Sampled point ids, ascending; leaf `i` of the tree is `sample_ids[i]`.
    pub sample_ids: Vec<usize>,
    pub tree: Dendrogram,
    pub params: NoiseParams,
    /// Size of the nearest-neighbor set used to place a point.
    pub insertion_k: usize,
    /// Draws requested before deduplication.
    pub draws: usize,
}

/// Draws `n` ids uniformly with replacement and keeps the distinct ones.
/// When `n` equals `total` every point is taken.
fn sample_ids(total: usize, n: usize, seed: u64) -> Vec<usize> {
    if n >= total {
        return (0..total).collect();
    }
    let mut rng = crate::synth::rng(seed);
    let mut taken = vec![false; total];
    for _ in 0..n {
        taken[rng.gen_range(0..total)] = true;
    }
    (0..total).filter(|&i| taken[i]).collect()
}

/// Samples `n` of the `oracle`'s points and clusters them with `(2 alpha, 2 nu)`.
pub fn fit_inductive(
    oracle: &dyn SimilarityOracle,
    n: usize,
    params: NoiseParams,
    seed: u64,
    config: InductiveConfig,
) -> Result<InductiveModel> {
    let total = oracle.len();
    if n == 0 || n > total {
        return Err(Error::InvalidSpec(format!(
            "sample size {n} must lie in 1..={total}"
        )));
    }
    let doubled = NoiseParams::new(2.0 * params.alpha, 2.0 * params.nu)?;
    let ids = sample_ids(total, n, seed);
    let m = ids.len();
    let sim = SimilarityMatrix::from_fn(m, |a, b| {
        if a == b {
            1.0
        } else {
            oracle.similarity(ids[a], ids[b])
        }
    });
    let tree = Rmnl::new(doubled).with_config(config.rmnl).cluster(&sim)?;
    let scale = match config.insertion {
        InsertionScale::Original => params.total(),
        InsertionScale::Doubled => doubled.total(),
    };
    let insertion_k = ceil_count(6.0 * scale * m as f64).clamp(1, m);
    Ok(InductiveModel {
        sample_ids: ids,
        tree,
        params,
        insertion_k,
        draws: n,
    })
}

impl InductiveModel {
    pub fn sample_len(&self) -> usize {
        self.sample_ids.len()
    }

    /// Position of a point id in the sample, if sampled.
    pub fn sample_index(&self, id: usize) -> Option<usize> {
        self.sample_ids.binary_search(&id).ok()
    }

    /// Leaf indices of the `insertion_k` sampled points most similar to a
    /// point, given its similarities to the sample.
    pub fn nearest_sampled(&self, sims_to_sample: &[f64]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..sims_to_sample.len()).collect();
        idx.sort_unstable_by(|&a, &b| by_similarity(sims_to_sample, a, b));
        idx.truncate(self.insertion_k);
        idx
    }

    /// Descends from the root, each time into the child holding the most of
    /// the point's nearest sampled neighbors (ties: smallest member). Returns
    /// the visited nodes, root first.
    pub fn insert_point(&self, sims_to_sample: &[f64]) -> Result<Vec<NodeId>> {
        if sims_to_sample.len() != self.sample_len() {
            return Err(Error::Length {
                what: "similarity vector",
                expected: self.sample_len(),
                got: sims_to_sample.len(),
            });
        }
        Ok(self.descend(&self.nearest_sampled(sims_to_sample)))
    }

    fn descend(&self, neighbors: &[usize]) -> Vec<NodeId> {
        let tree = &self.tree;
        // Leaf positions in DFS order make "how many neighbors are under
        // this node" a range count.
        let mut pos: Vec<usize> = vec![0; tree.n_leaves()];
        for (i, &leaf) in tree.leaf_order().iter().enumerate() {
            pos[leaf] = i;
        }
        let mut marks: Vec<usize> = neighbors.iter().map(|&l| pos[l]).collect();
        marks.sort_unstable();
        let count = |node: NodeId| {
            let (a, b) = tree.span(node);
            marks.partition_point(|&p| p < b) - marks.partition_point(|&p| p < a)
        };
        let mut path = vec![tree.root()];
        let mut u = tree.root();
        while !tree.is_leaf(u) {
            u = *tree
                .children(u)
                .iter()
                .max_by(|&&a, &&b| count(a).cmp(&count(b)).then(tree.min_point(b).cmp(&tree.min_point(a))))
                .expect("internal nodes have children");
            path.push(u);
        }
        path
    }

    /// Labels every point of the oracle by the pruning node its descent
    /// passes through. Sampled points keep their own leaf's position.
    pub fn extend_labeling(&self, oracle: &dyn SimilarityOracle, pruning: &[NodeId]) -> Result<Labeling> {
        let groups = self.tree.pruning_points(pruning)?;
        let mut leaf_label = vec![0usize; self.sample_len()];
        for (g, pts) in groups.iter().enumerate() {
            for &p in pts {
                leaf_label[p] = g + 1;
            }
        }
        let mut node_label = vec![0usize; self.tree.n_nodes()];
        for (g, &v) in pruning.iter().enumerate() {
            node_label[v] = g + 1;
        }
        let labels = (0..oracle.len())
            .map(|x| {
                if let Some(i) = self.sample_index(x) {
                    return leaf_label[i];
                }
                let sims: Vec<f64> = self.sample_ids.iter().map(|&s| oracle.similarity(x, s)).collect();
                let path = self.descend(&self.nearest_sampled(&sims));
                path.iter()
                    .map(|&v| node_label[v])
                    .find(|&l| l > 0)
                    .expect("a pruning cuts every root-to-leaf path")
            })
            .collect();
        Labeling::new(labels, pruning.len().max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_formula() {
        let n = required_sample_size(0.1, 0.1, 0.1, 12.0).unwrap();
        assert_eq!(n, (120.0 * 100f64.ln()).ceil() as usize);
        assert_eq!(n, 553);
    }

    #[test]
    fn sample_size_monotone() {
        let a = required_sample_size(0.1, 0.2, 0.1, 12.0).unwrap();
        let b = required_sample_size(0.1, 0.2, 0.5, 12.0).unwrap();
        let c = required_sample_size(0.05, 0.2, 0.1, 12.0).unwrap();
        assert!(b <= a);
        assert!(c > 2 * a);
    }

    #[test]
    fn full_sample_is_identity() {
        assert_eq!(sample_ids(5, 5, 3), vec![0, 1, 2, 3, 4]);
        let s = sample_ids(100, 50, 3);
        assert!(s.len() <= 50 && s.windows(2).all(|w| w[0] < w[1]));
    }
}
