//! Classical agglomerative linkage: single, average, complete and Ward.

use std::fmt;
use std::str::FromStr;

use crate::dendrogram::{Dendrogram, Level, Merge};
use crate::error::Error;
use crate::labeling::Labeling;
use crate::similarity::{DissimilarityMatrix, SimilarityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Linkage {
    Single,
    Average,
    Complete,
    /// Minimum variance increase. Expects squared Euclidean dissimilarities.
    Ward,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [Linkage::Single, Linkage::Average, Linkage::Complete, Linkage::Ward];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Ward => "ward",
        }
    }

    /// Lance–Williams update: dissimilarity from `k` to the union of `i` and `j`.
    fn update(self, d_ki: f64, d_kj: f64, d_ij: f64, n_i: f64, n_j: f64, n_k: f64) -> f64 {
        match self {
            Linkage::Single => d_ki.min(d_kj),
            Linkage::Complete => d_ki.max(d_kj),
            Linkage::Average => (n_i * d_ki + n_j * d_kj) / (n_i + n_j),
            Linkage::Ward => {
                ((n_i + n_k) * d_ki + (n_j + n_k) * d_kj - n_k * d_ij) / (n_i + n_j + n_k)
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Linkage::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown linkage method `{s}`")))
    }
}

/// Builds a binary tree by repeatedly merging the closest pair of clusters.
///
/// Ties go to the pair with the smallest minimum member on the left, then on
/// the right. Heights are the Lance–Williams dissimilarities at merge time.
pub fn linkage_cluster(d: &DissimilarityMatrix, method: Linkage) -> Dendrogram {
    let n = d.len();
    let mut dist = d.as_slice().to_vec();
    // Clusters live in the slot of their smallest member, so scanning slots
    // in order visits pairs in tie-break order.
    let mut active: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let (mut bi, mut bj) = (active[0], active[1]);
        let mut best = dist[bi * n + bj];
        for (ai, &i) in active.iter().enumerate() {
            let row = &dist[i * n..(i + 1) * n];
            for &j in &active[ai + 1..] {
                if row[j] < best {
                    best = row[j];
                    bi = i;
                    bj = j;
                }
            }
        }
        let (ni, nj) = (size[bi] as f64, size[bj] as f64);
        for &k in &active {
            if k == bi || k == bj {
                continue;
            }
            let v = method.update(dist[k * n + bi], dist[k * n + bj], best, ni, nj, size[k] as f64);
            dist[k * n + bi] = v;
            dist[bi * n + k] = v;
        }
        merges.push(Merge {
            children: vec![node[bi], node[bj]],
            level: Level::Height(best),
        });
        node[bi] = n + merges.len() - 1;
        size[bi] += size[bj];
        active.retain(|&s| s != bj);
    }
    Dendrogram::new(n, merges).expect("linkage emits a complete binary tree")
}

/// Linkage on `1 - sim`. For average and Ward the result depends on this
/// particular conversion, not only on the similarity ordering.
pub fn linkage_from_similarity(sim: &SimilarityMatrix, method: Linkage) -> Dendrogram {
    linkage_cluster(&sim.to_dissimilarity(), method)
}

/// Whether the first `n/2` merges of `tree` each join two leaves from
/// different target clusters, together pairing up every point.
///
/// This is how the classical linkages fail on instances where every point
/// has one perfect partner in another cluster.
pub fn matched_pairs_failure_check(tree: &Dendrogram, target: &Labeling) -> bool {
    let n = tree.n_leaves();
    if n < 2 || !n.is_multiple_of(2) || tree.merges().len() < n / 2 {
        return false;
    }
    let mut seen = vec![false; n];
    tree.merges()[..n / 2].iter().all(|m| match m.children.as_slice() {
        &[a, b] if a < n && b < n => {
            let fresh = !seen[a] && !seen[b];
            seen[a] = true;
            seen[b] = true;
            fresh && target.label(a) != target.label(b)
        }
        _ => false,
    })
}
