use crate::bitmat::{BitMatrix, CountMatrix};
use crate::blobs::BlobPartition;
use crate::ranking::NeighborRanking;

use super::Neighborhood;

/// All matrices of one threshold `t`, computed as dense products.
///
/// * `indicator`: `I_t[x][y] = 1` iff `y` is among the `t` nearest neighbors of `x`
/// * `common`: `N_t = I_t I_tᵀ`
/// * `graph`: `F_t[x][y] = 1` iff `N_t[x][y] >= t - f_margin`
/// * `graph_common`: `NS_t = F_t F_tᵀ`
/// * `graph_within`: `FC_t[x][y] = F_t[x][y]` when `x`, `y` share a blob, else 0
/// * `median_stat`: `S_t = F_t FC_tᵀ + FC_t F_tᵀ`
#[derive(Clone, Debug)]
pub struct ThresholdState {
    pub t: usize,
    pub indicator: BitMatrix,
    pub common: CountMatrix,
    pub graph: BitMatrix,
    pub graph_common: CountMatrix,
    pub graph_within: BitMatrix,
    pub median_stat: CountMatrix,
}

/// `I_t` under the given self-membership convention.
pub fn neighbor_indicator(rank: &NeighborRanking, t: usize, hood: Neighborhood) -> BitMatrix {
    let n = rank.len();
    let skip = hood.offset();
    let mut ind = BitMatrix::zeros(n, n);
    for x in 0..n {
        let order = rank.order(x);
        let end = (skip + t).min(n);
        for &y in &order[skip.min(end)..end] {
            ind.set(x, y as usize, true);
        }
    }
    ind
}

/// Point graph from a common-neighbor count matrix.
pub(crate) fn graph_from_common(common: &CountMatrix, t: usize, f_margin: usize) -> BitMatrix {
    let n = common.rows();
    let mut g = BitMatrix::zeros(n, n);
    for x in 0..n {
        for (y, &c) in common.row(x).iter().enumerate() {
            if c as usize + f_margin >= t {
                g.set(x, y, true);
            }
        }
    }
    g
}

/// `F_t`: connect `x`, `y` when they share at least `t - f_margin` of their
/// `t` nearest neighbors (each point counting itself as a neighbor).
pub fn build_f(rank: &NeighborRanking, t: usize, f_margin: usize) -> BitMatrix {
    let ind = neighbor_indicator(rank, t, Neighborhood::IncludeSelf);
    graph_from_common(&ind.gram(), t, f_margin)
}

/// `FC_t`: the point graph restricted to pairs inside one blob.
pub(crate) fn within_blobs(graph: &BitMatrix, blobs: &BlobPartition) -> BitMatrix {
    let n = graph.rows();
    let mut fc = BitMatrix::zeros(n, n);
    for b in blobs.ids() {
        let members = blobs.members(b);
        for &x in members {
            for &y in members {
                if graph.get(x, y) {
                    fc.set(x, y, true);
                }
            }
        }
    }
    fc
}

impl ThresholdState {
    pub fn compute(
        rank: &NeighborRanking,
        t: usize,
        f_margin: usize,
        blobs: &BlobPartition,
        hood: Neighborhood,
    ) -> Self {
        let indicator = neighbor_indicator(rank, t, hood);
        let common = indicator.gram();
        let graph = graph_from_common(&common, t, f_margin);
        let graph_common = graph.gram();
        let graph_within = within_blobs(&graph, blobs);
        let median_stat = graph
            .mul_transpose(&graph_within)
            .add(&graph_within.mul_transpose(&graph));
        ThresholdState {
            t,
            indicator,
            common,
            graph,
            graph_common,
            graph_within,
            median_stat,
        }
    }

    /// Recomputes `FC_t` and `S_t` after the blobs changed; `F_t` stays.
    pub fn refresh_blobs(&mut self, blobs: &BlobPartition) {
        self.graph_within = within_blobs(&self.graph, blobs);
        self.median_stat = self
            .graph
            .mul_transpose(&self.graph_within)
            .add(&self.graph_within.mul_transpose(&self.graph));
    }
}
