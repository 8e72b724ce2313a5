use crate::similarity::SimilarityMatrix;
use std::cmp::Ordering;

/// Per-point total order of all points by decreasing similarity.
///
/// A point is always its own nearest neighbor (rank 0). Equal similarities
/// are ordered by ascending point index, so the ranking is a pure function
/// of the matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborRanking {
    n: usize,
    order: Vec<u32>,
    position: Vec<u32>,
}

/// Comparator for "more similar first, then lower index".
#[inline]
pub(crate) fn by_similarity(row: &[f64], a: usize, b: usize) -> Ordering {
    row[b].total_cmp(&row[a]).then(a.cmp(&b))
}

/// Indices `0..row.len()` ordered by decreasing `row` value, ties by index,
/// with `anchor` forced to the front when given.
pub(crate) fn rank_row(row: &[f64], anchor: Option<usize>) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..row.len() as u32).collect();
    idx.sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        match anchor {
            Some(p) if a == p => Ordering::Less,
            Some(p) if b == p => Ordering::Greater,
            _ => by_similarity(row, a, b),
        }
    });
    idx
}

impl NeighborRanking {
    pub fn new(sim: &SimilarityMatrix) -> Self {
        let n = sim.len();
        let mut order = Vec::with_capacity(n * n);
        let mut position = vec![0u32; n * n];
        for p in 0..n {
            let row = rank_row(sim.row(p), Some(p));
            for (r, &q) in row.iter().enumerate() {
                position[p * n + q as usize] = r as u32;
            }
            order.extend_from_slice(&row);
        }
        NeighborRanking { n, order, position }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The full ranking for `p`; `order(p)[0] == p`.
    pub fn order(&self, p: usize) -> &[u32] {
        &self.order[p * self.n..(p + 1) * self.n]
    }

    /// Rank of `q` in `p`'s ordering.
    #[inline]
    pub fn rank_of(&self, p: usize, q: usize) -> usize {
        self.position[p * self.n + q] as usize
    }

    /// The `t` nearest neighbors of `p`, `p` itself included.
    pub fn nearest(&self, p: usize, t: usize) -> &[u32] {
        &self.order(p)[..t.min(self.n)]
    }
}

/// `t` nearest neighbors of `p` among `pool` (a subset of points), using the
/// same tie-break as [`NeighborRanking`]. `p` itself comes first when it is
/// in the pool.
pub fn nearest_within(sim: &SimilarityMatrix, p: usize, pool: &[usize], t: usize) -> Vec<usize> {
    let row = sim.row(p);
    let mut cand: Vec<usize> = pool.to_vec();
    let cmp = |&a: &usize, &b: &usize| {
        if a == p {
            Ordering::Less
        } else if b == p {
            Ordering::Greater
        } else {
            by_similarity(row, a, b)
        }
    };
    let t = t.min(cand.len());
    if t < cand.len() && t > 0 {
        cand.select_nth_unstable_by(t - 1, cmp);
        cand.truncate(t);
    }
    cand.sort_unstable_by(cmp);
    cand.truncate(t);
    cand
}
