//! The per-threshold steps, stated directly on the dense [`ThresholdState`].
//!
//! These functions recompute whole matrices after every merge and serve as
//! the reference route; the production engine reaches the same decisions
//! incrementally.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::blobs::{BlobId, BlobPartition, MergeEvent, UnionFind};
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

use super::state::ThresholdState;

/// Lower median: the `ceil(m/2)`-th smallest value.
pub fn lower_median<T: Copy + PartialOrd>(values: &mut [T]) -> T {
    assert!(!values.is_empty(), "median of nothing");
    let mid = (values.len() - 1) / 2;
    values
        .select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .1
        .to_owned()
}

/// The median test: `median > (|C_u| + |C_v|) / 4`.
#[inline]
pub fn passes_median(median: u32, size_sum: usize) -> bool {
    4 * median as usize > size_sum
}

/// An edge of the blob graph `H_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlobEdge {
    pub a: BlobId,
    pub b: BlobId,
    /// Smallest member of `a` (always below that of `b`).
    pub min_a: usize,
    pub min_b: usize,
    pub size_sum: usize,
    /// Median of `S_t` over the pairs; `None` for singleton pairs, which are
    /// connected through their common-neighbor count instead.
    pub median: Option<u32>,
}

impl BlobEdge {
    pub fn both_singletons(&self) -> bool {
        self.median.is_none()
    }

    /// Ordering used to pick the next merge: larger `median / size_sum`,
    /// then smaller combined size, then smaller member indices.
    pub fn merge_priority(&self, other: &BlobEdge) -> Ordering {
        let (ma, mb) = (self.median.unwrap_or(0) as u64, other.median.unwrap_or(0) as u64);
        (ma * other.size_sum as u64)
            .cmp(&(mb * self.size_sum as u64))
            .then(other.size_sum.cmp(&self.size_sum))
            .then((other.min_a, other.min_b).cmp(&(self.min_a, self.min_b)))
    }
}

/// Picks the best merge candidate: an edge not joining two singletons whose
/// combined size exceeds `min_size`.
pub(crate) fn best_candidate<'a>(
    edges: impl Iterator<Item = &'a BlobEdge>,
    min_size: usize,
) -> Option<BlobEdge> {
    edges
        .filter(|e| !e.both_singletons() && e.size_sum > min_size)
        .copied()
        .max_by(|x, y| x.merge_priority(y))
}

/// The blob graph `H_t`, edges keyed by the smallest members of their ends.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlobGraph {
    pub edges: BTreeMap<(usize, usize), BlobEdge>,
}

impl BlobGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn connected(&self, blobs: &BlobPartition, a: BlobId, b: BlobId) -> bool {
        let (x, y) = (blobs.min_member(a), blobs.min_member(b));
        self.edges.contains_key(&(x.min(y), x.max(y)))
    }
}

/// Connected components of the blob graph, each a list of blobs ordered by
/// smallest member; components ordered the same way.
pub(crate) fn components<'a>(
    blobs: &BlobPartition,
    edges: impl Iterator<Item = &'a BlobEdge>,
) -> Vec<Vec<BlobId>> {
    let mut uf = UnionFind::new(blobs.n_points());
    for e in edges {
        uf.union(e.a, e.b);
    }
    let mut groups: BTreeMap<usize, Vec<BlobId>> = BTreeMap::new();
    for b in blobs.ids() {
        groups.entry(uf.find_mut(b)).or_default().push(b);
    }
    let mut out: Vec<Vec<BlobId>> = groups.into_values().collect();
    out.sort_unstable_by_key(|g| blobs.min_member(g[0]));
    out
}

pub(crate) fn component_size(blobs: &BlobPartition, comp: &[BlobId]) -> usize {
    comp.iter().map(|&b| blobs.size(b)).sum()
}

pub(crate) fn edge(blobs: &BlobPartition, a: BlobId, b: BlobId, median: Option<u32>) -> BlobEdge {
    let (a, b) = if blobs.min_member(a) < blobs.min_member(b) { (a, b) } else { (b, a) };
    BlobEdge {
        a,
        b,
        min_a: blobs.min_member(a),
        min_b: blobs.min_member(b),
        size_sum: blobs.size(a) + blobs.size(b),
        median,
    }
}

/// Builds `H_t`: singleton pairs connect when `NS_t[x][y] > h_margin`; any
/// other pair connects when the median of `S_t` over `C_u x C_v` exceeds
/// `(|C_u| + |C_v|) / 4`.
pub fn build_h(state: &ThresholdState, blobs: &BlobPartition, h_margin: usize) -> BlobGraph {
    let ids = blobs.ids();
    let mut graph = BlobGraph::default();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            if let Some(e) = test_pair(state, blobs, a, b, h_margin) {
                graph.edges.insert((e.min_a, e.min_b), e);
            }
        }
    }
    graph
}

fn test_pair(
    state: &ThresholdState,
    blobs: &BlobPartition,
    a: BlobId,
    b: BlobId,
    h_margin: usize,
) -> Option<BlobEdge> {
    if blobs.is_singleton(a) && blobs.is_singleton(b) {
        let (x, y) = (blobs.min_member(a), blobs.min_member(b));
        return (state.graph_common.get(x, y) as usize > h_margin).then(|| edge(blobs, a, b, None));
    }
    let mut stats: Vec<u32> = Vec::with_capacity(blobs.size(a) * blobs.size(b));
    for &x in blobs.members(a) {
        for &y in blobs.members(b) {
            stats.push(state.median_stat.get(x, y));
        }
    }
    let median = lower_median(&mut stats);
    passes_median(median, blobs.size(a) + blobs.size(b)).then(|| edge(blobs, a, b, Some(median)))
}

/// Step 4 and step 5 of one threshold, in best-first order.
///
/// Repeatedly merges the connected pair (not both singletons, combined size
/// above `min_size`) with the largest normalized median, recomputing
/// `FC_t`, `S_t` and `H_t` after each merge. Then merges any component of
/// `H_t` holding at least `min_size` points, again one at a time.
pub fn merge_step(
    blobs: &mut BlobPartition,
    state: &mut ThresholdState,
    h_margin: usize,
    min_size: usize,
) -> Vec<MergeEvent> {
    let mut events = Vec::new();
    loop {
        let graph = build_h(state, blobs, h_margin);
        let Some(best) = best_candidate(graph.edges.values(), min_size) else { break };
        events.push(blobs.merge(&[best.a, best.b]));
        state.refresh_blobs(blobs);
    }
    loop {
        let graph = build_h(state, blobs, h_margin);
        let comp = components(blobs, graph.edges.values())
            .into_iter()
            .find(|c| c.len() >= 2 && component_size(blobs, c) >= min_size);
        let Some(comp) = comp else { break };
        events.push(blobs.merge(&comp));
        state.refresh_blobs(blobs);
    }
    events
}

/// Component merging with no intermediate recomputation: every component of
/// `H_t` with at least `min_size` points becomes one blob.
pub fn merge_components(
    blobs: &mut BlobPartition,
    state: &ThresholdState,
    h_margin: usize,
    min_size: usize,
) -> Vec<MergeEvent> {
    let graph = build_h(state, blobs, h_margin);
    let comps: Vec<Vec<BlobId>> = components(blobs, graph.edges.values())
        .into_iter()
        .filter(|c| c.len() >= 2 && component_size(blobs, c) >= min_size)
        .collect();
    comps.iter().map(|c| blobs.merge(c)).collect()
}

/// Attaches leftover singletons once few of them remain.
///
/// Triggered when the number of singletons is positive and below
/// `max(min_size, t/2)`. Each singleton goes to the non-singleton blob with
/// the highest median similarity to it (ties: smallest member index); all
/// singletons picking the same blob join it in one merge.
pub fn singleton_speedup(
    blobs: &mut BlobPartition,
    sim: &SimilarityMatrix,
    t: usize,
    min_size: usize,
) -> Result<Vec<MergeEvent>> {
    let ids = blobs.ids();
    let singles: Vec<BlobId> = ids.iter().copied().filter(|&b| blobs.is_singleton(b)).collect();
    let s = singles.len();
    if s == 0 || !(s < min_size || 2 * s < t) {
        return Ok(Vec::new());
    }
    let targets: Vec<BlobId> = ids.iter().copied().filter(|&b| !blobs.is_singleton(b)).collect();
    if targets.is_empty() {
        return Err(Error::NoNonSingletonBlob);
    }

    let mut joins: BTreeMap<usize, (BlobId, Vec<BlobId>)> = BTreeMap::new();
    let mut buf = Vec::new();
    for &z in &singles {
        let p = blobs.min_member(z);
        let mut best: Option<(f64, BlobId)> = None;
        for &b in &targets {
            buf.clear();
            buf.extend(blobs.members(b).iter().map(|&q| sim.get(p, q)));
            let med = lower_median(&mut buf);
            // targets are in member order, so a strict improvement keeps the
            // smallest index on ties
            if best.is_none_or(|(m, _)| med > m) {
                best = Some((med, b));
            }
        }
        let target = best.unwrap().1;
        joins
            .entry(blobs.min_member(target))
            .or_insert_with(|| (target, Vec::new()))
            .1
            .push(z);
    }

    let mut events = Vec::new();
    for (_, (target, mut members)) in joins {
        members.push(target);
        events.push(blobs.merge(&members));
    }
    Ok(events)
}

/// Last-resort merge when the thresholds run out: the pair of blobs with
/// the largest median raw similarity (ties: smaller combined size, then
/// smaller member indices).
pub(crate) fn fallback_merge(blobs: &mut BlobPartition, sim: &SimilarityMatrix) -> MergeEvent {
    let ids = blobs.ids();
    let mut best: Option<(f64, usize, (usize, usize), BlobId, BlobId)> = None;
    let mut buf = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            buf.clear();
            for &x in blobs.members(a) {
                buf.extend(blobs.members(b).iter().map(|&y| sim.get(x, y)));
            }
            let med = lower_median(&mut buf);
            let size = blobs.size(a) + blobs.size(b);
            let key = (blobs.min_member(a), blobs.min_member(b));
            let better = match best {
                None => true,
                Some((m, s, k, _, _)) => med > m || (med == m && (size < s || (size == s && key < k))),
            };
            if better {
                best = Some((med, size, key, a, b));
            }
        }
    }
    let (_, _, _, a, b) = best.expect("fallback needs two blobs");
    blobs.merge(&[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_median_picks_ceil_half() {
        assert_eq!(lower_median(&mut [5, 1, 4, 2, 3, 6]), 3);
        assert_eq!(lower_median(&mut [5, 1, 4, 2, 3]), 3);
        assert_eq!(lower_median(&mut [7]), 7);
        assert_eq!(lower_median(&mut [0.9, 0.1]), 0.1);
    }

    #[test]
    fn median_test_is_strict() {
        assert!(!passes_median(1, 4));
        assert!(passes_median(2, 7));
        assert!(!passes_median(2, 8));
    }
}
