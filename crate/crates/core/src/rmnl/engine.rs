use std::collections::HashMap;

use rayon::prelude::*;

use crate::bitmat::{and3_count, and_count, BitMatrix, CountMatrix};
use crate::blobs::{BlobId, BlobPartition, MergeEvent};
use crate::dendrogram::{Dendrogram, Level, Merge};
use crate::error::{Error, Result};
use crate::params::{Margins, NoiseParams};
use crate::ranking::NeighborRanking;
use crate::similarity::SimilarityMatrix;

use super::state::neighbor_indicator;
use super::steps::{
    best_candidate, component_size, components, edge, fallback_merge, lower_median,
    passes_median, singleton_speedup, BlobEdge,
};
use super::{MergeOrder, RmnlConfig};

/// Per non-singleton blob: its membership mask and, for every point, the
/// number of its point-graph neighbors inside the blob.
struct BlobStats {
    mask: Vec<u64>,
    reach: Vec<u32>,
}

/// One run of median neighborhood linkage, advanced a threshold at a time.
///
/// Common-neighbor counts are updated incrementally as `t` grows (each
/// neighborhood gains exactly one point per step), and median tests first
/// bound the number of pairs that could exceed the threshold before
/// computing exact statistics. Every decision is identical to the one the
/// dense matrix formulation makes.
pub struct RmnlRun<'a> {
    sim: &'a SimilarityMatrix,
    rank: NeighborRanking,
    margins: Margins,
    config: RmnlConfig,
    n: usize,
    words: usize,
    /// Next threshold to process.
    t: usize,
    /// Threshold the neighbor indicator and counts currently describe.
    hood_t: usize,
    indicator: BitMatrix,
    /// Transpose of `indicator`: row `z` marks the points whose
    /// neighborhood contains `z`.
    members_of: BitMatrix,
    common: Vec<u16>,
    graph: BitMatrix,
    degree: Vec<u32>,
    blobs: BlobPartition,
    merges: Vec<Merge>,
    stats: HashMap<BlobId, BlobStats>,
    single_edges: HashMap<(usize, usize), BlobEdge>,
    pair_edges: HashMap<(usize, usize), BlobEdge>,
}

/// Writes the bits `counts[y] >= need` into `out`, returning how many are set.
fn pack_row(counts: &[u16], need: u16, out: &mut [u64]) -> u32 {
    let mut total = 0;
    for (w, chunk) in out.iter_mut().zip(counts.chunks(64)) {
        let mut bits = 0u64;
        for (i, &c) in chunk.iter().enumerate() {
            bits |= ((c >= need) as u64) << i;
        }
        *w = bits;
        total += bits.count_ones();
    }
    total
}

fn transpose(m: &BitMatrix) -> BitMatrix {
    let mut t = BitMatrix::zeros(m.cols(), m.rows());
    for r in 0..m.rows() {
        for c in m.row_ones(r) {
            t.set(c, r, true);
        }
    }
    t
}

impl<'a> RmnlRun<'a> {
    pub fn new(sim: &'a SimilarityMatrix, params: NoiseParams, config: RmnlConfig) -> Result<Self> {
        let n = sim.len();
        let margins = params.margins(n)?;
        Ok(Self::with_margins(sim, margins, config))
    }

    /// A run with explicitly chosen thresholds.
    ///
    /// # Panics
    ///
    /// If `sim` has more than 65535 points (counts are stored as `u16`).
    pub fn with_margins(sim: &'a SimilarityMatrix, margins: Margins, config: RmnlConfig) -> Self {
        let n = sim.len();
        assert!(n <= u16::MAX as usize, "at most 65535 points are supported");
        RmnlRun {
            sim,
            rank: NeighborRanking::new(sim),
            margins,
            config,
            n,
            words: n.div_ceil(64),
            t: margins.t_init.max(1),
            hood_t: 0,
            indicator: BitMatrix::zeros(n, n),
            members_of: BitMatrix::zeros(n, n),
            common: Vec::new(),
            graph: BitMatrix::zeros(n, n),
            degree: vec![0; n],
            blobs: BlobPartition::singletons(n),
            merges: Vec::new(),
            stats: HashMap::new(),
            single_edges: HashMap::new(),
            pair_edges: HashMap::new(),
        }
    }

    pub fn margins(&self) -> Margins {
        self.margins
    }

    pub fn blobs(&self) -> &BlobPartition {
        &self.blobs
    }

    pub fn ranking(&self) -> &NeighborRanking {
        &self.rank
    }

    /// Threshold of the most recent step.
    pub fn threshold(&self) -> usize {
        self.t.saturating_sub(1)
    }

    /// Point graph `F_t` of the most recent step.
    pub fn point_graph(&self) -> &BitMatrix {
        &self.graph
    }

    /// Neighbor indicator `I_t` of the most recent step.
    pub fn indicator(&self) -> &BitMatrix {
        &self.indicator
    }

    /// Common-neighbor counts `N_t` of the most recent step.
    pub fn common_counts(&self) -> CountMatrix {
        let mut m = CountMatrix::zeros(self.n, self.n);
        for x in 0..self.n {
            for y in 0..self.n {
                m.set(x, y, u32::from(self.common[x * self.n + y]));
            }
        }
        m
    }

    pub fn is_done(&self) -> bool {
        self.blobs.len() <= 1
    }

    /// Processes one threshold. Returns `false` once a single blob remains.
    pub fn step(&mut self) -> bool {
        if self.is_done() {
            return false;
        }
        let t = self.t;
        if t + 1 > self.n {
            while self.blobs.len() > 1 {
                let ev = fallback_merge(&mut self.blobs, self.sim);
                self.record(ev, t);
            }
            return false;
        }

        self.advance(t);
        self.rebuild_edges();

        match self.config.merge_order {
            MergeOrder::BestFirst => {
                self.best_first_merges(t);
                self.component_merges(t, true);
            }
            MergeOrder::Component => self.component_merges(t, false),
        }

        if self.config.speedup {
            match singleton_speedup(&mut self.blobs, self.sim, t, self.margins.min_size) {
                Ok(events) => events.into_iter().for_each(|ev| self.record(ev, t)),
                Err(Error::NoNonSingletonBlob) => {}
                Err(e) => unreachable!("speedup cannot fail with {e}"),
            }
        }

        self.t += 1;
        !self.is_done()
    }

    /// Runs to completion and returns the tree.
    pub fn run(mut self) -> Dendrogram {
        while self.step() {}
        self.finish()
    }

    pub fn finish(self) -> Dendrogram {
        Dendrogram::new(self.n, self.merges).expect("engine always emits a complete tree")
    }

    fn record(&mut self, ev: MergeEvent, t: usize) {
        debug_assert_eq!(ev.node, self.n + self.merges.len());
        self.merges.push(Merge {
            children: ev.children,
            level: Level::Threshold(t),
        });
    }

    /// Brings `indicator`, `common`, `graph` and `degree` to threshold `t`.
    fn advance(&mut self, t: usize) {
        let n = self.n;
        let skip = self.config.neighborhood.offset();
        if self.hood_t == 0 || self.hood_t >= t {
            self.indicator = neighbor_indicator(&self.rank, t, self.config.neighborhood);
            self.members_of = transpose(&self.indicator);
            let g = self.indicator.gram();
            self.common = (0..n).flat_map(|x| g.row(x).iter().map(|&c| c as u16)).collect();
            self.hood_t = t;
            let need = self.need(t);
            let words = self.words;
            let common = &self.common;
            self.graph
                .as_mut_words()
                .par_chunks_mut(words)
                .zip(self.degree.par_iter_mut())
                .enumerate()
                .for_each(|(x, (row, deg))| *deg = pack_row(&common[x * n..(x + 1) * n], need, row));
            return;
        }
        while self.hood_t < t {
            // Each neighborhood gains the point at the next rank, so
            // |N(x) ∩ N(y)| grows by [a_x ∈ N(y)] + [a_y ∈ N(x)] + [a_x = a_y].
            let pos = skip + self.hood_t;
            let added: Vec<usize> = (0..n).map(|x| self.rank.order(x)[pos] as usize).collect();
            let need = self.need(self.hood_t + 1);
            let (indicator, members_of) = (&self.indicator, &self.members_of);
            let words = self.words;
            self.common
                .par_chunks_mut(n)
                .zip(self.graph.as_mut_words().par_chunks_mut(words))
                .zip(self.degree.par_iter_mut())
                .enumerate()
                .for_each(|(x, ((row, graph_row), deg))| {
                    let ax = added[x];
                    let holders = members_of.row(ax);
                    let mine = indicator.row(x);
                    for (y, c) in row.iter_mut().enumerate() {
                        let ay = added[y];
                        *c += ((holders[y / 64] >> (y % 64)) & 1) as u16
                            + ((mine[ay / 64] >> (ay % 64)) & 1) as u16
                            + (ax == ay) as u16;
                    }
                    *deg = pack_row(row, need, graph_row);
                });
            for (x, &ax) in added.iter().enumerate() {
                self.indicator.set(x, ax, true);
                self.members_of.set(ax, x, true);
            }
            self.hood_t += 1;
        }
    }

    /// Smallest common-neighbor count that makes a point-graph edge at `t`.
    fn need(&self, t: usize) -> u16 {
        t.saturating_sub(self.margins.f_margin) as u16
    }

    fn blob_stats(&self, b: BlobId) -> BlobStats {
        let mut mask = vec![0u64; self.words];
        for &p in self.blobs.members(b) {
            mask[p / 64] |= 1 << (p % 64);
        }
        let reach = (0..self.n)
            .map(|x| and_count(self.graph.row(x), &mask))
            .collect();
        BlobStats { mask, reach }
    }

    fn rebuild_edges(&mut self) {
        self.stats.clear();
        self.single_edges.clear();
        self.pair_edges.clear();
        let ids = self.blobs.ids();
        for &b in &ids {
            if !self.blobs.is_singleton(b) {
                let s = self.blob_stats(b);
                self.stats.insert(b, s);
            }
        }
        let singles: Vec<BlobId> = ids.iter().copied().filter(|&b| self.blobs.is_singleton(b)).collect();
        for (i, &a) in singles.iter().enumerate() {
            let x = self.blobs.min_member(a);
            if self.degree[x] as usize <= self.margins.h_margin {
                continue;
            }
            for &b in &singles[i + 1..] {
                if let Some(e) = self.test_singletons(a, b) {
                    self.single_edges.insert((e.min_a, e.min_b), e);
                }
            }
        }
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if self.blobs.is_singleton(a) && self.blobs.is_singleton(b) {
                    continue;
                }
                if let Some(e) = self.test_median(a, b) {
                    self.pair_edges.insert((e.min_a, e.min_b), e);
                }
            }
        }
    }

    fn test_singletons(&self, a: BlobId, b: BlobId) -> Option<BlobEdge> {
        let (x, y) = (self.blobs.min_member(a), self.blobs.min_member(b));
        let h = self.margins.h_margin;
        if self.degree[x] as usize <= h || self.degree[y] as usize <= h {
            return None;
        }
        let common = and_count(self.graph.row(x), self.graph.row(y)) as usize;
        (common > h).then(|| edge(&self.blobs, a, b, None))
    }

    /// Upper bound on the number of pairs `(x, y)` whose statistic exceeds
    /// `thr`, using `S_t(x, y) <= |F(x) ∩ C_v| + |F(y) ∩ C_u|`.
    fn pairs_possibly_above(&self, a: BlobId, b: BlobId, thr: u32) -> u64 {
        match (self.stats.get(&a), self.stats.get(&b)) {
            (None, Some(sb)) | (Some(sb), None) => {
                let single = if self.stats.contains_key(&a) { b } else { a };
                let big = if single == a { b } else { a };
                let z = self.blobs.min_member(single);
                let c = sb.reach[z];
                if c > thr {
                    self.blobs.size(big) as u64
                } else if c == thr {
                    c as u64
                } else {
                    0
                }
            }
            (Some(sa), Some(sb)) => {
                let mut from_b: Vec<u32> = self.blobs.members(b).iter().map(|&y| sa.reach[y]).collect();
                from_b.sort_unstable();
                self.blobs
                    .members(a)
                    .iter()
                    .map(|&x| {
                        let ax = sb.reach[x];
                        if ax > thr {
                            from_b.len() as u64
                        } else {
                            let cut = from_b.partition_point(|&v| v <= thr - ax);
                            (from_b.len() - cut) as u64
                        }
                    })
                    .sum()
            }
            (None, None) => unreachable!("singleton pairs use the common-neighbor test"),
        }
    }

    fn test_median(&self, a: BlobId, b: BlobId) -> Option<BlobEdge> {
        let (sa, sb) = (self.blobs.size(a), self.blobs.size(b));
        let size_sum = sa + sb;
        let thr = (size_sum / 4) as u32;
        let pairs = (sa * sb) as u64;
        if self.pairs_possibly_above(a, b, thr) < pairs / 2 + 1 {
            return None;
        }
        let mut mask = vec![0u64; self.words];
        for blob in [a, b] {
            match self.stats.get(&blob) {
                Some(s) => mask.iter_mut().zip(&s.mask).for_each(|(m, w)| *m |= w),
                None => {
                    let p = self.blobs.min_member(blob);
                    mask[p / 64] |= 1 << (p % 64);
                }
            }
        }
        let mut values = Vec::with_capacity(sa * sb);
        for &x in self.blobs.members(a) {
            let fx = self.graph.row(x);
            for &y in self.blobs.members(b) {
                values.push(and3_count(fx, self.graph.row(y), &mask));
            }
        }
        let median = lower_median(&mut values);
        passes_median(median, size_sum).then(|| edge(&self.blobs, a, b, Some(median)))
    }

    /// Merges blobs and refreshes everything that depends on the merged ones.
    fn merge_and_update(&mut self, parts: &[BlobId], t: usize) {
        let gone: Vec<usize> = parts.iter().map(|&b| self.blobs.min_member(b)).collect();
        for &b in parts {
            self.stats.remove(&b);
        }
        let ev = self.blobs.merge(parts);
        let w = ev.blob;
        self.record(ev, t);

        self.single_edges.retain(|k, _| !gone.contains(&k.0) && !gone.contains(&k.1));
        self.pair_edges.retain(|k, _| !gone.contains(&k.0) && !gone.contains(&k.1));
        let s = self.blob_stats(w);
        self.stats.insert(w, s);
        for o in self.blobs.ids() {
            if o != w {
                if let Some(e) = self.test_median(w, o) {
                    self.pair_edges.insert((e.min_a, e.min_b), e);
                }
            }
        }
    }

    fn best_first_merges(&mut self, t: usize) {
        while let Some(best) = best_candidate(self.pair_edges.values(), self.margins.min_size) {
            self.merge_and_update(&[best.a, best.b], t);
        }
    }

    fn component_merges(&mut self, t: usize, repeat: bool) {
        loop {
            let comps = components(
                &self.blobs,
                self.single_edges.values().chain(self.pair_edges.values()),
            );
            let min_size = self.margins.min_size;
            let mut picked = comps
                .into_iter()
                .filter(|c| c.len() >= 2 && component_size(&self.blobs, c) >= min_size)
                .peekable();
            if picked.peek().is_none() {
                return;
            }
            if repeat {
                let comp = picked.next().unwrap();
                self.merge_and_update(&comp, t);
            } else {
                let all: Vec<Vec<BlobId>> = picked.collect();
                for comp in all {
                    let ev = self.blobs.merge(&comp);
                    self.record(ev, t);
                }
                return;
            }
        }
    }
}
