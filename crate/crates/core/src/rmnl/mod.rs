//! Robust median neighborhood linkage.
//!
//! The algorithm keeps a neighborhood size `t` and a partition of the points
//! into blobs. For each `t` it links points that share most of their `t`
//! nearest neighbors (the point graph `F_t`), links blobs through a median
//! vote over that graph (the blob graph `H_t`), and merges blobs that end up
//! connected. `t` then grows by one until a single blob is left.
//!
//! [`rmnl_cluster`] is the entry point. [`RmnlRun`] exposes the run one
//! threshold at a time, and [`reference_cluster`] recomputes every matrix
//! densely after each merge; both produce the same tree.

mod engine;
mod state;
mod steps;

pub use engine::RmnlRun;
pub use state::{build_f, neighbor_indicator, ThresholdState};
pub use steps::{
    build_h, lower_median, merge_components, merge_step, passes_median, singleton_speedup,
    BlobEdge, BlobGraph,
};

use crate::blobs::BlobPartition;
use crate::dendrogram::{Dendrogram, Level, Merge};
use crate::error::{Error, Result};
use crate::params::{Margins, NoiseParams};
use crate::ranking::NeighborRanking;
use crate::similarity::SimilarityMatrix;

/// Order in which blobs of one threshold are merged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MergeOrder {
    /// Most confident pair first, recomputing the blob graph after each
    /// merge; then whole components of leftover singletons.
    #[default]
    BestFirst,
    /// Every sufficiently large connected component at once.
    Component,
}

/// Whether a point counts as one of its own `t` nearest neighbors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Neighborhood {
    #[default]
    IncludeSelf,
    ExcludeSelf,
}

impl Neighborhood {
    pub(crate) fn offset(self) -> usize {
        match self {
            Neighborhood::IncludeSelf => 0,
            Neighborhood::ExcludeSelf => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RmnlConfig {
    pub merge_order: MergeOrder,
    pub neighborhood: Neighborhood,
    /// Attach leftover singletons to their best blob once few remain.
    pub speedup: bool,
}

impl Default for RmnlConfig {
    fn default() -> Self {
        RmnlConfig {
            merge_order: MergeOrder::BestFirst,
            neighborhood: Neighborhood::IncludeSelf,
            speedup: true,
        }
    }
}

/// Clusters with the default configuration.
pub fn rmnl_cluster(sim: &SimilarityMatrix, params: NoiseParams) -> Result<Dendrogram> {
    Rmnl::new(params).cluster(sim)
}

/// A configured clustering run.
#[derive(Clone, Copy, Debug)]
pub struct Rmnl {
    pub params: NoiseParams,
    pub config: RmnlConfig,
}

impl Rmnl {
    pub fn new(params: NoiseParams) -> Self {
        Rmnl {
            params,
            config: RmnlConfig::default(),
        }
    }

    pub fn with_config(mut self, config: RmnlConfig) -> Self {
        self.config = config;
        self
    }

    pub fn cluster(&self, sim: &SimilarityMatrix) -> Result<Dendrogram> {
        if sim.len() == 1 {
            return Dendrogram::new(1, Vec::new());
        }
        Ok(RmnlRun::new(sim, self.params, self.config)?.run())
    }
}

/// The same algorithm with every matrix recomputed densely after each
/// merge. Quartic in `n`; meant for checking [`RmnlRun`] on small inputs.
pub fn reference_cluster(
    sim: &SimilarityMatrix,
    params: NoiseParams,
    config: RmnlConfig,
) -> Result<Dendrogram> {
    let n = sim.len();
    if n == 1 {
        return Dendrogram::new(1, Vec::new());
    }
    let margins: Margins = params.margins(n)?;
    let rank = NeighborRanking::new(sim);
    let mut blobs = BlobPartition::singletons(n);
    let mut merges = Vec::new();
    let mut t = margins.t_init;
    let push = |events: Vec<crate::blobs::MergeEvent>, t: usize, merges: &mut Vec<Merge>| {
        for ev in events {
            merges.push(Merge { children: ev.children, level: Level::Threshold(t) });
        }
    };
    while blobs.len() > 1 {
        if t + 1 > n {
            while blobs.len() > 1 {
                let ev = steps::fallback_merge(&mut blobs, sim);
                push(vec![ev], t, &mut merges);
            }
            break;
        }
        let mut state = ThresholdState::compute(&rank, t, margins.f_margin, &blobs, config.neighborhood);
        let events = match config.merge_order {
            MergeOrder::BestFirst => merge_step(&mut blobs, &mut state, margins.h_margin, margins.min_size),
            MergeOrder::Component => merge_components(&mut blobs, &state, margins.h_margin, margins.min_size),
        };
        push(events, t, &mut merges);
        if config.speedup {
            match singleton_speedup(&mut blobs, sim, t, margins.min_size) {
                Ok(events) => push(events, t, &mut merges),
                Err(Error::NoNonSingletonBlob) => {}
                Err(e) => return Err(e),
            }
        }
        t += 1;
    }
    Dendrogram::new(n, merges)
}
