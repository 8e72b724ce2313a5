//! Robust hierarchical clustering from pairwise similarities.
//!
//! The centerpiece is robust median neighborhood linkage ([`rmnl`]), an
//! agglomerative algorithm whose merges are decided by votes over shared
//! nearest neighbors instead of by single similarity values, which makes it
//! tolerant to a bounded fraction of noisy neighbors and adversarial points.
//! Around it sit the classical linkage baselines, an inductive variant that
//! clusters a sample and extends to the full data, checkers for the
//! similarity properties under which the algorithm provably succeeds,
//! synthetic instance generators, and the evaluation protocol (best pruning
//! error under optimal label matching).

pub mod bitmat;
pub mod blobs;
pub mod dendrogram;
pub mod error;
pub mod inductive;
pub mod eval;
pub mod io;
pub mod labeling;
pub mod linkage;
pub mod params;
pub mod properties;
pub mod ranking;
pub mod rmnl;
pub mod similarity;
pub mod synth;

pub use blobs::{BlobPartition, UnionFind};
pub use dendrogram::{Dendrogram, Level, Merge, NodeId};
pub use error::{Error, Result};
pub use labeling::Labeling;
pub use linkage::{linkage_cluster, Linkage};
pub use params::{Margins, NoiseParams};
pub use ranking::NeighborRanking;
pub use rmnl::{rmnl_cluster, Rmnl, RmnlConfig};
pub use similarity::{DissimilarityMatrix, SimilarityMatrix};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/similarity.md")]
    mod similarity {}
    #[doc = include_str!("../../../book/src/rmnl.md")]
    mod rmnl {}
    #[doc = include_str!("../../../book/src/linkage.md")]
    mod linkage {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/properties.md")]
    mod properties {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/inductive.md")]
    mod inductive {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
