//! Classification error and best-pruning evaluation.

mod hungarian;
mod pruning;
mod sweep;

pub use hungarian::max_weight_matching;
pub use pruning::{
    best_pruning_error, brute_force_pruning_error, enumerate_prunings, PruningResult,
};
pub use sweep::{
    default_rmnl_grid, noise_sweep, sweep_threads, LinkageRunner, RmnlRunner, Runner, SweepCell,
    SweepTable,
};

use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// Intersection sizes between predicted (rows) and true (columns) clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionTable {
    pub counts: Vec<Vec<i64>>,
}

impl ConfusionTable {
    pub fn new(pred: &Labeling, target: &Labeling) -> Result<Self> {
        if pred.len() != target.len() {
            return Err(Error::Length {
                what: "prediction",
                expected: target.len(),
                got: pred.len(),
            });
        }
        let mut counts = vec![vec![0i64; target.k()]; pred.k()];
        for (p, t) in pred.labels().iter().zip(target.labels()) {
            counts[p - 1][t - 1] += 1;
        }
        Ok(ConfusionTable { counts })
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().flatten().sum()
    }

    /// Points covered by the best injective matching of clusters.
    pub fn matched(&self) -> i64 {
        max_weight_matching(&self.counts).0
    }
}

/// Fraction of points misassigned under the best matching of predicted to
/// true clusters. Clusters left unmatched count entirely as errors.
pub fn classification_error(pred: &Labeling, target: &Labeling) -> Result<f64> {
    let table = ConfusionTable::new(pred, target)?;
    let n = table.total();
    if n == 0 {
        return Ok(0.0);
    }
    Ok(1.0 - table.matched() as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_swapped() {
        let a = Labeling::new(vec![1, 1, 2, 2, 2], 2).unwrap();
        let b = Labeling::new(vec![2, 2, 1, 1, 1], 2).unwrap();
        assert_eq!(classification_error(&a, &a).unwrap(), 0.0);
        assert_eq!(classification_error(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn unmatched_clusters_are_errors() {
        let pred = Labeling::new(vec![1, 2, 3, 3], 3).unwrap();
        let target = Labeling::new(vec![1, 1, 1, 1], 1).unwrap();
        assert_eq!(classification_error(&pred, &target).unwrap(), 0.5);
    }
}
