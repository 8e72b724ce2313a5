//! Error tables over noise levels, seeds and algorithms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::linkage::{linkage_from_similarity, Linkage};
use crate::params::NoiseParams;
use crate::rmnl::{Rmnl, RmnlConfig};
use crate::similarity::SimilarityMatrix;

use super::best_pruning_error;

/// An algorithm evaluated by its best pruning against a target.
pub trait Runner: Sync {
    fn name(&self) -> String;

    /// Best pruning error with as many clusters as the target has.
    fn best_error(&self, sim: &SimilarityMatrix, target: &Labeling) -> Result<f64>;
}

/// Median neighborhood linkage tuned over a grid of `alpha + nu` values,
/// keeping the best result. Grid values too large for the instance are
/// skipped.
#[derive(Clone, Debug)]
pub struct RmnlRunner {
    pub grid: Vec<f64>,
    pub config: RmnlConfig,
}

impl Default for RmnlRunner {
    fn default() -> Self {
        RmnlRunner {
            grid: default_rmnl_grid(),
            config: RmnlConfig::default(),
        }
    }
}

/// Powers of two from 1/256 to 1/4.
pub fn default_rmnl_grid() -> Vec<f64> {
    (2..=8).rev().map(|e| 1.0 / f64::from(1u32 << e)).collect()
}

impl Runner for RmnlRunner {
    fn name(&self) -> String {
        "rmnl".into()
    }

    fn best_error(&self, sim: &SimilarityMatrix, target: &Labeling) -> Result<f64> {
        let mut best: Option<f64> = None;
        let mut last_err = None;
        for &total in &self.grid {
            // Only the sum matters to the thresholds.
            let params = NoiseParams::new(total, 0.0)?;
            match Rmnl::new(params).with_config(self.config).cluster(sim) {
                Ok(tree) => {
                    let e = best_pruning_error(&tree, target, target.k())?.error;
                    best = Some(best.map_or(e, |b: f64| b.min(e)));
                }
                Err(e @ Error::ParamsTooLarge { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        match (best, last_err) {
            (Some(b), _) => Ok(b),
            (None, Some(e)) => Err(e),
            (None, None) => Err(Error::InvalidSpec("empty parameter grid".into())),
        }
    }
}

/// A classical linkage on `1 - sim`.
#[derive(Clone, Copy, Debug)]
pub struct LinkageRunner(pub Linkage);

impl Runner for LinkageRunner {
    fn name(&self) -> String {
        self.0.name().into()
    }

    fn best_error(&self, sim: &SimilarityMatrix, target: &Labeling) -> Result<f64> {
        let tree = linkage_from_similarity(sim, self.0);
        Ok(best_pruning_error(&tree, target, target.k())?.error)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub level: f64,
    pub seed: u64,
    pub algorithm: String,
    pub error: f64,
}

/// Mean error per (level, algorithm), plus every individual run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub levels: Vec<f64>,
    pub algorithms: Vec<String>,
    /// `mean[level][algorithm]`.
    pub mean: Vec<Vec<f64>>,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn mean_of(&self, level: usize, algorithm: &str) -> Option<f64> {
        let a = self.algorithms.iter().position(|x| x == algorithm)?;
        self.mean.get(level).map(|row| row[a])
    }

    /// Tab-separated, one row per level, with a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("level");
        for a in &self.algorithms {
            out.push('\t');
            out.push_str(a);
        }
        out.push('\n');
        for (level, row) in self.levels.iter().zip(&self.mean) {
            out.push_str(&format!("{level}"));
            for v in row {
                out.push_str(&format!("\t{v:.6}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Worker threads for sweeps: `RHC_THREADS` if set to a positive integer,
/// otherwise the number of logical cores.
pub fn sweep_threads() -> usize {
    std::env::var("RHC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Generates an instance for every (level, seed), runs every algorithm on
/// it and averages the errors over seeds.
pub fn noise_sweep<G>(
    runners: &[&dyn Runner],
    generator: G,
    levels: &[f64],
    seeds: &[u64],
) -> Result<SweepTable>
where
    G: Fn(f64, u64) -> Result<(SimilarityMatrix, Labeling)> + Sync,
{
    if levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSpec("sweep levels must be sorted".into()));
    }
    let algorithms: Vec<String> = runners.iter().map(|r| r.name()).collect();
    if seeds.is_empty() || levels.is_empty() {
        return Ok(SweepTable {
            levels: Vec::new(),
            algorithms,
            mean: Vec::new(),
            cells: Vec::new(),
        });
    }

    let jobs: Vec<(f64, u64)> = levels
        .iter()
        .flat_map(|&l| seeds.iter().map(move |&s| (l, s)))
        .collect();
    let run = |&(level, seed): &(f64, u64)| -> Result<Vec<SweepCell>> {
        let (sim, target) = generator(level, seed)?;
        runners
            .iter()
            .map(|r| {
                Ok(SweepCell {
                    level,
                    seed,
                    algorithm: r.name(),
                    error: r.best_error(&sim, &target)?,
                })
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    let results: Vec<Vec<SweepCell>> =
        pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?;
    let cells: Vec<SweepCell> = results.into_iter().flatten().collect();

    let mean = levels
        .iter()
        .map(|&l| {
            algorithms
                .iter()
                .map(|a| {
                    let errs: Vec<f64> = cells
                        .iter()
                        .filter(|c| c.level == l && &c.algorithm == a)
                        .map(|c| c.error)
                        .collect();
                    errs.iter().sum::<f64>() / errs.len() as f64
                })
                .collect()
        })
        .collect();
    Ok(SweepTable {
        levels: levels.to_vec(),
        algorithms,
        mean,
        cells,
    })
}
