use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::params::NoiseParams;
use crate::properties::check_good_neighborhood;
use crate::similarity::SimilarityMatrix;

/// Block instances with bounded per-point noise and adversarial points.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedSpec {
    pub sizes: Vec<usize>,
    pub params: NoiseParams,
    pub within: f64,
    pub across: f64,
    /// Uniform perturbation added to every block value.
    pub jitter: f64,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(sizes: Vec<usize>, params: NoiseParams, seed: u64) -> Self {
        PlantedSpec {
            sizes,
            params,
            within: 0.9,
            across: 0.1,
            jitter: 0.0,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Planted {
    pub sim: SimilarityMatrix,
    pub target: Labeling,
    pub bad_set: Vec<usize>,
    /// Attempt (0-based) that passed certification.
    pub attempt: usize,
}

pub const MAX_ATTEMPTS: usize = 10;

/// Builds a block instance where each point has at most `floor(alpha n)`
/// strong links into other clusters and `floor(nu n)` points have random
/// similarity rows, then certifies the `(alpha, nu)` good neighborhood
/// property before returning it.
pub fn generate_planted_good_neighborhood(spec: &PlantedSpec) -> Result<Planted> {
    let n: usize = spec.sizes.iter().sum();
    let total = spec.params.total();
    let min = spec.sizes.iter().copied().min().unwrap_or(0);
    if spec.sizes.is_empty() || min as f64 <= 6.0 * total * n as f64 {
        return Err(Error::InvalidSpec(format!(
            "smallest cluster ({min}) must exceed 6(alpha+nu)n = {}",
            6.0 * total * n as f64
        )));
    }
    let labels: Vec<usize> = spec
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
        .collect();
    let target = Labeling::new(labels, spec.sizes.len())?;
    let links = (spec.params.alpha * n as f64 + 1e-9).floor() as usize;
    let bad_count = (spec.params.nu * n as f64 + 1e-9).floor() as usize;

    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = super::rng(spec.seed.wrapping_add(attempt as u64 * 0x9E37_79B9_7F4A_7C15));
        let mut sim = SimilarityMatrix::from_fn(n, |i, j| {
            if i == j {
                return 1.0;
            }
            let base = if target.label(i) == target.label(j) { spec.within } else { spec.across };
            if spec.jitter > 0.0 {
                base + rng.gen_range(-spec.jitter..=spec.jitter)
            } else {
                base
            }
        });

        let mut bad_set: Vec<usize> = sample(&mut rng, n, bad_count).into_vec();
        bad_set.sort_unstable();
        let is_bad = |p: usize| bad_set.binary_search(&p).is_ok();

        let mut degree = vec![0usize; n];
        let mut order: Vec<usize> = (0..n).filter(|&p| !is_bad(p)).collect();
        order.shuffle(&mut rng);
        for &x in &order {
            let mut candidates: Vec<usize> = (0..n)
                .filter(|&y| !is_bad(y) && target.label(y) != target.label(x) && degree[y] < links)
                .filter(|&y| sim.get(x, y) < spec.within.min(0.9))
                .collect();
            candidates.shuffle(&mut rng);
            let want = links.saturating_sub(degree[x]);
            for &y in candidates.iter().take(want) {
                sim.set(x, y, rng.gen_range(0.9..=1.0));
                degree[x] += 1;
                degree[y] += 1;
            }
        }

        for &b in &bad_set {
            for y in (0..n).filter(|&y| y != b) {
                sim.set(b, y, rng.gen_range(-1.0..=1.0));
            }
        }

        if check_good_neighborhood(&sim, &target, spec.params.alpha, &bad_set)?.holds {
            return Ok(Planted {
                sim,
                target,
                bad_set,
                attempt,
            });
        }
    }
    Err(Error::CertificationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::check_strict_separation;

    #[test]
    fn certified_two_blocks() {
        let spec = PlantedSpec::new(vec![30, 30], NoiseParams::new(0.025, 0.025).unwrap(), 3);
        let p = generate_planted_good_neighborhood(&spec).unwrap();
        assert_eq!(p.bad_set.len(), 1);
        assert!(check_good_neighborhood(&p.sim, &p.target, 0.025, &p.bad_set).unwrap().holds);
        // 6 * 0.1 * 60 = 36 exceeds the cluster size.
        let spec = PlantedSpec::new(vec![30, 30], NoiseParams::new(0.05, 0.05).unwrap(), 3);
        assert!(generate_planted_good_neighborhood(&spec).is_err());
    }

    #[test]
    fn clean_blocks_are_strictly_separated() {
        let spec = PlantedSpec::new(vec![10, 12], NoiseParams::new(0.0, 0.0).unwrap(), 0);
        let p = generate_planted_good_neighborhood(&spec).unwrap();
        assert!(check_strict_separation(&p.sim, &p.target, &[]).unwrap().holds);
    }

    #[test]
    fn rejects_small_clusters() {
        // 6 * 0.05 * 20 = 6, and the clusters have exactly 6 and 14 points.
        let spec = PlantedSpec::new(vec![6, 14], NoiseParams::new(0.05, 0.0).unwrap(), 0);
        assert!(matches!(generate_planted_good_neighborhood(&spec), Err(Error::InvalidSpec(_))));
    }
}
