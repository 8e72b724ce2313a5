use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::similarity::SimilarityMatrix;

/// The eight inner regions, in index order.
pub const REGION_NAMES: [&str; 8] = [
    "Algorithms",
    "Complexity",
    "Learning",
    "Planning",
    "Squash",
    "Billiards",
    "Football",
    "Baseball",
];

fn fig1_value(a: usize, b: usize) -> f64 {
    if a == b {
        0.999
    } else if a / 2 == b / 2 {
        0.75
    } else if a / 4 == b / 4 {
        0.5
    } else {
        0.0
    }
}

/// Eight equal regions of `region_size` points with a two-level block
/// structure: pairs of regions, then halves. Returns the similarities and
/// the region of each point (labels 1..=8).
pub fn generate_fig1(region_size: usize) -> Result<(SimilarityMatrix, Labeling)> {
    if region_size == 0 {
        return Err(Error::InvalidSpec("region size must be positive".into()));
    }
    let n = 8 * region_size;
    let sim = SimilarityMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else {
            fig1_value(i / region_size, j / region_size)
        }
    });
    let regions = Labeling::from_labels((0..n).map(|p| p / region_size + 1).collect())?;
    Ok((sim, regions))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedPairs {
    pub sim: SimilarityMatrix,
    pub regions: Labeling,
    /// {Algorithms ∪ Complexity ∪ Learning ∪ Planning, Squash ∪ Billiards, Football ∪ Baseball}.
    pub target: Labeling,
    /// {Algorithms ∪ Complexity, Learning ∪ Planning, Squash ∪ Billiards ∪ Football ∪ Baseball}.
    pub alt_target: Labeling,
    /// Each matched pair, smaller index first.
    pub pairs: Vec<(usize, usize)>,
}

/// The block instance where the `i`-th point of each of the first four
/// regions is matched with the `i`-th point of the region four places
/// later, at similarity 1.
pub fn generate_matched_pairs(n: usize) -> Result<MatchedPairs> {
    if n == 0 || !n.is_multiple_of(8) {
        return Err(Error::InvalidSpec(format!("n = {n} must be a positive multiple of 8")));
    }
    let r = n / 8;
    let (mut sim, regions) = generate_fig1(r)?;
    let pairs: Vec<(usize, usize)> = (0..n / 2).map(|p| (p, p + n / 2)).collect();
    for &(a, b) in &pairs {
        sim.set(a, b, 1.0);
    }
    let target = Labeling::from_labels(
        (0..n)
            .map(|p| match p / r {
                0..=3 => 1,
                4 | 5 => 2,
                _ => 3,
            })
            .collect(),
    )?;
    let alt_target = Labeling::from_labels(
        (0..n)
            .map(|p| match p / r {
                0 | 1 => 1,
                2 | 3 => 2,
                _ => 3,
            })
            .collect(),
    )?;
    Ok(MatchedPairs {
        sim,
        regions,
        target,
        alt_target,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_count() {
        let m = generate_matched_pairs(64).unwrap();
        assert_eq!(m.pairs.len(), 32);
        let ones = (0..64)
            .flat_map(|i| ((i + 1)..64).map(move |j| (i, j)))
            .filter(|&(i, j)| m.sim.get(i, j) == 1.0)
            .count();
        assert_eq!(ones, 32);
    }

    #[test]
    fn matching_crosses_regions() {
        let m = generate_matched_pairs(16).unwrap();
        assert_eq!(m.pairs[0], (0, 8));
        assert_eq!(m.regions.label(0), 1);
        assert_eq!(m.regions.label(8), 5);
    }
}
