use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::similarity::SimilarityMatrix;

/// Areas in index order: the first two form the AI field, the last two
/// the Statistics field.
pub const AREA_NAMES: [&str; 4] = ["Learning", "Planning", "ParameterEstimation", "HypothesisTesting"];

/// Four research areas in two fields, with boundary documents that sit
/// close to the other field.
#[derive(Clone, Debug, PartialEq)]
pub struct AIStatSpec {
    pub n: usize,
    /// Fraction of each area made of boundary documents.
    pub boundary_fraction: f64,
    /// Extra cross-field perfect matches per point, as a fraction of `n`.
    pub extra_alpha: f64,
    /// Fraction of points whose similarities are all flipped to `1 - s`.
    pub extra_nu: f64,
    pub seed: u64,
}

impl Default for AIStatSpec {
    fn default() -> Self {
        AIStatSpec {
            n: 512,
            boundary_fraction: 1.0 / 8.0,
            extra_alpha: 0.0,
            extra_nu: 0.0,
            seed: 0,
        }
    }
}

impl AIStatSpec {
    pub fn with_seed(seed: u64) -> Self {
        AIStatSpec {
            seed,
            ..Self::default()
        }
    }

    pub fn area_size(&self) -> usize {
        self.n / 4
    }

    fn exact_count(&self, name: &'static str, value: f64, base: usize) -> Result<usize> {
        let x = value * base as f64;
        let r = x.round();
        if !(0.0..=1.0).contains(&value) || (x - r).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "{name} = {value} does not give a whole number of points out of {base}"
            )));
        }
        Ok(r as usize)
    }

    fn counts(&self) -> Result<(usize, usize, usize)> {
        if self.n == 0 || !self.n.is_multiple_of(4) {
            return Err(Error::InvalidSpec(format!("n = {} must be a positive multiple of 4", self.n)));
        }
        Ok((
            self.exact_count("boundary_fraction", self.boundary_fraction, self.area_size())?,
            self.exact_count("extra_alpha", self.extra_alpha, self.n)?,
            self.exact_count("extra_nu", self.extra_nu, self.n)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AIStat {
    pub sim: SimilarityMatrix,
    /// Area of each point, labels 1..=4 in [`AREA_NAMES`] order.
    pub areas: Labeling,
    /// {AI, Statistics}.
    pub fields: Labeling,
    /// {Learning, Planning, Statistics}.
    pub split_ai: Labeling,
    /// {AI, ParameterEstimation, HypothesisTesting}.
    pub split_stats: Labeling,
    /// `subsets[p]` is the area containing `p` (empty for flipped points).
    pub subsets: Vec<Vec<usize>>,
    /// Points whose similarities were flipped.
    pub bad_set: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl AIStat {
    /// The three target prunings: fields first, then the two 3-cluster ones.
    pub fn targets(&self) -> [&Labeling; 3] {
        [&self.fields, &self.split_ai, &self.split_stats]
    }
}

pub fn generate_aistat(spec: &AIStatSpec) -> Result<AIStat> {
    let (per_area, extra, flips) = spec.counts()?;
    let n = spec.n;
    let q = spec.area_size();
    let mut rng = super::rng(spec.seed);
    let area = |p: usize| p / q;
    let field = |p: usize| p / (2 * q);
    let other_field = |p: usize| -> std::ops::Range<usize> {
        if field(p) == 0 {
            2 * q..n
        } else {
            0..2 * q
        }
    };

    let mut sim = SimilarityMatrix::from_fn(n, |i, j| {
        if area(i) == area(j) {
            0.99
        } else if field(i) == field(j) {
            0.8
        } else {
            0.5
        }
    });

    let mut boundary = Vec::with_capacity(4 * per_area);
    for a in 0..4 {
        let mut picked: Vec<usize> = sample(&mut rng, q, per_area).into_iter().map(|i| a * q + i).collect();
        picked.sort_unstable();
        boundary.extend(picked);
    }
    for &x in &boundary {
        for y in other_field(x) {
            sim.set(x, y, 0.9);
        }
        let sibling = (area(x) ^ 1) * q;
        for y in sibling..sibling + q {
            sim.set(x, y, 0.6);
        }
    }
    for &x in &boundary {
        let y = rng.gen_range(other_field(x));
        sim.set(x, y, 1.0);
    }

    for x in 0..n {
        let start = other_field(x).start;
        for i in sample(&mut rng, 2 * q, extra) {
            sim.set(x, start + i, 1.0);
        }
    }

    let mut bad_set: Vec<usize> = sample(&mut rng, n, flips).into_vec();
    bad_set.sort_unstable();
    if !bad_set.is_empty() {
        let before = sim.clone();
        for &x in &bad_set {
            for y in (0..n).filter(|&y| y != x) {
                sim.set(x, y, 1.0 - before.get(x, y));
            }
        }
    }

    let labels = |f: &dyn Fn(usize) -> usize| Labeling::from_labels((0..n).map(f).collect());
    let areas = labels(&|p| area(p) + 1)?;
    let fields = labels(&|p| field(p) + 1)?;
    let split_ai = labels(&|p| if field(p) == 0 { area(p) + 1 } else { 3 })?;
    let split_stats = labels(&|p| if field(p) == 0 { 1 } else { area(p) })?;
    let subsets = (0..n)
        .map(|p| {
            if bad_set.binary_search(&p).is_ok() {
                Vec::new()
            } else {
                (area(p) * q..(area(p) + 1) * q).filter(|y| bad_set.binary_search(y).is_err()).collect()
            }
        })
        .collect();
    Ok(AIStat {
        sim,
        areas,
        fields,
        split_ai,
        split_stats,
        subsets,
        bad_set,
        boundary,
    })
}
