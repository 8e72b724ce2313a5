use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// A dense table of numeric attributes, one row per point.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeTable {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl AttributeTable {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Shape {
                expected: rows * cols,
                got: values.len(),
            });
        }
        Ok(AttributeTable { rows, cols, values })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    /// Rescales every column to `[0, 1]`; constant columns become 0.
    pub fn normalized(&self) -> AttributeTable {
        let mut out = self.clone();
        for c in 0..self.cols {
            let col = (0..self.rows).map(|r| self.get(r, c));
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            for r in 0..self.rows {
                let v = &mut out.values[r * self.cols + c];
                *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
            }
        }
        out
    }
}

/// Similarity `1 - 2 d^2 / max d^2` from squared Euclidean distances
/// between rows: the closest pairs get 1 and the farthest -1.
pub fn attributes_to_similarity(table: &AttributeTable) -> SimilarityMatrix {
    let n = table.rows;
    let mut d2 = vec![0.0; n * n];
    let mut max: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = table.row(i).iter().zip(table.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            d2[i * n + j] = d;
            max = max.max(d);
        }
    }
    SimilarityMatrix::from_fn(n, |i, j| {
        if i == j || max == 0.0 {
            1.0
        } else {
            1.0 - 2.0 * d2[i * n + j] / max
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    /// Replace a fraction `p` of the (normalized) attribute entries with N(0, 1) draws.
    AttrCorrupt,
    /// Replace a fraction `p` of the similarity pairs with clipped N(0, 1) draws.
    SimCorrupt,
    /// Add N(0, p^2) to every (normalized) attribute entry.
    AttrGauss,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::AttrCorrupt => "attr_corrupt",
            NoiseKind::SimCorrupt => "sim_corrupt",
            NoiseKind::AttrGauss => "attr_gauss",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [NoiseKind::AttrCorrupt, NoiseKind::SimCorrupt, NoiseKind::AttrGauss]
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown noise kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoisyData {
    Attributes(AttributeTable),
    Similarity(SimilarityMatrix),
}

impl NoisyData {
    fn kind_name(&self) -> &'static str {
        match self {
            NoisyData::Attributes(_) => "an attribute table",
            NoisyData::Similarity(_) => "a similarity matrix",
        }
    }
}

fn entry_count(p: f64, total: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadFraction { name: "p", value: p });
    }
    Ok(((p * total as f64).round() as usize).min(total))
}

/// Applies one noise model at level `p`. Attribute noise works on the
/// column-normalized table; similarity noise corrupts unordered pairs so
/// the matrix stays symmetric, and clips to `[-1, 1]`.
pub fn inject_noise(data: &NoisyData, kind: NoiseKind, p: f64, seed: u64) -> Result<NoisyData> {
    let mut rng = super::rng(seed);
    match (kind, data) {
        (NoiseKind::AttrCorrupt, NoisyData::Attributes(t)) => {
            let mut out = t.normalized();
            let count = entry_count(p, out.values.len())?;
            for i in sample(&mut rng, out.values.len(), count) {
                out.values[i] = StandardNormal.sample(&mut rng);
            }
            Ok(NoisyData::Attributes(out))
        }
        (NoiseKind::AttrGauss, NoisyData::Attributes(t)) => {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::BadFraction { name: "p", value: p });
            }
            let mut out = t.normalized();
            if p > 0.0 {
                let normal = Normal::new(0.0, p).expect("finite positive deviation");
                for v in &mut out.values {
                    *v += normal.sample(&mut rng);
                }
            }
            Ok(NoisyData::Attributes(out))
        }
        (NoiseKind::SimCorrupt, NoisyData::Similarity(s)) => {
            let n = s.len();
            let pairs = n * n.saturating_sub(1) / 2;
            let count = entry_count(p, pairs)?;
            let mut out = s.clone();
            for idx in sample(&mut rng, pairs, count) {
                let (i, j) = pair_from_index(idx, n);
                let v: f64 = StandardNormal.sample(&mut rng);
                out.set(i, j, v.clamp(-1.0, 1.0));
            }
            Ok(NoisyData::Similarity(out))
        }
        (kind, data) => Err(Error::KindMismatch {
            kind: kind.name(),
            data: data.kind_name(),
        }),
    }
}

/// Maps `0..n(n-1)/2` onto pairs `i < j` row by row.
fn pair_from_index(mut idx: usize, n: usize) -> (usize, usize) {
    for i in 0..n {
        let len = n - i - 1;
        if idx < len {
            return (i, i + 1 + idx);
        }
        idx -= len;
    }
    unreachable!("pair index out of range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> AttributeTable {
        AttributeTable::new(3, 2, vec![0.0, 5.0, 2.0, 5.0, 4.0, 5.0]).unwrap()
    }

    #[test]
    fn zero_level_is_identity_after_normalization() {
        let t = table();
        let out = inject_noise(&NoisyData::Attributes(t.clone()), NoiseKind::AttrCorrupt, 0.0, 1).unwrap();
        assert_eq!(out, NoisyData::Attributes(t.normalized()));
        let s = SimilarityMatrix::from_fn(4, |i, j| if i == j { 1.0 } else { 0.3 });
        let out = inject_noise(&NoisyData::Similarity(s.clone()), NoiseKind::SimCorrupt, 0.0, 1).unwrap();
        assert_eq!(out, NoisyData::Similarity(s));
    }

    #[test]
    fn kind_mismatch() {
        let err = inject_noise(&NoisyData::Attributes(table()), NoiseKind::SimCorrupt, 0.5, 0);
        assert!(matches!(err, Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn pair_indices_cover_upper_triangle() {
        let all: Vec<_> = (0..6).map(|k| pair_from_index(k, 4)).collect();
        assert_eq!(all, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn similarity_from_attributes() {
        let s = attributes_to_similarity(&table());
        assert_eq!(s.get(0, 2), -1.0);
        assert_eq!(s.get(0, 1), 0.5);
    }
}
