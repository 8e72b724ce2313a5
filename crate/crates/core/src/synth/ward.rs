use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::similarity::{DissimilarityMatrix, SimilarityMatrix};

/// Three groups on a line where minimum-variance linkage merges the wrong
/// pair first.
#[derive(Clone, Debug, PartialEq)]
pub struct WardInstance {
    /// Positions: `4m` points at 0, `m` at 5, `m` at 11.
    pub coords: Vec<f64>,
    /// Squared distances.
    pub dissimilarity: DissimilarityMatrix,
    /// {A ∪ B, C}.
    pub target: Labeling,
}

impl WardInstance {
    /// Negated distance, scaled into `[-1, 0]`.
    pub fn similarity(&self) -> SimilarityMatrix {
        let c = &self.coords;
        let max = c.iter().copied().fold(f64::MIN, f64::max) - c.iter().copied().fold(f64::MAX, f64::min);
        SimilarityMatrix::from_fn(c.len(), |i, j| {
            if max > 0.0 {
                -(c[i] - c[j]).abs() / max
            } else {
                0.0
            }
        })
    }
}

pub fn generate_ward_counterexample(m: usize) -> Result<WardInstance> {
    if m == 0 {
        return Err(Error::InvalidSpec("m must be at least 1".into()));
    }
    let coords: Vec<f64> = std::iter::repeat_n(0.0, 4 * m)
        .chain(std::iter::repeat_n(5.0, m))
        .chain(std::iter::repeat_n(11.0, m))
        .collect();
    let dissimilarity = DissimilarityMatrix::from_fn(coords.len(), |i, j| (coords[i] - coords[j]).powi(2));
    let target = Labeling::from_labels((0..6 * m).map(|p| if p < 5 * m { 1 } else { 2 }).collect())?;
    Ok(WardInstance {
        coords,
        dissimilarity,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let w = generate_ward_counterexample(5).unwrap();
        let d = &w.dissimilarity;
        assert_eq!(d.len(), 30);
        assert_eq!(d.get(0, 20), 25.0);
        assert_eq!(d.get(20, 25), 36.0);
        assert_eq!(d.get(0, 25), 121.0);
        assert_eq!(d.get(0, 19), 0.0);
    }
}
