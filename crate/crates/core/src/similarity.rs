use crate::error::{Error, Result};

/// Symmetric `n x n` similarity scores in `[-1, 1]`.
///
/// This is the only view of the data the clustering algorithms get.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Builds a matrix from row-major values, validating symmetry and range.
    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                got: values.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        range: "[-1, 1]",
                    });
                }
            }
            for j in (i + 1)..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::Asymmetry(i, j));
                }
            }
        }
        Ok(SimilarityMatrix { n, values })
    }

    /// Builds a matrix by evaluating `f` on every unordered pair `i <= j`.
    ///
    /// Values are clamped into `[-1, 1]`; `f` is never asked for `(j, i)`,
    /// so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j).clamp(-1.0, 1.0);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        SimilarityMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`, clamping into `[-1, 1]`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let v = v.clamp(-1.0, 1.0);
        self.values[i * self.n + j] = v;
        self.values[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Restriction to the given points, in the given order.
    pub fn submatrix(&self, ids: &[usize]) -> SimilarityMatrix {
        SimilarityMatrix::from_fn(ids.len(), |a, b| self.get(ids[a], ids[b]))
    }

    /// Dissimilarities `1 - sim`, the adapter used to feed similarity data to
    /// the classical linkage methods.
    pub fn to_dissimilarity(&self) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(self.n, |i, j| if i == j { 0.0 } else { 1.0 - self.get(i, j) })
    }
}

/// Symmetric nonnegative dissimilarities with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                got: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::OutOfRange {
                    row: i,
                    col: i,
                    value: values[i * n + i],
                    range: "{0} on the diagonal",
                });
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::OutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        range: "[0, inf)",
                    });
                }
            }
            for j in (i + 1)..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::Asymmetry(i, j));
                }
            }
        }
        Ok(DissimilarityMatrix { n, values })
    }

    /// Evaluates `f` on unordered pairs `i < j`; the diagonal is zero.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j).max(0.0);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DissimilarityMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Order-reversing map into similarities: `1 - 2 d / max(d)`.
    pub fn to_similarity(&self) -> SimilarityMatrix {
        let max = self.values.iter().cloned().fold(0.0_f64, f64::max);
        let scale = if max > 0.0 { 2.0 / max } else { 0.0 };
        SimilarityMatrix::from_fn(self.n, |i, j| 1.0 - scale * self.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_input() {
        let err = SimilarityMatrix::from_vec(2, vec![1.0, 0.5, 0.4, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Asymmetry(0, 1)));
    }

    #[test]
    fn rejects_out_of_range() {
        let err = SimilarityMatrix::from_vec(2, vec![1.0, 1.5, 1.5, 1.0]).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { row: 0, col: 1, .. }));
    }

    #[test]
    fn dissimilarity_round_trip_preserves_order() {
        let d = DissimilarityMatrix::from_fn(3, |i, j| (i + j) as f64);
        let s = d.to_similarity();
        assert!(s.get(0, 1) > s.get(0, 2));
        assert!(s.get(0, 2) > s.get(1, 2));
        assert_eq!(s.get(1, 2), -1.0);
    }
}
