use crate::error::{Error, Result};

/// A flat cluster assignment with labels in `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("a labeling needs k >= 1".into()));
        }
        if let Some((point, &label)) = labels.iter().enumerate().find(|(_, &l)| l == 0 || l > k) {
            return Err(Error::BadLabel { point, label, k });
        }
        Ok(Labeling { labels, k })
    }

    /// Labels taken as given, `k` set to the largest one.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(1).max(1);
        Labeling::new(labels, k)
    }

    /// One label per group, in group order; every point must be covered once.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![0; n];
        for (g, members) in groups.iter().enumerate() {
            for &p in members {
                if p >= n {
                    return Err(Error::Coverage(p));
                }
                if labels[p] != 0 {
                    return Err(Error::Overlap(p));
                }
                labels[p] = g + 1;
            }
        }
        if let Some(p) = labels.iter().position(|&l| l == 0) {
            return Err(Error::Coverage(p));
        }
        Labeling::new(labels, groups.len().max(1))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn label(&self, p: usize) -> usize {
        self.labels[p]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Members of each label, index `i` holding label `i + 1`.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (p, &l) in self.labels.iter().enumerate() {
            out[l - 1].push(p);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &l in &self.labels {
            out[l - 1] += 1;
        }
        out
    }

    /// Labeling restricted to `ids`, keeping the original label values.
    pub fn restrict(&self, ids: &[usize]) -> Labeling {
        Labeling {
            labels: ids.iter().map(|&p| self.labels[p]).collect(),
            k: self.k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_overflow_labels() {
        assert!(Labeling::new(vec![1, 0], 2).is_err());
        assert!(Labeling::new(vec![1, 3], 2).is_err());
        assert!(Labeling::new(vec![], 0).is_err());
    }

    #[test]
    fn groups_round_trip() {
        let l = Labeling::from_groups(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(l.labels(), &[1, 2, 2, 1]);
        assert_eq!(l.clusters(), vec![vec![0, 3], vec![1, 2]]);
        assert!(matches!(
            Labeling::from_groups(3, &[vec![0, 1]]),
            Err(Error::Coverage(2))
        ));
    }
}
