//! Maximum-weight assignment on a rectangular table.

/// Assigns rows to distinct columns maximizing total weight. The smaller side
/// is fully matched; returns the total and, per row, its column if any.
pub fn max_weight_matching(weights: &[Vec<i64>]) -> (i64, Vec<Option<usize>>) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return (0, vec![None; rows]);
    }
    let size = rows.max(cols);
    let max = weights.iter().flatten().copied().max().unwrap_or(0).max(0);
    // Square cost matrix; padding cells cost as much as a zero-weight cell.
    let cost = |i: usize, j: usize| -> i64 {
        if i < rows && j < cols {
            max - weights[i][j]
        } else {
            max
        }
    };

    // Shortest augmenting paths with potentials, 1-based with a virtual column 0.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; size + 1];
    let mut v = vec![0i64; size + 1];
    let mut owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![None; rows];
    let mut total = 0;
    for j in 1..=size {
        let i = owner[j] - 1;
        if i < rows && j - 1 < cols {
            assignment[i] = Some(j - 1);
            total += weights[i][j - 1];
        }
    }
    (total, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_square() {
        let w = vec![vec![1, 5, 3], vec![4, 2, 1], vec![3, 3, 9]];
        let (total, a) = max_weight_matching(&w);
        assert_eq!(total, 18);
        assert_eq!(a, vec![Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn rectangular_both_ways() {
        let w = vec![vec![1, 7, 3]];
        assert_eq!(max_weight_matching(&w).0, 7);
        let w = vec![vec![2], vec![6], vec![1]];
        let (total, a) = max_weight_matching(&w);
        assert_eq!(total, 6);
        assert_eq!(a, vec![None, Some(0), None]);
    }

    #[test]
    fn empty() {
        assert_eq!(max_weight_matching(&[]).0, 0);
    }
}
