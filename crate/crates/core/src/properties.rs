//! Checkers for the similarity properties under which clustering succeeds.
//!
//! Every check takes the target clustering and a bad set `B`; rankings are
//! restricted to the remaining points `S' = S \ B` with the usual tie-break.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::params::NoiseParams;
use crate::ranking::nearest_within;
use crate::similarity::SimilarityMatrix;

/// Violations reported are truncated to this many.
pub const MAX_WITNESSES: usize = 10;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `point` is at least as similar to `other` (another cluster) as to
    /// `same` (its own cluster).
    Triple { point: usize, same: usize, other: usize },
    /// `point` has `outside` of its nearest neighbors outside its cluster
    /// (or outside its subset, for the local condition).
    Deficit { point: usize, outside: usize },
    /// The subset containing `min_member` has only `good` good points out of `size`.
    Subset { min_member: usize, good: usize, size: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub property: String,
    pub holds: bool,
    pub witness: Vec<Witness>,
    /// Smallest `alpha` for which the property holds with this bad set.
    pub minimal_alpha: Option<f64>,
    pub bad_set: Vec<usize>,
    /// Fraction of good points in each checked subset, ordered by smallest member.
    pub subset_good_fractions: Vec<f64>,
    /// Largest `beta` the checked subsets support.
    pub binding_beta: Option<f64>,
    pub note: Option<String>,
}

impl PropertyReport {
    fn new(property: &str, bad_set: &[usize], witness: Vec<Witness>) -> Self {
        PropertyReport {
            property: property.into(),
            holds: witness.is_empty(),
            witness,
            minimal_alpha: None,
            bad_set: bad_set.to_vec(),
            subset_good_fractions: Vec::new(),
            binding_beta: None,
            note: None,
        }
    }
}

fn check_bad_set(n: usize, bad_set: &[usize]) -> Result<Vec<bool>> {
    let mut bad = vec![false; n];
    for &b in bad_set {
        if b >= n {
            return Err(Error::InvalidSpec(format!("bad point {b} out of range for n={n}")));
        }
        bad[b] = true;
    }
    Ok(bad)
}

fn check_lengths(sim: &SimilarityMatrix, target: &Labeling) -> Result<()> {
    if sim.len() != target.len() {
        return Err(Error::Length {
            what: "target labeling",
            expected: sim.len(),
            got: target.len(),
        });
    }
    Ok(())
}

fn within_allowance(count: usize, alpha: f64, n: usize) -> bool {
    count as f64 <= alpha * n as f64 + EPS
}

/// For every point outside `B`, how many of its `|C(x) \ B|` nearest
/// neighbors in `S \ B` lie outside its cluster. `None` for bad points.
pub fn neighborhood_deficits(sim: &SimilarityMatrix, target: &Labeling, bad_set: &[usize]) -> Result<Vec<Option<usize>>> {
    check_lengths(sim, target)?;
    let n = sim.len();
    let bad = check_bad_set(n, bad_set)?;
    let pool: Vec<usize> = (0..n).filter(|&p| !bad[p]).collect();
    let mut good_size = vec![0usize; target.k() + 1];
    for &p in &pool {
        good_size[target.label(p)] += 1;
    }
    Ok((0..n)
        .map(|x| {
            if bad[x] {
                return None;
            }
            let c = target.label(x);
            let near = nearest_within(sim, x, &pool, good_size[c]);
            Some(near.iter().filter(|&&y| target.label(y) != c).count())
        })
        .collect())
}

/// Every point of `S'` is strictly more similar to all of its own cluster
/// than to anything outside it.
pub fn check_strict_separation(sim: &SimilarityMatrix, target: &Labeling, bad_set: &[usize]) -> Result<PropertyReport> {
    check_lengths(sim, target)?;
    let n = sim.len();
    let bad = check_bad_set(n, bad_set)?;
    let mut witness = Vec::new();
    for x in (0..n).filter(|&x| !bad[x]) {
        let row = sim.row(x);
        let c = target.label(x);
        let mut weakest: Option<usize> = None;
        let mut strongest: Option<usize> = None;
        for y in (0..n).filter(|&y| y != x && !bad[y]) {
            if target.label(y) == c {
                if weakest.is_none_or(|w| row[y] < row[w]) {
                    weakest = Some(y);
                }
            } else if strongest.is_none_or(|s| row[y] > row[s]) {
                strongest = Some(y);
            }
        }
        if let (Some(same), Some(other)) = (weakest, strongest) {
            if row[same] <= row[other] {
                witness.push(Witness::Triple { point: x, same, other });
                if witness.len() == MAX_WITNESSES {
                    break;
                }
            }
        }
    }
    Ok(PropertyReport::new("strict separation", bad_set, witness))
}

/// Every point of `S'` has at most `alpha * n` of its `|C(x) ∩ S'|` nearest
/// neighbors in `S'` outside its cluster.
pub fn check_good_neighborhood(
    sim: &SimilarityMatrix,
    target: &Labeling,
    alpha: f64,
    bad_set: &[usize],
) -> Result<PropertyReport> {
    let n = sim.len();
    let deficits = neighborhood_deficits(sim, target, bad_set)?;
    let mut violations: Vec<(usize, usize)> = deficits
        .iter()
        .enumerate()
        .filter_map(|(p, d)| d.filter(|&d| !within_allowance(d, alpha, n)).map(|d| (p, d)))
        .collect();
    violations.truncate(MAX_WITNESSES);
    let witness = violations
        .into_iter()
        .map(|(point, outside)| Witness::Deficit { point, outside })
        .collect();
    let worst = deficits.iter().flatten().copied().max().unwrap_or(0);
    let mut report = PropertyReport::new("good neighborhood", bad_set, witness);
    report.minimal_alpha = Some(if n == 0 { 0.0 } else { worst as f64 / n as f64 });
    Ok(report)
}

/// Checks the weak good neighborhood conditions for the supplied subset
/// family: `subsets[p]` is the subset `A_p` for each point outside `B`
/// (entries for bad points are ignored).
///
/// Only the given family is checked; the property asks for the existence
/// of some family, so a failure here is not a proof that none exists.
pub fn check_weak_good_neighborhood(
    sim: &SimilarityMatrix,
    target: &Labeling,
    params: NoiseParams,
    beta: f64,
    bad_set: &[usize],
    subsets: &[Vec<usize>],
) -> Result<PropertyReport> {
    check_lengths(sim, target)?;
    let n = sim.len();
    let bad = check_bad_set(n, bad_set)?;
    if subsets.len() != n {
        return Err(Error::Length {
            what: "subset family",
            expected: n,
            got: subsets.len(),
        });
    }
    let min_size = 6.0 * params.total() * n as f64;
    let mut family = BTreeSet::new();
    for p in (0..n).filter(|&p| !bad[p]) {
        let mut a = subsets[p].clone();
        a.sort_unstable();
        a.dedup();
        let invalid = |reason: String| Error::SubsetInvalid { point: p, reason };
        if a.binary_search(&p).is_err() {
            return Err(invalid("does not contain the point".into()));
        }
        if let Some(&q) = a.iter().find(|&&q| q >= n || bad[q] || target.label(q) != target.label(p)) {
            return Err(invalid(format!("member {q} is bad or outside the cluster")));
        }
        if a.len() as f64 <= min_size + EPS {
            return Err(invalid(format!(
                "size {} is not greater than 6(alpha+nu)n = {min_size}",
                a.len()
            )));
        }
        family.insert(a);
    }

    let pool: Vec<usize> = (0..n).filter(|&p| !bad[p]).collect();
    let deficits = neighborhood_deficits(sim, target, bad_set)?;
    let alpha = params.alpha;
    let mut witness = Vec::new();
    let mut fractions = Vec::with_capacity(family.len());
    for a in &family {
        for &q in a {
            let near = nearest_within(sim, q, &pool, a.len());
            let outside = near.iter().filter(|y| a.binary_search(y).is_err()).count();
            if !within_allowance(outside, alpha, n) && witness.len() < MAX_WITNESSES {
                witness.push(Witness::Deficit { point: q, outside });
            }
        }
        let good = a
            .iter()
            .filter(|&&q| deficits[q].is_some_and(|d| within_allowance(d, alpha, n)))
            .count();
        let fraction = good as f64 / a.len() as f64;
        fractions.push(fraction);
        if fraction + EPS < beta && witness.len() < MAX_WITNESSES {
            witness.push(Witness::Subset {
                min_member: a[0],
                good,
                size: a.len(),
            });
        }
    }
    let mut report = PropertyReport::new("weak good neighborhood", bad_set, witness);
    report.binding_beta = fractions.iter().copied().reduce(f64::min);
    report.subset_good_fractions = fractions;
    report.note = Some("checked for the supplied subset family only".into());
    Ok(report)
}

/// Shrinks violations by repeatedly moving the worst-deficit point into the
/// bad set until the good neighborhood condition holds at `alpha`, or
/// `max_size` points were removed. An upper bound on the smallest bad set,
/// not the smallest bad set itself.
pub fn greedy_bad_set(
    sim: &SimilarityMatrix,
    target: &Labeling,
    alpha: f64,
    max_size: usize,
) -> Result<Vec<usize>> {
    let n = sim.len();
    let mut bad = Vec::new();
    loop {
        let deficits = neighborhood_deficits(sim, target, &bad)?;
        let worst = deficits
            .iter()
            .enumerate()
            .filter_map(|(p, d)| d.map(|d| (d, p)))
            .filter(|&(d, _)| !within_allowance(d, alpha, n))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match worst {
            Some((_, p)) if bad.len() < max_size => bad.push(p),
            _ => break,
        }
    }
    bad.sort_unstable();
    Ok(bad)
}

/// Greedy bad set for strict separation: repeatedly removes the point
/// involved in the most violations (as the anchor or as the intruder).
pub fn greedy_strict_bad_set(sim: &SimilarityMatrix, target: &Labeling, max_size: usize) -> Result<Vec<usize>> {
    check_lengths(sim, target)?;
    let n = sim.len();
    let mut bad = vec![false; n];
    let mut removed = Vec::new();
    while removed.len() < max_size {
        let mut score = vec![0usize; n];
        for x in (0..n).filter(|&x| !bad[x]) {
            let row = sim.row(x);
            let c = target.label(x);
            let weakest = (0..n)
                .filter(|&y| y != x && !bad[y] && target.label(y) == c)
                .map(|y| row[y])
                .fold(f64::INFINITY, f64::min);
            for y in (0..n).filter(|&y| !bad[y] && target.label(y) != c && row[y] >= weakest) {
                score[x] += 1;
                score[y] += 1;
            }
        }
        let Some((p, _)) = score
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s > 0)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            break;
        };
        bad[p] = true;
        removed.push(p);
    }
    removed.sort_unstable();
    Ok(removed)
}

/// On a good-neighborhood instance, checks that every good point of `C_i`
/// has at most `(alpha + nu) n` of its `t` nearest neighbors (among all
/// points) outside `G_i = C_i \ B`, for every `t` up to `|C_i|`.
pub fn nearest_neighbors_stay_good(
    sim: &SimilarityMatrix,
    target: &Labeling,
    params: NoiseParams,
    bad_set: &[usize],
) -> Result<bool> {
    let n = sim.len();
    let bad = check_bad_set(n, bad_set)?;
    let deficits = neighborhood_deficits(sim, target, bad_set)?;
    let sizes = target.cluster_sizes();
    let rank = crate::ranking::NeighborRanking::new(sim);
    let allowance = params.total();
    for x in 0..n {
        if !deficits[x].is_some_and(|d| within_allowance(d, params.alpha, n)) {
            continue;
        }
        let c = target.label(x);
        let mut outside = 0;
        for &y in &rank.order(x)[..sizes[c - 1]] {
            let y = y as usize;
            if bad[y] || target.label(y) != c {
                outside += 1;
                if !within_allowance(outside, allowance, n) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One implication between properties, tested on a concrete instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Implication {
    pub name: String,
    pub premise: bool,
    pub conclusion: bool,
}

impl Implication {
    /// An implication fails only when its premise holds and its conclusion does not.
    pub fn passes(&self) -> bool {
        !self.premise || self.conclusion
    }
}

/// Tests each implication between the properties on one instance, using
/// the parameters measured on it.
pub fn implication_suite(sim: &SimilarityMatrix, target: &Labeling) -> Result<Vec<Implication>> {
    let n = sim.len();
    let mut out = Vec::new();
    let min_cluster = target.cluster_sizes().into_iter().filter(|&s| s > 0).min().unwrap_or(0);

    // alpha-good implies (alpha, 0)-good.
    let base = check_good_neighborhood(sim, target, 1.0, &[])?;
    let alpha = base.minimal_alpha.unwrap_or(0.0);
    let premise = check_good_neighborhood(sim, target, alpha, &[])?.holds;
    out.push(Implication {
        name: "alpha-good => (alpha,0)-good".into(),
        premise,
        conclusion: check_good_neighborhood(sim, target, alpha, &[])?.holds,
    });

    // nu-strict separation implies (0, nu)-good.
    let strict_bad = greedy_strict_bad_set(sim, target, n)?;
    out.push(Implication {
        name: "nu-strict separation => (0,nu)-good".into(),
        premise: check_strict_separation(sim, target, &strict_bad)?.holds,
        conclusion: check_good_neighborhood(sim, target, 0.0, &strict_bad)?.holds,
    });

    // alpha-good with clusters above 6 alpha n implies weak (alpha, beta) with A_p = C(p).
    let clusters = target.clusters();
    let by_cluster: Vec<Vec<usize>> = (0..n).map(|p| clusters[target.label(p) - 1].clone()).collect();
    let params = NoiseParams::new(alpha.min(0.999), 0.0)?;
    let premise = premise && min_cluster as f64 > 6.0 * alpha * n as f64 + EPS;
    out.push(Implication {
        name: "alpha-good, min cluster > 6 alpha n => weak (alpha,1)-good".into(),
        premise,
        conclusion: premise
            && check_weak_good_neighborhood(sim, target, params, 1.0, &[], &by_cluster)?.holds,
    });

    // (alpha, nu)-good with clusters above 7(alpha+nu)n implies weak (alpha, beta, nu) with A_p = G_i.
    let bad = strict_bad;
    let nu = bad.len() as f64 / n.max(1) as f64;
    let alpha_b = check_good_neighborhood(sim, target, 1.0, &bad)?.minimal_alpha.unwrap_or(0.0);
    let premise = alpha_b + nu < 1.0
        && check_good_neighborhood(sim, target, alpha_b, &bad)?.holds
        && min_cluster as f64 > 7.0 * (alpha_b + nu) * n as f64 + EPS;
    let conclusion = premise && {
        let is_bad = check_bad_set(n, &bad)?;
        let good_sets: Vec<Vec<usize>> = clusters
            .iter()
            .map(|c| c.iter().copied().filter(|&p| !is_bad[p]).collect())
            .collect();
        let family: Vec<Vec<usize>> = (0..n)
            .map(|p| if is_bad[p] { Vec::new() } else { good_sets[target.label(p) - 1].clone() })
            .collect();
        let params = NoiseParams::new(alpha_b, nu)?;
        check_weak_good_neighborhood(sim, target, params, 1.0, &bad, &family)?.holds
    };
    out.push(Implication {
        name: "(alpha,nu)-good, min cluster > 7(alpha+nu)n => weak (alpha,1,nu)-good".into(),
        premise,
        conclusion,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(sizes: &[usize], within: f64, across: f64) -> (SimilarityMatrix, Labeling) {
        let labels: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
            .collect();
        let l = labels.clone();
        let sim = SimilarityMatrix::from_fn(labels.len(), move |i, j| {
            if i == j {
                1.0
            } else if l[i] == l[j] {
                within
            } else {
                across
            }
        });
        (sim, Labeling::new(labels, sizes.len()).unwrap())
    }

    #[test]
    fn separated_blocks() {
        let (sim, target) = blocks(&[4, 5], 0.9, 0.1);
        assert!(check_strict_separation(&sim, &target, &[]).unwrap().holds);
        let r = check_good_neighborhood(&sim, &target, 0.0, &[]).unwrap();
        assert!(r.holds);
        assert_eq!(r.minimal_alpha, Some(0.0));
    }

    #[test]
    fn everything_bad_is_vacuous() {
        let (sim, target) = blocks(&[3, 3], 0.1, 0.9);
        let all: Vec<usize> = (0..6).collect();
        assert!(check_strict_separation(&sim, &target, &all).unwrap().holds);
        assert!(!check_strict_separation(&sim, &target, &[]).unwrap().holds);
    }

    #[test]
    fn subset_must_exceed_six_alpha_n() {
        let (sim, target) = blocks(&[6, 6], 0.9, 0.1);
        let params = NoiseParams::new(1.0 / 12.0, 0.0).unwrap();
        let family: Vec<Vec<usize>> = (0..12).map(|p| if p < 6 { (0..6).collect() } else { (6..12).collect() }).collect();
        let err = check_weak_good_neighborhood(&sim, &target, params, 1.0, &[], &family);
        assert!(matches!(err, Err(Error::SubsetInvalid { .. })));
    }

    #[test]
    fn greedy_removes_the_intruder() {
        let (mut sim, target) = blocks(&[5, 5], 0.9, 0.1);
        for j in 0..10 {
            if j != 0 {
                sim.set(0, j, if target.label(j) == 2 { 0.95 } else { 0.05 });
            }
        }
        let bad = greedy_bad_set(&sim, &target, 0.0, 10).unwrap();
        assert_eq!(bad, vec![0]);
    }
}
