//! Randomized oracle cases shared by the property tests and the acceptance
//! run. Each case derives its instance from `seed` and reports the first
//! mismatch.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhc::dendrogram::{Level, Merge};
use rhc::eval::{best_pruning_error, max_weight_matching};
use rhc::linkage::linkage_cluster;
use rhc::rmnl::{Neighborhood, ThresholdState};
use rhc::{BlobPartition, Dendrogram, DissimilarityMatrix, Labeling, Linkage, NeighborRanking, SimilarityMatrix};

pub type CaseResult = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Similarities on a coarse grid, so ties are common.
pub fn grid_sim(n: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SimilarityMatrix::from_fn(n, |_, _| 0.0);
    for i in 0..n {
        s.set(i, i, 1.0);
        for j in i + 1..n {
            s.set(i, j, rng.gen_range(0..5) as f64 / 5.0);
        }
    }
    s
}

/// A random tree with binary and ternary merges.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Dendrogram {
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::new();
    while active.len() > 1 {
        let arity = if active.len() >= 3 && rng.gen_bool(0.3) { 3 } else { 2 };
        let mut children = Vec::new();
        for _ in 0..arity {
            children.push(active.swap_remove(rng.gen_range(0..active.len())));
        }
        active.push(n + merges.len());
        merges.push(Merge { children, level: Level::Threshold(merges.len() + 1) });
    }
    Dendrogram::new(n, merges).unwrap()
}

/// Best matching by trying every row-to-column assignment.
pub fn brute_matching(w: &[Vec<i64>]) -> i64 {
    fn go(w: &[Vec<i64>], row: usize, used: &mut Vec<bool>) -> i64 {
        if row == w.len() {
            return 0;
        }
        let mut best = go(w, row + 1, used);
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(w[row][c] + go(w, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let cols = w.first().map_or(0, Vec::len);
    go(w, 0, &mut vec![false; cols])
}

/// Every antichain of `tree` below `v` that covers all of `v`'s leaves.
pub fn all_prunings(tree: &Dendrogram, v: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![v]];
    if tree.is_leaf(v) {
        return out;
    }
    let mut acc = vec![Vec::new()];
    for &c in tree.children(v) {
        let sub = all_prunings(tree, c);
        acc = acc
            .iter()
            .flat_map(|a: &Vec<usize>| sub.iter().map(move |s| a.iter().chain(s).copied().collect()))
            .collect();
    }
    out.extend(acc);
    out
}

pub fn pruning_error_by_hand(tree: &Dendrogram, nodes: &[usize], target: &Labeling) -> f64 {
    let w: Vec<Vec<i64>> = nodes
        .iter()
        .map(|&v| {
            (1..=target.k())
                .map(|c| tree.points(v).iter().filter(|&&p| target.label(p) == c).count() as i64)
                .collect()
        })
        .collect();
    1.0 - brute_matching(&w) as f64 / target.len() as f64
}

pub fn ranking_case(seed: u64) -> CaseResult {
    let n = 1 + (seed % 19) as usize;
    let sim = grid_sim(n, seed);
    let rank = NeighborRanking::new(&sim);
    for p in 0..n {
        let mut rest: Vec<usize> = (0..n).filter(|&q| q != p).collect();
        rest.sort_by(|&a, &b| sim.get(p, b).partial_cmp(&sim.get(p, a)).unwrap().then(a.cmp(&b)));
        let mut want = vec![p];
        want.extend(rest);
        let got: Vec<usize> = rank.order(p).iter().map(|&q| q as usize).collect();
        ensure!(got == want, "order of {p}: {got:?} != {want:?}");
    }
    Ok(())
}

/// Neighbor indicator, common counts, point graph, graph counts and the
/// median statistic against explicit set intersections.
pub fn neighbor_counts_case(seed: u64) -> CaseResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..14);
    let t = rng.gen_range(1..n);
    let f_margin = rng.gen_range(0..4);
    let exclude = rng.gen_bool(0.5);
    let sim = grid_sim(n, seed);
    let rank = NeighborRanking::new(&sim);
    let mut blobs = BlobPartition::singletons(n);
    for _ in 0..n / 3 {
        let ids = blobs.ids();
        let a = ids[rng.gen_range(0..ids.len())];
        let b = ids[rng.gen_range(0..ids.len())];
        if a != b {
            blobs.merge(&[a, b]);
        }
    }
    let hood = if exclude { Neighborhood::ExcludeSelf } else { Neighborhood::IncludeSelf };
    let st = ThresholdState::compute(&rank, t, f_margin, &blobs, hood);

    let skip = usize::from(exclude);
    let near: Vec<BTreeSet<usize>> = (0..n)
        .map(|x| rank.order(x).iter().skip(skip).take(t).map(|&q| q as usize).collect())
        .collect();
    let common = |x: usize, y: usize| near[x].intersection(&near[y]).count();
    let f = |x: usize, y: usize| common(x, y) + f_margin >= t;
    let same = |x: usize, y: usize| blobs.blob_of(x) == blobs.blob_of(y);
    for x in 0..n {
        for y in 0..n {
            ensure!(st.indicator.get(x, y) == near[x].contains(&y), "I[{x}][{y}]");
            ensure!(st.common.get(x, y) as usize == common(x, y), "N[{x}][{y}]");
            ensure!(st.graph.get(x, y) == f(x, y), "F[{x}][{y}]");
            let ns = (0..n).filter(|&z| f(x, z) && f(y, z)).count();
            ensure!(st.graph_common.get(x, y) as usize == ns, "NS[{x}][{y}]");
            let s = (0..n).filter(|&z| f(x, z) && f(y, z) && same(y, z)).count()
                + (0..n).filter(|&z| f(x, z) && same(x, z) && f(y, z)).count();
            ensure!(st.median_stat.get(x, y) as usize == s, "S[{x}][{y}]");
        }
    }
    Ok(())
}

pub fn hungarian_case(seed: u64) -> CaseResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (rng.gen_range(1..7), rng.gen_range(1..7));
    let w: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..20)).collect()).collect();
    let (total, assign) = max_weight_matching(&w);
    let brute = brute_matching(&w);
    ensure!(total == brute, "{total} != {brute} on {w:?}");
    let used: Vec<usize> = assign.iter().flatten().copied().collect();
    ensure!(used.len() == rows.min(cols), "smaller side not fully matched");
    ensure!(used.iter().collect::<BTreeSet<_>>().len() == used.len(), "column used twice");
    let sum: i64 = assign.iter().enumerate().filter_map(|(r, c)| c.map(|c| w[r][c])).sum();
    ensure!(sum == total, "assignment sums to {sum}, reported {total}");
    Ok(())
}

pub fn pruning_case(seed: u64) -> CaseResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..11);
    let k = rng.gen_range(1..5usize).min(n);
    let labels = rng.gen_range(1..4);
    let tree = random_tree(n, &mut rng);
    let target = Labeling::new((0..n).map(|_| rng.gen_range(1..=labels)).collect(), labels).unwrap();
    let prunings = all_prunings(&tree, tree.root());
    let best_of = |keep: &dyn Fn(usize) -> bool| {
        prunings
            .iter()
            .filter(|p| keep(p.len()))
            .map(|p| pruning_error_by_hand(&tree, p, &target))
            .fold(f64::INFINITY, f64::min)
    };
    let got = best_pruning_error(&tree, &target, k).map_err(|e| e.to_string())?;
    ensure!((got.nodes.len() == k) == got.exact_size, "exact_size flag");
    ensure!(
        (pruning_error_by_hand(&tree, &got.nodes, &target) - got.error).abs() < 1e-12,
        "reported nodes do not achieve the reported error"
    );
    let exact = best_of(&|len| len == k);
    if exact.is_finite() {
        ensure!(got.exact_size && (got.error - exact).abs() < 1e-12, "{} != {exact}", got.error);
    } else {
        let smaller = best_of(&|len| len < k);
        ensure!(!got.exact_size && (got.error - smaller).abs() < 1e-12, "{} != {smaller}", got.error);
    }
    Ok(())
}

/// Single-linkage merge heights equal the Kruskal spanning tree weights.
pub fn single_linkage_case(seed: u64) -> CaseResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..33);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let d = DissimilarityMatrix::from_fn(n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
    let mut edges: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (d.get(i, j), i, j)).collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut comp: Vec<usize> = (0..n).collect();
    let mut mst = Vec::new();
    for (w, i, j) in edges {
        let (ci, cj) = (comp[i], comp[j]);
        if ci != cj {
            mst.push(w);
            comp.iter_mut().filter(|c| **c == cj).for_each(|c| *c = ci);
        }
    }
    let tree = linkage_cluster(&d, Linkage::Single);
    let heights: Vec<f64> = tree
        .merges()
        .iter()
        .map(|m| match m.level {
            Level::Height(h) => h,
            Level::Threshold(_) => f64::NAN,
        })
        .collect();
    ensure!(heights == mst, "{heights:?} != {mst:?}");
    Ok(())
}
