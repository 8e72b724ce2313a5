//! Library results checked against slow, obviously-correct recomputations.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhc::eval::{best_pruning_error, classification_error};
use rhc::linkage::matched_pairs_failure_check;
use rhc::properties::{check_strict_separation, greedy_strict_bad_set};
use rhc::rmnl::{lower_median, passes_median, singleton_speedup};
use rhc::synth::{self, AttributeTable, NoiseKind, NoisyData};
use rhc::{BlobPartition, Labeling, Linkage, SimilarityMatrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ranking_matches_sorting(seed: u64) {
        common::ranking_case(seed).unwrap();
    }

    #[test]
    fn threshold_counts_match_set_intersections(seed: u64) {
        common::neighbor_counts_case(seed).unwrap();
    }

    #[test]
    fn hungarian_matches_permutations(seed: u64) {
        common::hungarian_case(seed).unwrap();
    }

    #[test]
    fn pruning_search_matches_enumeration(seed: u64) {
        common::pruning_case(seed).unwrap();
    }

    #[test]
    fn single_linkage_heights_are_the_minimum_spanning_tree(seed: u64) {
        common::single_linkage_case(seed).unwrap();
    }
}

#[test]
fn lower_median_and_median_test() {
    assert_eq!(lower_median(&mut [4, 1, 3, 2]), 2);
    assert_eq!(lower_median(&mut [5, 1, 3]), 3);
    assert_eq!(lower_median(&mut [7]), 7);
    // blobs of sizes 5 and 7: the median must exceed 3
    assert!(!passes_median(3, 12));
    assert!(passes_median(4, 12));
    assert!(!passes_median(0, 1));
}

#[test]
fn speedup_uses_lower_median_and_smallest_member_on_ties() {
    let mut sim = SimilarityMatrix::from_fn(5, |i, j| if i == j { 1.0 } else { 0.0 });
    // blob {0,1}: values 0.9 and 0.1 (lower median 0.1); blob {2,3}: 0.3 and 0.3
    for (q, v) in [(0, 0.9), (1, 0.1), (2, 0.3), (3, 0.3)] {
        sim.set(4, q, v);
    }
    let mut blobs = BlobPartition::singletons(5);
    let (b2, b3) = (blobs.blob_of(2), blobs.blob_of(3));
    blobs.merge(&[b2, b3]);
    let (b0, b1) = (blobs.blob_of(0), blobs.blob_of(1));
    blobs.merge(&[b0, b1]);
    singleton_speedup(&mut blobs, &sim, 4, 2).unwrap();
    assert_eq!(blobs.blob_of(4), blobs.blob_of(2));

    for q in 0..4 {
        sim.set(4, q, 0.5);
    }
    let mut blobs = BlobPartition::singletons(5);
    let (b2, b3) = (blobs.blob_of(2), blobs.blob_of(3));
    blobs.merge(&[b2, b3]);
    let (b0, b1) = (blobs.blob_of(0), blobs.blob_of(1));
    blobs.merge(&[b0, b1]);
    singleton_speedup(&mut blobs, &sim, 4, 2).unwrap();
    assert_eq!(blobs.blob_of(4), blobs.blob_of(0));
}

#[test]
fn similarity_corruption_has_clipped_normal_variance() {
    let n = 200;
    let base = SimilarityMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 });
    let NoisyData::Similarity(out) = synth::inject_noise(&NoisyData::Similarity(base), NoiseKind::SimCorrupt, 1.0, 4).unwrap()
    else {
        panic!("kind changed")
    };
    let vals: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| out.get(i, j)).collect();
    let second = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
    // E[X^2] for X ~ N(0,1) clipped to [-1, 1]
    assert!((second - 0.516_06).abs() < 0.02, "{second}");
    assert!(vals.iter().all(|v| v.abs() <= 1.0));
    assert!((0..n).all(|i| out.get(i, i) == 1.0));
}

#[test]
fn attribute_noise_matches_its_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let table = AttributeTable::new(300, 4, (0..1200).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
    let norm = table.normalized();
    let data = NoisyData::Attributes(table);

    let NoisyData::Attributes(g) = synth::inject_noise(&data, NoiseKind::AttrGauss, 0.3, 1).unwrap() else { panic!() };
    let var = g.values.iter().zip(&norm.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 1200.0;
    assert!((var - 0.09).abs() < 0.01, "{var}");

    let NoisyData::Attributes(c) = synth::inject_noise(&data, NoiseKind::AttrCorrupt, 0.25, 1).unwrap() else { panic!() };
    let changed = c.values.iter().zip(&norm.values).filter(|(a, b)| a != b).count();
    assert_eq!(changed, 300);

    assert!(synth::inject_noise(&data, NoiseKind::SimCorrupt, 0.1, 1).is_err());
}

#[test]
fn matched_pairs_break_strict_separation_and_classical_linkage() {
    let mp = synth::generate_matched_pairs(64).unwrap();
    assert!(!check_strict_separation(&mp.sim, &mp.target, &[]).unwrap().holds);
    let bad = greedy_strict_bad_set(&mp.sim, &mp.target, 4).unwrap();
    assert!(!check_strict_separation(&mp.sim, &mp.target, &bad).unwrap().holds);
    for method in Linkage::ALL {
        let tree = rhc::linkage::linkage_from_similarity(&mp.sim, method);
        assert!(matched_pairs_failure_check(&tree, &mp.target), "{method}");
        let err = best_pruning_error(&tree, &mp.target, mp.target.k()).unwrap().error;
        assert!(err > 0.0, "{method}");
    }
}

#[test]
fn classification_error_is_label_permutation_invariant() {
    let target = Labeling::new(vec![1, 1, 2, 2, 3, 3], 3).unwrap();
    let pred = Labeling::new(vec![3, 3, 1, 1, 2, 2], 3).unwrap();
    assert_eq!(classification_error(&pred, &target).unwrap(), 0.0);
    let pred = Labeling::new(vec![1, 1, 1, 1, 2, 2], 2).unwrap();
    assert!((classification_error(&pred, &target).unwrap() - 1.0 / 3.0).abs() < 1e-12);
}
