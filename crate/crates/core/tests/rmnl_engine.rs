use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhc::rmnl::{reference_cluster, MergeOrder, Neighborhood, RmnlRun};
use rhc::{NoiseParams, RmnlConfig, SimilarityMatrix};

fn noisy_blocks(n: usize, k: usize, noise: f64, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label: Vec<usize> = (0..n).map(|i| i * k / n).collect();
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        vals[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let base = if label[i] == label[j] { 0.8 } else { 0.2 };
            let v: f64 = if rng.gen_bool(noise) {
                rng.gen_range(-1.0..1.0)
            } else {
                // coarse grid so ties are common
                base + (rng.gen_range(0..4) as f64) * 0.05
            };
            vals[i * n + j] = v;
            vals[j * n + i] = v;
        }
    }
    SimilarityMatrix::from_vec(n, vals).unwrap()
}

fn config(order: u8, hood: bool, speedup: bool) -> RmnlConfig {
    RmnlConfig {
        merge_order: if order == 0 { MergeOrder::BestFirst } else { MergeOrder::Component },
        neighborhood: if hood { Neighborhood::IncludeSelf } else { Neighborhood::ExcludeSelf },
        speedup,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn fast_engine_matches_reference(
        n in 6usize..30,
        k in 1usize..4,
        noise in 0.0f64..0.6,
        frac in 0usize..5,
        order in 0u8..2,
        hood: bool,
        speedup: bool,
        seed: u64,
    ) {
        let sim = noisy_blocks(n, k, noise, seed);
        let total = frac as f64 / 100.0;
        let params = NoiseParams::new(total / 2.0, total / 2.0).unwrap();
        let cfg = config(order, hood, speedup);
        let Ok(expected) = reference_cluster(&sim, params, cfg) else {
            prop_assert!(RmnlRun::new(&sim, params, cfg).is_err());
            return Ok(());
        };
        let got = RmnlRun::new(&sim, params, cfg).unwrap().run();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn incremental_counts_match_products(n in 4usize..40, seed: u64, hood: bool) {
        let sim = noisy_blocks(n, 2, 0.3, seed);
        let margins = NoiseParams::new(0.0, 0.0).unwrap().margins(n).unwrap();
        let cfg = RmnlConfig { speedup: false, neighborhood: if hood { Neighborhood::IncludeSelf } else { Neighborhood::ExcludeSelf }, ..RmnlConfig::default() };
        let mut run = RmnlRun::with_margins(&sim, margins, cfg);
        let rank = run.ranking().clone();
        loop {
            let before = run.blobs().clone();
            let more = run.step();
            let t = run.threshold();
            if t + 1 > n { break; }
            let state = rhc::rmnl::ThresholdState::compute(&rank, t, margins.f_margin, &before, cfg.neighborhood);
            prop_assert_eq!(run.common_counts(), state.common);
            prop_assert_eq!(run.point_graph(), &state.graph);
            if !more { break; }
        }
    }
}
