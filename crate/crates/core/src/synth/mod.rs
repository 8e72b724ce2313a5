//! Seeded generators for synthetic instances and noise injection.
//!
//! All randomness comes from [`rng`], a ChaCha8 stream seeded from a `u64`,
//! so the same seed reproduces the same instance on every platform.

mod aistat;
mod figures;
mod noise;
mod planted;
mod ward;

pub use aistat::{generate_aistat, AIStat, AIStatSpec, AREA_NAMES};
pub use figures::{generate_fig1, generate_matched_pairs, MatchedPairs, REGION_NAMES};
pub use noise::{attributes_to_similarity, inject_noise, AttributeTable, NoiseKind, NoisyData};
pub use planted::{generate_planted_good_neighborhood, Planted, PlantedSpec};
pub use ward::{generate_ward_counterexample, WardInstance};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the pseudo-random generator behind every seeded routine.
pub const PRNG: &str = "ChaCha8Rng (rand_chacha 0.3), seeded with seed_from_u64";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
