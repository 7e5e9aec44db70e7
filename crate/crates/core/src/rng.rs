//! Counter-style random streams: one independent ChaCha stream per shot.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for shot `shot` of a run seeded with `seed`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}
