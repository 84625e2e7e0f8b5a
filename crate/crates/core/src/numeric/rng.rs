//! Reproducible random streams.
//!
//! A run is keyed by one `u64` seed. Every (experiment, sample, vertex)
//! triple gets its own ChaCha20 stream under that key, so draws do not depend
//! on scheduling or on how many other streams were consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stream index used for the single tensor of the identical ensemble.
pub const SHARED_VERTEX: u64 = u64::MAX;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_id(experiment: u64, sample: u64, vertex: u64) -> u64 {
    splitmix(splitmix(splitmix(experiment) ^ sample) ^ vertex)
}

pub fn stream_rng(seed: u64, experiment: u64, sample: u64, vertex: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(experiment, sample, vertex));
    rng
}

/// Stable experiment tag derived from a name.
pub fn experiment_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}
