//! Seeded random streams.
//!
//! Every stochastic routine takes a 64-bit seed and builds its own
//! [`SimRng`]. Replicas obtain independent seeds through [`derive_seed`], so a
//! run is reproducible from `(master seed, purpose, replica index)` alone,
//! independently of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate. ChaCha output depends only on
/// the seed, so streams are identical on every platform.
pub type SimRng = ChaCha8Rng;

/// Builds a generator from a 64-bit seed.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Builds a generator on a separate ChaCha stream of the same key.
pub fn seeded_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for replica `index` of a computation tagged `purpose`.
///
/// Distinct `(purpose, index)` pairs give unrelated seeds; the mapping is a
/// pure function so results never depend on which worker ran the replica.
pub fn derive_seed(master: u64, purpose: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(purpose.wrapping_mul(GOLDEN)));
    splitmix64(a ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}
