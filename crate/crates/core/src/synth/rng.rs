use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_LAYOUT: u64 = 1;
pub(crate) const TAG_EGO: u64 = 2;
pub(crate) const TAG_OBJECT: u64 = 3;
pub(crate) const TAG_LIDAR: u64 = 4;
pub(crate) const TAG_OCCLUSION: u64 = 5;
pub(crate) const TAG_MASK: u64 = 6;
pub(crate) const TAG_CORRUPT: u64 = 7;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one entity, identified by `key`, under `seed`.
/// Draws for one key never depend on how many draws other keys made.
pub(crate) fn keyed_rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let stream = key.iter().fold(0u64, |acc, &k| splitmix64(acc ^ k));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
