//! Seeded, splittable random streams.
//!
//! Every sampler draws from ChaCha12 substreams keyed by `(sampler tag, user
//! seed, batch index)`. Batches are fixed-size slices of the output, so the
//! values produced for a given seed do not depend on how many threads rayon
//! happens to use, and different samplers fed the same seed are independent
//! of each other.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Draws generated per substream before moving to the next batch index.
pub(crate) const SUBSTREAM_DRAWS: usize = 1 << 14;

/// splitmix64 finalizer; decorrelates nearby seeds and tags.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a user seed with a per-sampler domain tag.
pub(crate) fn tagged_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(splitmix64(tag)))
}

pub(crate) fn substream(tagged: u64, batch: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(tagged);
    rng.set_stream(batch);
    rng
}

/// Fills `count` draws of `dim` values each, row-major.
///
/// `fill_chunk` receives the substream RNG for one batch and a slice holding
/// a whole number of rows; it must fill the slice front to back.
pub(crate) fn sample_batched<F>(
    count: usize,
    dim: usize,
    seed: u64,
    tag: u64,
    fill_chunk: F,
) -> Vec<f64>
where
    F: Fn(&mut ChaCha12Rng, &mut [f64]) + Sync,
{
    let tagged = tagged_seed(seed, tag);
    let mut values = vec![0.0; count * dim];
    values
        .par_chunks_mut(SUBSTREAM_DRAWS * dim)
        .enumerate()
        .for_each(|(batch, chunk)| {
            let mut rng = substream(tagged, batch as u64);
            fill_chunk(&mut rng, chunk);
        });
    values
}

/// Domain tags, one per sampler family.
pub(crate) mod tags {
    pub const MVN: u64 = 1;
    pub const CAUCHY: u64 = 2;
    pub const MV_CAUCHY: u64 = 3;
    pub const RATIO_PM: u64 = 4;
    pub const ABS_RATIO: u64 = 5;
    pub const BM_PATH: u64 = 6;
    pub const BM_MIXTURE: u64 = 7;
    pub const BM_AT_TIME: u64 = 8;
}
