//! Deterministic sampling infrastructure.
//!
//! Every check derives its random stream from the run seed and a stable
//! label, and each sample index gets its own substream. Adding a check or
//! reordering samples therefore never perturbs other checks, and sweeps
//! produce identical results whether they run sequentially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// RNG for a named check under a run seed.
pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ fnv1a(label.as_bytes())))
}

/// RNG for one sample of a named check.
pub fn rng_for_sample(seed: u64, label: &str, index: usize) -> ChaCha8Rng {
    let base = splitmix(seed ^ fnv1a(label.as_bytes()));
    ChaCha8Rng::seed_from_u64(splitmix(base ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15)))
}

/// Evaluate `f` on every sample index, in parallel when the `parallel`
/// feature is enabled. Results are merged by index, so the output is
/// identical to the sequential path.
pub fn map_samples<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Always-sequential twin of [`map_samples`]; the benchmark suite compares
/// the two.
pub fn map_samples_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
