//! Reproducible random streams.
//!
//! Every sample index gets its own ChaCha8 stream derived from the run seed:
//! stream `i` of seed `s` is `ChaCha8Rng::seed_from_u64(s)` switched to stream
//! number `i`. Draws for sample `i` therefore never depend on how many samples
//! were drawn before it or on which thread drew them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Maps `f` over `0..n` with one substream per index, in index order.
pub fn map_indexed<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SampleRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| f(i, &mut substream(seed, i as u64)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(|i| f(i, &mut substream(seed, i as u64))).collect()
    }
}
