//! Seeded, counter-based randomness.
//!
//! Every Monte-Carlo sample `i` draws from its own ChaCha20 stream `i`, so the
//! values a sample sees never depend on how samples are split across threads.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const ALGORITHM: &str = "chacha20";

/// Samples per work unit of [`RandomSource::mean`]. Fixed so the summation
/// tree is the same for every thread count.
const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub algorithm: String,
}

impl Default for RandomSource {
    fn default() -> Self {
        RandomSource::new(DEFAULT_SEED)
    }
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, algorithm: ALGORITHM.to_string() }
    }

    /// Independent generator for sample `index`.
    pub fn stream(&self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A source whose streams are disjoint from this one's, for nesting.
    pub fn derive(&self, tag: u64) -> RandomSource {
        let mut rng = self.stream(u64::MAX - tag);
        RandomSource::new(rng.random())
    }

    /// Entrywise mean of `f(stream(i))` over `samples` draws, each producing a
    /// vector of length `len`.
    ///
    /// The result is bitwise-identical for every rayon pool size.
    pub fn mean<F>(&self, samples: usize, len: usize, f: F) -> Vec<C64>
    where
        F: Fn(&mut ChaCha20Rng, &mut [C64]) + Sync,
    {
        let chunks = samples.div_ceil(CHUNK);
        let partial: Vec<Vec<C64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![C64::new(0.0, 0.0); len];
                let mut buf = vec![C64::new(0.0, 0.0); len];
                for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                    let mut rng = self.stream(i as u64);
                    buf.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
                    f(&mut rng, &mut buf);
                    for (a, b) in acc.iter_mut().zip(&buf) {
                        *a += b;
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![C64::new(0.0, 0.0); len];
        for p in partial {
            for (a, b) in total.iter_mut().zip(p) {
                *a += b;
            }
        }
        let n = samples.max(1) as f64;
        total.iter_mut().for_each(|x| *x /= n);
        total
    }
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform phase angle in `[0, 2π)`.
pub fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let src = RandomSource::new(7);
        let a: u64 = src.stream(3).random();
        let b: u64 = src.stream(3).random();
        let c: u64 = src.stream(4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn mean_is_independent_of_pool_size() {
        let src = RandomSource::new(11);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    src.mean(5000, 3, |rng, out| {
                        out[0] = complex_normal(rng);
                        out[1] = C64::new(uniform_phase(rng), 0.0);
                        out[2] = out[0] * out[1];
                    })
                })
        };
        assert_eq!(run(1), run(4));
    }
}
