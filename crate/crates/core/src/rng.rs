//! Seeded, thread-count-independent randomness helpers.
//!
//! Every Monte-Carlo routine splits its sample budget into fixed-size blocks;
//! each block gets an RNG seeded from (master seed, block index) and partial
//! results are reduced in block order, so outputs are identical regardless of
//! how many workers execute the blocks.

use num_complex::Complex64;
pub use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BLOCK_SIZE: usize = 4096;

/// SplitMix64 step, used to derive independent stream seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Circularly-symmetric complex Gaussian with E|z|² = variance.
/// |z|² is exponential and the phase uniform, which is exact Box-Muller.
pub fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let r = (-(1.0 - u1).ln() * variance).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

/// Run `n_samples` split into blocks, mapping each block with `f(rng, len)`
/// and reducing the per-block outputs in block order.
pub fn run_blocks<S, F>(n_samples: usize, seed: u64, f: F) -> Vec<S>
where
    S: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> S + Sync,
{
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let block = |i: usize| {
        let len = BLOCK_SIZE.min(n_samples - i * BLOCK_SIZE);
        let mut rng = rng_for(derive_seed(seed, i as u64));
        f(&mut rng, len)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_blocks).into_par_iter().map(block).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_blocks).map(block).collect()
    }
}

/// Streaming mean/variance accumulator combined from per-block sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentSums {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MomentSums {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        let n = self.n as f64;
        let var = (self.sum_sq / n - (self.sum / n).powi(2)).max(0.0);
        (var / n).sqrt()
    }
}
