//! Reproducible uniform sampling over boxes.
//!
//! Samples are split into fixed-size blocks; block `b` draws from a ChaCha8
//! stream keyed by `(seed, b)`. The hit count therefore depends only on the
//! seed and the sample count, never on how blocks are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const BLOCK: usize = 4096;

/// Generator for block `block` of the stream identified by `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Counts how many of `samples` uniform points in the box `[0, upper_k]`
/// satisfy `hit`.
pub fn count_hits<F>(upper: &[f64], samples: usize, seed: u64, hit: F) -> usize
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(samples - b * BLOCK);
            let mut rng = block_rng(seed, b as u64);
            let mut x = vec![0.0; upper.len()];
            let mut hits = 0usize;
            for _ in 0..len {
                for (xk, uk) in x.iter_mut().zip(upper) {
                    *xk = rng.gen::<f64>() * uk;
                }
                if hit(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_of_thread_count() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1] <= 1.0;
        let a = count_hits(&[1.0, 1.0], 50_000, 7, f);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| count_hits(&[1.0, 1.0], 50_000, 7, f));
        assert_eq!(a, b);
        let c = count_hits(&[1.0, 1.0], 50_000, 8, f);
        assert_ne!(a, c);
    }

    #[test]
    fn quarter_disk_fraction() {
        let n = 200_000;
        let hits = count_hits(&[1.0, 1.0], n, 1, |x| x[0] * x[0] + x[1] * x[1] <= 1.0);
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - std::f64::consts::FRAC_PI_4).abs() < 4.0 * se);
    }
}
