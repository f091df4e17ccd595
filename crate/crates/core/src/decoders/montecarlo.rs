//! Monte-Carlo estimates of the four decoder error probabilities.
//!
//! Trials are grouped in fixed-size batches and batch `b` draws from the
//! ChaCha8 stream `b` of the seed, so the result depends only on the seed
//! and the trial count, never on how rayon schedules the batches. Error
//! counts are integers and merge exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bit_map, block_map, posterior_f64, randomized_bit_map, randomized_block_map, Codebook};
use crate::channels::BmsChannel;
use crate::error::{param, Result};
use crate::rmcode::{EnumerationCap, RmCode};

/// Trials per RNG stream.
pub const BATCH_SIZE: u64 = 1024;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
}

/// A proportion estimated from `trials` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    /// Half-width of the 95% normal confidence interval.
    pub half_width: f64,
}

impl Estimate {
    fn from_counts(sum: u64, sum_sq: u128, trials: u64, scale: u64) -> Self {
        // per-trial observations are count / scale
        let t = trials as f64;
        let s = scale as f64;
        let mean = sum as f64 / (t * s);
        let second = sum_sq as f64 / (t * s * s);
        let var = if trials > 1 {
            ((second - mean * mean) * t / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (var / t).sqrt();
        Self {
            mean,
            std_error,
            half_width: Z95 * std_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McErrorReport {
    pub trials: u64,
    pub seed: u64,
    pub p_bit: Estimate,
    pub p_block: Estimate,
    pub p_bit_rand: Estimate,
    pub p_block_rand: Estimate,
}

#[derive(Clone, Copy, Default)]
struct Counts {
    block: u64,
    block_rand: u64,
    bit: u64,
    bit_sq: u128,
    bit_rand: u64,
    bit_rand_sq: u128,
}

impl Counts {
    fn merge(self, o: Self) -> Self {
        Self {
            block: self.block + o.block,
            block_rand: self.block_rand + o.block_rand,
            bit: self.bit + o.bit,
            bit_sq: self.bit_sq + o.bit_sq,
            bit_rand: self.bit_rand + o.bit_rand,
            bit_rand_sq: self.bit_rand_sq + o.bit_rand_sq,
        }
    }
}

/// Simulates uniformly drawn codewords through `ch` and decodes each output
/// with all four decoders. Runs on the current rayon pool.
pub fn mc_error_report(code: &RmCode, ch: &BmsChannel, opts: McOptions, cap: EnumerationCap) -> Result<McErrorReport> {
    if opts.trials == 0 {
        return param("at least one trial is required");
    }
    let book = Codebook::new(code, cap)?;
    let batches = opts.trials.div_ceil(BATCH_SIZE);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b * BATCH_SIZE;
            let len = BATCH_SIZE.min(opts.trials - start);
            run_batch(&book, ch, opts.seed, b, len)
        })
        .collect::<Result<Vec<Counts>>>()?
        .into_iter()
        .fold(Counts::default(), Counts::merge);

    let n = book.length() as u64;
    let t = opts.trials;
    let binary = |c: u64| Estimate::from_counts(c, u128::from(c), t, 1);
    Ok(McErrorReport {
        trials: t,
        seed: opts.seed,
        p_bit: Estimate::from_counts(counts.bit, counts.bit_sq, t, n),
        p_block: binary(counts.block),
        p_bit_rand: Estimate::from_counts(counts.bit_rand, counts.bit_rand_sq, t, n),
        p_block_rand: binary(counts.block_rand),
    })
}

fn run_batch(book: &Codebook, ch: &BmsChannel, seed: u64, batch: u64, len: u64) -> Result<Counts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let mut c = Counts::default();
    let mut y = vec![0usize; book.length()];
    for _ in 0..len {
        let m = rng.random_range(0..book.size());
        let x = book.word(m);
        for (i, s) in y.iter_mut().enumerate() {
            *s = ch.sample(u8::from(x.get(i)), &mut rng).symbol;
        }
        let post = posterior_f64(book, ch, &y)?;
        c.block += u64::from(block_map(&post) != m);
        c.block_rand += u64::from(randomized_block_map(&post, &mut rng) != m);
        let (mut bit, mut bit_rand) = (0u64, 0u64);
        for i in 0..book.length() {
            let truth = u8::from(x.get(i));
            bit += u64::from(bit_map(&post, i) != truth);
            bit_rand += u64::from(randomized_bit_map(&post, i, &mut rng) != truth);
        }
        c.bit += bit;
        c.bit_sq += u128::from(bit * bit);
        c.bit_rand += bit_rand;
        c.bit_rand_sq += u128::from(bit_rand * bit_rand);
    }
    Ok(c)
}
