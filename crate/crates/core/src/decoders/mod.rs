//! Posterior distributions over codewords and the four MAP decoders:
//! bit-MAP, block-MAP and their randomized counterparts that sample from
//! the posterior instead of taking its argmax.
//!
//! Ties are broken deterministically: block-MAP returns the lowest message
//! index among the maximisers and bit-MAP returns 0 on a marginal of exactly
//! one half.

mod exact;
mod montecarlo;

pub use exact::{
    distance_split_report, exact_analysis, exact_error_report, DistanceSplitReport, Engine,
    ExactAnalysis, ExactErrorReport, InequalityCheck,
};
pub use montecarlo::{mc_error_report, Estimate, McErrorReport, McOptions};

use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::boolfn::BooleanFunction;
use crate::channels::BmsChannel;
use crate::error::{param, Error, Result};
use crate::rational::{from_biguint, to_f64};
use crate::rmcode::{EnumerationCap, RmCode};

/// Probability values a posterior can be computed in: exact rationals or `f64`.
pub trait Probability:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Sum
    + Send
    + Sync
{
    fn half() -> Self;
    fn as_f64(&self) -> f64;
}

impl Probability for f64 {
    fn half() -> Self {
        0.5
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Probability for BigRational {
    fn half() -> Self {
        BigRational::new(1.into(), 2.into())
    }
    fn as_f64(&self) -> f64 {
        to_f64(self)
    }
}

/// All codewords of a code in canonical message order.
#[derive(Clone, Debug)]
pub struct Codebook {
    length: usize,
    words: Vec<BooleanFunction>,
}

impl Codebook {
    pub fn new(code: &RmCode, cap: EnumerationCap) -> Result<Self> {
        Ok(Self {
            length: code.length(),
            words: code.codewords(cap)?,
        })
    }

    pub fn from_words(words: Vec<BooleanFunction>) -> Result<Self> {
        let length = words
            .first()
            .map(|w| w.len())
            .ok_or_else(|| Error::Parameter("empty codebook".into()))?;
        if words.iter().any(|w| w.len() != length) {
            return param("codewords differ in length");
        }
        Ok(Self { length, words })
    }

    /// Block length `N`.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, index: usize) -> &BooleanFunction {
        &self.words[index]
    }

    pub fn words(&self) -> &[BooleanFunction] {
        &self.words
    }

    fn check_output(&self, ch: &BmsChannel, y: &[usize]) -> Result<()> {
        if y.len() != self.length {
            return param(format!("output has {} symbols, block length is {}", y.len(), self.length));
        }
        if let Some(&s) = y.iter().find(|&&s| s >= ch.alphabet_size()) {
            return param(format!("output symbol {s} outside the channel alphabet"));
        }
        Ok(())
    }
}

/// `p(x|y)` for every codeword `x` (uniform prior) and the per-position
/// marginals `p(x_i = 1 | y)`.
#[derive(Clone, Debug)]
pub struct PosteriorTable<'a, P> {
    codebook: &'a Codebook,
    probs: Vec<P>,
    marginals: Vec<P>,
}

impl<'a, P: Probability> PosteriorTable<'a, P> {
    /// Normalises non-negative likelihood weights into a posterior.
    pub fn from_weights(codebook: &'a Codebook, weights: Vec<P>) -> Result<Self> {
        if weights.len() != codebook.size() {
            return param("one weight per codeword is required");
        }
        let total: P = weights.iter().cloned().sum();
        if !(total > P::zero()) {
            return Err(Error::Inconsistent("the output has zero probability under every codeword".into()));
        }
        let probs: Vec<P> = weights
            .into_iter()
            .map(|w| w / total.clone())
            .collect();
        let marginals = (0..codebook.length)
            .map(|i| {
                probs
                    .iter()
                    .zip(&codebook.words)
                    .filter(|(_, w)| w.get(i))
                    .map(|(p, _)| p.clone())
                    .sum()
            })
            .collect();
        Ok(Self {
            codebook,
            probs,
            marginals,
        })
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> &P {
        &self.probs[index]
    }

    /// `p(x_i = 1 | y)`.
    pub fn marginal(&self, position: usize) -> &P {
        &self.marginals[position]
    }

    pub fn codebook(&self) -> &'a Codebook {
        self.codebook
    }
}

/// Exact posterior for the channel output `y` (one symbol per position).
pub fn posterior<'a>(codebook: &'a Codebook, ch: &BmsChannel, y: &[usize]) -> Result<PosteriorTable<'a, BigRational>> {
    codebook.check_output(ch, y)?;
    let il = ch.integer_likelihoods();
    let weights = codebook
        .words
        .iter()
        .map(|x| {
            let mut l = BigUint::one();
            for (i, &s) in y.iter().enumerate() {
                l *= &il.numerators[s][x.get(i) as usize];
            }
            from_biguint(&l)
        })
        .collect();
    PosteriorTable::from_weights(codebook, weights)
}

/// Floating-point posterior computed from log-likelihoods.
///
/// Each codeword's log-likelihood is summed from its histogram of
/// `(symbol, bit)` pairs in a fixed order, so codewords with equal
/// likelihoods get bitwise-equal values and ties stay ties.
pub fn posterior_f64<'a>(codebook: &'a Codebook, ch: &BmsChannel, y: &[usize]) -> Result<PosteriorTable<'a, f64>> {
    codebook.check_output(ch, y)?;
    let m = ch.alphabet_size();
    let mut hist = vec![0u32; 2 * m];
    let logs: Vec<f64> = codebook
        .words
        .iter()
        .map(|x| {
            hist.iter_mut().for_each(|h| *h = 0);
            for (i, &s) in y.iter().enumerate() {
                hist[2 * s + x.get(i) as usize] += 1;
            }
            let mut acc = 0.0;
            for (j, &c) in hist.iter().enumerate() {
                if c > 0 {
                    acc += f64::from(c) * ch.log_likelihood(j / 2, (j % 2) as u8);
                }
            }
            acc
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::Inconsistent("the output has zero probability under every codeword".into()));
    }
    let weights = logs.iter().map(|&l| (l - top).exp()).collect();
    PosteriorTable::from_weights(codebook, weights)
}

/// Most likely codeword; the lowest message index wins ties.
pub fn block_map<P: Probability>(post: &PosteriorTable<'_, P>) -> usize {
    let mut best = 0;
    for (i, p) in post.probs.iter().enumerate().skip(1) {
        if *p > post.probs[best] {
            best = i;
        }
    }
    best
}

/// Most likely value of bit `position`; 0 on an exact tie.
pub fn bit_map<P: Probability>(post: &PosteriorTable<'_, P>, position: usize) -> u8 {
    u8::from(post.marginals[position] > P::half())
}

/// Samples a codeword index from the posterior.
pub fn randomized_block_map<P: Probability, R: Rng + ?Sized>(post: &PosteriorTable<'_, P>, rng: &mut R) -> usize {
    sample_index(post.probs.iter().map(|p| p.as_f64()), rng)
}

/// Samples bit `position` by drawing a whole codeword from the joint
/// posterior and keeping only that position.
pub fn randomized_bit_map<P: Probability, R: Rng + ?Sized>(
    post: &PosteriorTable<'_, P>,
    position: usize,
    rng: &mut R,
) -> u8 {
    let x = randomized_block_map(post, rng);
    u8::from(post.codebook.words[x].get(position))
}

fn sample_index<R: Rng + ?Sized>(probs: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn book(n: u32, v: u32) -> Codebook {
        Codebook::new(&RmCode::new(n, v).unwrap(), EnumerationCap::default()).unwrap()
    }

    #[test]
    fn erased_output_gives_uniform_posterior() {
        let cb = book(3, 1);
        let ch = BmsChannel::bec(ratio(1, 3)).unwrap();
        let post = posterior(&cb, &ch, &[2; 8]).unwrap();
        assert!(post.probs().iter().all(|p| *p == ratio(1, 16)));
        assert_eq!(block_map(&post), 0);
        assert!((0..8).all(|i| *post.marginal(i) == ratio(1, 2) && bit_map(&post, i) == 0));
    }

    #[test]
    fn noiseless_output_pins_the_codeword() {
        let cb = book(3, 1);
        let ch = BmsChannel::bsc(ratio(0, 1)).unwrap();
        let x = cb.word(5).clone();
        let y: Vec<usize> = (0..8).map(|i| x.get(i) as usize).collect();
        let post = posterior(&cb, &ch, &y).unwrap();
        assert_eq!(*post.prob(5), BigRational::one());
        assert_eq!(block_map(&post), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(randomized_block_map(&post, &mut rng), 5);
        }
        for i in 0..8 {
            assert_eq!(bit_map(&post, i), x.get(i) as u8);
        }
    }

    #[test]
    fn exact_and_float_posteriors_agree() {
        let cb = book(2, 1);
        let ch = BmsChannel::bsc(ratio(1, 4)).unwrap();
        for t in 0..16usize {
            let y: Vec<usize> = (0..4).map(|i| t >> i & 1).collect();
            let exact = posterior(&cb, &ch, &y).unwrap();
            // direct product of rational likelihoods
            let direct: Vec<BigRational> = cb
                .words()
                .iter()
                .map(|x| (0..4).map(|i| ch.likelihood(y[i], x.get(i) as u8).unwrap()).product())
                .collect();
            let total: BigRational = direct.iter().cloned().sum();
            for (p, d) in exact.probs().iter().zip(&direct) {
                assert_eq!(*p, d / &total);
            }
            let float = posterior_f64(&cb, &ch, &y).unwrap();
            for (p, q) in exact.probs().iter().zip(float.probs()) {
                assert!((to_f64(p) - q).abs() < 1e-12);
            }
            assert_eq!(block_map(&exact), block_map(&float));
        }
    }

    #[test]
    fn impossible_output_is_rejected() {
        let cb = book(1, 0);
        let ch = BmsChannel::bec(ratio(1, 2)).unwrap();
        assert!(matches!(posterior(&cb, &ch, &[0, 1]), Err(Error::Inconsistent(_))));
        assert!(matches!(posterior_f64(&cb, &ch, &[0, 1]), Err(Error::Inconsistent(_))));
        assert!(posterior(&cb, &ch, &[0]).is_err());
        assert!(posterior(&cb, &ch, &[0, 7]).is_err());
    }

    #[test]
    fn tie_rules() {
        let cb = book(2, 1);
        let uniform = PosteriorTable::from_weights(&cb, vec![1.0; 8]).unwrap();
        assert_eq!(block_map(&uniform), 0);
        let skewed = PosteriorTable::from_weights(&cb, vec![0.5, 0.3, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(block_map(&skewed), 0);
        // marginal of position 0 equals 1/2 under the uniform posterior
        assert_eq!(bit_map(&uniform, 0), 0);
        let point = PosteriorTable::from_weights(&cb, (0..8).map(|i| f64::from(u8::from(i == 7))).collect()).unwrap();
        assert_eq!(*point.marginal(0), 1.0);
        assert_eq!(bit_map(&point, 0), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let zero_pos = (0..4).find(|&i| !cb.word(7).get(i)).unwrap();
        for _ in 0..50 {
            assert_eq!(randomized_bit_map(&point, zero_pos, &mut rng), 0);
        }
    }
}
