//! Statistical checks of the randomized decoders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rmlab::decoders::{randomized_bit_map, randomized_block_map, Codebook, PosteriorTable};
use rmlab::rmcode::{EnumerationCap, RmCode};

const DRAWS: usize = 100_000;
const LEVEL: f64 = 1e-3;

fn book(n: u32, v: u32) -> Codebook {
    Codebook::new(&RmCode::new(n, v).unwrap(), EnumerationCap::default()).unwrap()
}

fn chi_square_p_value(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = expected.iter().filter(|&&e| e > 0.0).count() - 1;
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

#[test]
fn uniform_posterior_frequencies_within_three_sigma() {
    let cb = book(2, 1);
    let post = PosteriorTable::from_weights(&cb, vec![1.0; 8]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [0u64; 8];
    for _ in 0..DRAWS {
        counts[randomized_block_map(&post, &mut rng)] += 1;
    }
    let p = 1.0 / 8.0;
    let sigma = (DRAWS as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - DRAWS as f64 * p).abs() <= 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn random_posterior_passes_chi_square() {
    let cb = book(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let weights: Vec<f64> = (0..cb.size()).map(|_| rng.random::<f64>()).collect();
    let post = PosteriorTable::from_weights(&cb, weights).unwrap();
    let mut counts = vec![0u64; cb.size()];
    for _ in 0..DRAWS {
        counts[randomized_block_map(&post, &mut rng)] += 1;
    }
    let expected: Vec<f64> = post.probs().iter().map(|p| p * DRAWS as f64).collect();
    let pv = chi_square_p_value(&counts, &expected);
    assert!(pv > LEVEL, "p-value {pv}");
}

#[test]
fn half_marginal_bit_frequency() {
    let cb = book(2, 1);
    let post = PosteriorTable::from_weights(&cb, vec![1.0; 8]).unwrap();
    assert_eq!(*post.marginal(1), 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ones: u64 = (0..DRAWS).map(|_| u64::from(randomized_bit_map(&post, 1, &mut rng))).sum();
    let sigma = (DRAWS as f64 * 0.25).sqrt();
    assert!((ones as f64 - DRAWS as f64 / 2.0).abs() <= 3.0 * sigma);
}

#[test]
fn joint_then_project_matches_direct_marginal_sampling() {
    let cb = book(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let weights: Vec<f64> = (0..cb.size()).map(|_| rng.random::<f64>().powi(3)).collect();
    let post = PosteriorTable::from_weights(&cb, weights).unwrap();
    for i in 0..cb.length() {
        let m = *post.marginal(i);
        let joint: u64 = (0..DRAWS).map(|_| u64::from(randomized_bit_map(&post, i, &mut rng))).sum();
        let direct: u64 = (0..DRAWS).map(|_| u64::from(rng.random::<f64>() < m)).sum();
        // 2x2 contingency table, one degree of freedom
        let obs = [joint, DRAWS as u64 - joint, direct, DRAWS as u64 - direct];
        let pooled = (joint + direct) as f64 / (2 * DRAWS) as f64;
        let e1 = pooled * DRAWS as f64;
        let e0 = DRAWS as f64 - e1;
        let stat: f64 = obs
            .iter()
            .zip([e1, e0, e1, e0])
            .filter(|(_, e)| *e > 0.0)
            .map(|(&o, e)| (o as f64 - e).powi(2) / e)
            .sum();
        let pv = 1.0 - ChiSquared::new(1.0).unwrap().cdf(stat);
        assert!(pv > LEVEL, "position {i}: p-value {pv}");
    }
}
