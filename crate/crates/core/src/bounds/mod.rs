//! Analytic bounds: binary entropy, binomial tails, the admissible window of
//! code orders, union bounds over weight spectra, the codeword-count chain,
//! the log-bound maximisation and the per-`n` bound pipeline.

mod cw;
mod logbound;
mod pipeline;

pub use cw::{cw_log_bound, CwBound};
pub use logbound::{
    entropy_argument_check, find_negative_onset, hypothesis_thresholds, logbound_exponent, EntropyCheck,
    Hypothesis, LogBoundOptions, LogBoundReport,
};
pub use pipeline::{
    decay_report, default_n_grid, default_order, fit_line, fit_power_scale, summarize, theorem_pipeline,
    BitErrorModel, DecayReport, LinearFit, PipelineParams, PipelineRow, PipelineSummary, PowerFit,
};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{param, Result};
use crate::extreal::ExtReal;
use crate::rational::{binomial_partial_sum, from_u64, pow, QuadSurd};
use crate::spectrum::WeightDistribution;

/// Binary entropy `−x log₂ x − (1−x) log₂(1−x)`, with `h2(0) = h2(1) = 0`.
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return param(format!("h2 is defined on [0, 1], got {x}"));
    }
    Ok(h2_unchecked(x))
}

pub(crate) fn h2_unchecked(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (-x).ln_1p() / std::f64::consts::LN_2
}

/// `Σ_{i≤k} C(n,i)` next to its entropy bound `2^{n·h2(k/n)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub n: u64,
    pub k: u64,
    #[serde(serialize_with = "crate::rational::serialize_display")]
    pub exact: BigUint,
    pub bound_log2: f64,
    /// `exact ≤ 2^{n·h2(k/n)}`, decided in integers as
    /// `exact · k^k · (n−k)^{n−k} ≤ n^n`.
    pub holds: bool,
}

pub fn binom_tail_bound(n: u64, k: u64) -> Result<TailBound> {
    if 2 * k > n {
        return param(format!("the entropy bound needs k ≤ n/2, got n = {n}, k = {k}"));
    }
    let exact = binomial_partial_sum(n, k as i64);
    let ipow = |b: u64, e: u64| BigUint::from(b).pow(e as u32);
    let holds = &exact * ipow(k, k) * ipow(n - k, n - k) <= ipow(n, n);
    let bound_log2 = if n == 0 { 0.0 } else { n as f64 * h2_unchecked(k as f64 / n as f64) };
    Ok(TailBound {
        n,
        k,
        exact,
        bound_log2,
        holds,
    })
}

/// How the admissible order window scales with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Variant {
    /// `v_n ∈ ((n/2)(1 − β/2), (n/2)(1 + β/2))`, `β ∈ (0, 1/2)`.
    Polynomial { beta: f64 },
    /// `v_n ∈ (n/2 − n^{1/2+β′}/4, n/2 + n^{1/2+β′}/4)`, `β′ > 0`.
    Refined { beta_prime: f64 },
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::Polynomial { beta } if !(beta > 0.0 && beta < 0.5) => {
                param(format!("β must lie in (0, 1/2), got {beta}"))
            }
            Variant::Refined { beta_prime } if !(beta_prime > 0.0 && beta_prime.is_finite()) => {
                param(format!("β′ must be positive, got {beta_prime}"))
            }
            _ => Ok(()),
        }
    }

    /// The relative width `b(n)`: `β`, or `n^{β′−1/2}` for the refined window.
    /// Both windows read `n/2 ± n·b(n)/4`.
    pub fn width(&self, n: f64) -> f64 {
        match *self {
            Variant::Polynomial { beta } => beta,
            Variant::Refined { beta_prime } => n.powf(beta_prime - 0.5),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Polynomial { .. } => "polynomial",
            Variant::Refined { .. } => "refined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateWindow {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub variant: Variant,
}

impl RateWindow {
    /// Whether `v` lies strictly inside the window.
    pub fn contains(&self, v: u32) -> bool {
        let v = f64::from(v);
        self.lower < v && v < self.upper
    }
}

pub fn rate_window(n: u32, variant: Variant) -> Result<RateWindow> {
    variant.validate()?;
    let nf = f64::from(n);
    let half = nf * variant.width(nf) / 4.0;
    Ok(RateWindow {
        n,
        lower: nf / 2.0 - half,
        upper: nf / 2.0 + half,
        variant,
    })
}

/// `1 − 2^{n·h2((n−v−1)/n) − n}`, a lower bound on the rate of RM(n, v)
/// valid when `n − v − 1 ≤ n/2`.
pub fn rate_lower_bound(n: u32, v: u32) -> Result<f64> {
    if v > n || 2 * (n as i64 - v as i64 - 1) > n as i64 {
        return param(format!("the rate bound needs n − v − 1 ≤ n/2, got n = {n}, v = {v}"));
    }
    if v == n {
        return Ok(1.0);
    }
    let nf = f64::from(n);
    Ok(1.0 - (nf * h2_unchecked((nf - f64::from(v) - 1.0) / nf) - nf).exp2())
}

/// `Σ_{w=1}^{w_max} z^w c_w` in floating point, with its `log₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnionBound {
    pub w_max: usize,
    pub sum: f64,
    /// `log₂` of the sum, finite even when `sum` underflows.
    pub log2_sum: f64,
}

impl UnionBound {
    /// Each wrong codeword of weight `w` beats the transmitted one with
    /// probability at most `z^w / 2`.
    pub const PAIRWISE_FACTOR: f64 = 0.5;

    /// `½ Σ z^w c_w`, an upper bound on the block-MAP error probability
    /// when `w_max = N`.
    pub fn block_error_bound(&self) -> f64 {
        Self::PAIRWISE_FACTOR * self.sum
    }
}

pub fn union_bound(dist: &WeightDistribution, z: f64, w_max: usize) -> Result<UnionBound> {
    if !(0.0..=1.0).contains(&z) {
        return param(format!("z must lie in [0, 1], got {z}"));
    }
    let top = w_max.min(dist.length());
    let mut total = ExtReal::ZERO;
    for w in 1..=top {
        let c = dist.count(w);
        if c > 0 && z > 0.0 {
            total = total + ExtReal::pow2(w as f64 * z.log2() + (c as f64).log2());
        }
    }
    Ok(UnionBound {
        w_max: top,
        sum: total.to_f64(),
        log2_sum: total.log2_abs(),
    })
}

/// `Σ_{w=1}^{w_max} z^w c_w` for rational `z`.
pub fn union_bound_exact(dist: &WeightDistribution, z: &BigRational, w_max: usize) -> BigRational {
    (1..=w_max.min(dist.length()))
        .filter(|&w| dist.count(w) > 0)
        .map(|w| pow(z, w as u32) * from_u64(dist.count(w)))
        .sum()
}

/// `Σ_{w=1}^{w_max} z^w c_w` for `z = √q`, as `a + b√q`: even powers of `z`
/// are rational and odd powers are a rational multiple of `√q`.
pub fn union_bound_surd(dist: &WeightDistribution, q: &BigRational, w_max: usize) -> QuadSurd {
    let (mut a, mut b) = (BigRational::zero(), BigRational::zero());
    for w in (1..=w_max.min(dist.length())).filter(|&w| dist.count(w) > 0) {
        let term = pow(q, (w / 2) as u32) * from_u64(dist.count(w));
        if w % 2 == 0 {
            a += term;
        } else {
            b += term;
        }
    }
    QuadSurd::new(a, b, q.clone())
}

/// `½ Σ_{w≥1} z^w c_w` with `z² = q`, for exact comparison with `P_B`.
pub fn block_error_union_bound_surd(dist: &WeightDistribution, q: &BigRational) -> QuadSurd {
    union_bound_surd(dist, q, dist.length()).scale(&BigRational::new(One::one(), 2.into()))
}

pub(crate) fn to_f64_lossy(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::rmcode::{EnumerationCap, RmCode};
    use crate::spectrum::exact_distribution;

    #[test]
    fn entropy_values() {
        assert_eq!(h2(0.5).unwrap(), 1.0);
        assert_eq!(h2(0.0).unwrap(), 0.0);
        assert_eq!(h2(1.0).unwrap(), 0.0);
        assert!((h2(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-15);
        assert!(h2(-0.1).is_err() && h2(1.5).is_err());
    }

    #[test]
    fn tail_examples() {
        let t = binom_tail_bound(10, 5).unwrap();
        assert_eq!(t.exact, BigUint::from(638u32));
        assert_eq!(t.bound_log2, 10.0);
        assert!(t.holds);
        let z = binom_tail_bound(7, 0).unwrap();
        assert_eq!(z.exact, BigUint::from(1u32));
        assert_eq!(z.bound_log2, 0.0);
        assert!(z.holds);
        assert!(binom_tail_bound(10, 6).is_err());
    }

    #[test]
    fn windows() {
        let w = rate_window(100, Variant::Polynomial { beta: 0.1 }).unwrap();
        assert!((w.lower - 47.5).abs() < 1e-12 && (w.upper - 52.5).abs() < 1e-12);
        let r = rate_window(100, Variant::Refined { beta_prime: 0.1 }).unwrap();
        assert!((r.upper - 50.0 - 3.962_232_981_152_1).abs() < 1e-9);
        assert!(rate_window(10, Variant::Polynomial { beta: 0.5 }).is_err());
        assert!(rate_window(10, Variant::Refined { beta_prime: 0.0 }).is_err());
    }

    #[test]
    fn rate_bound_is_below_exact_rate() {
        for n in 2..=40u32 {
            for v in n / 2..=n {
                if let Ok(lb) = rate_lower_bound(n, v) {
                    let r = RmCode::dimension_formula(n, v) as f64 / f64::from(n).exp2();
                    assert!(lb <= r + 1e-12, "n={n} v={v}");
                }
            }
        }
    }

    #[test]
    fn union_bound_of_first_order_code() {
        let d = exact_distribution(&RmCode::new(3, 1).unwrap(), EnumerationCap::default()).unwrap();
        assert_eq!(union_bound_exact(&d, &ratio(1, 2), 8), ratio(225, 256));
        let f = union_bound(&d, 0.5, 8).unwrap();
        assert!((f.sum - 225.0 / 256.0).abs() < 1e-15);
        assert!((f.block_error_bound() - 225.0 / 512.0).abs() < 1e-15);
        // z = 1/2 is √(1/4)
        let s = union_bound_surd(&d, &ratio(1, 4), 8);
        assert_eq!(s.cmp_rational(&ratio(225, 256)), std::cmp::Ordering::Equal);
        assert_eq!(union_bound(&d, 0.0, 8).unwrap().sum, 0.0);
        let mut last = 0.0;
        for w_max in 0..=8 {
            let s = union_bound(&d, 0.3, w_max).unwrap().sum;
            assert!(s >= last);
            last = s;
        }
    }
}
