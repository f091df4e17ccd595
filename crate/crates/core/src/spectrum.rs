//! Weight distributions of Reed-Muller codes and bounds on their cumulative
//! form `W_{n,v}(α) = |{f ∈ RM(n,v) : wt(f) ≤ α}|`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::rational::{binomial, binomial_partial_sum, to_f64};
use crate::rmcode::{weight_counts, EnumerationCap, RmCode};

/// Codeword counts `c_w` for every weight `w ∈ [0, 2ⁿ]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightDistribution {
    n: u32,
    v: u32,
    counts: Vec<u64>,
}

pub fn exact_distribution(code: &RmCode, cap: EnumerationCap) -> Result<WeightDistribution> {
    Ok(WeightDistribution {
        n: code.n(),
        v: code.v(),
        counts: weight_counts(code, cap)?,
    })
}

impl WeightDistribution {
    pub fn from_counts(n: u32, v: u32, counts: Vec<u64>) -> Result<Self> {
        if v > n || counts.len() != (1usize << n) + 1 {
            return param(format!("RM({n},{v}) needs {} weight counts", (1u64 << n) + 1));
        }
        Ok(Self { n, v, counts })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn length(&self) -> usize {
        self.counts.len() - 1
    }

    /// `c_w`, zero outside `[0, N]`.
    pub fn count(&self, w: usize) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Verifies `Σ c_w = 2ᵏ`, `c_0 = 1`, the gap below the minimum distance
    /// and the symmetry `c_w = c_{N−w}`.
    pub fn check_invariants(&self) -> Result<()> {
        let k = RmCode::dimension_formula(self.n, self.v);
        let fail = |m: String| Err(Error::Inconsistent(format!("RM({},{}): {m}", self.n, self.v)));
        if k >= 64 || self.total() != 1u64 << k {
            return fail(format!("counts sum to {}, expected 2^{k}", self.total()));
        }
        if self.counts[0] != 1 {
            return fail(format!("c_0 = {}", self.counts[0]));
        }
        let d = 1usize << (self.n - self.v);
        if let Some(w) = (1..d).find(|&w| self.counts[w] != 0) {
            return fail(format!("c_{w} = {} below the minimum distance {d}", self.counts[w]));
        }
        let n = self.length();
        if let Some(w) = (0..=n).find(|&w| self.counts[w] != self.counts[n - w]) {
            return fail(format!("c_{w} ≠ c_{}", n - w));
        }
        Ok(())
    }

    /// `W(α) = Σ_{w ≤ α·N} c_w`, including the zero codeword.
    pub fn cumulative(&self, alpha: &BigRational) -> u64 {
        if alpha.is_negative() {
            return 0;
        }
        let limit = (alpha * BigRational::from_integer(self.length().into())).floor().to_integer();
        let top = limit.to_usize().unwrap_or(usize::MAX).min(self.length());
        self.counts[..=top].iter().sum()
    }

    pub fn log2_cumulative(&self, alpha: &BigRational) -> f64 {
        (self.cumulative(alpha) as f64).log2()
    }

    /// `weight,count` rows for the nonzero counts, sorted by weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,count\n");
        for (w, &c) in self.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            writeln!(out, "{w},{c}").expect("write to String");
        }
        out
    }

    pub fn from_csv(n: u32, v: u32, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("weight,count") {
            return Err(Error::Parse("expected header `weight,count`".into()));
        }
        let mut counts = vec![0u64; (1usize << n) + 1];
        for line in lines {
            let (w, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
            let parse = |s: &str| s.trim().parse::<u64>().map_err(|e| Error::Parse(format!("`{line}`: {e}")));
            let w = parse(w)? as usize;
            *counts
                .get_mut(w)
                .ok_or_else(|| Error::Parse(format!("weight {w} exceeds the block length")))? = parse(c)?;
        }
        Self::from_counts(n, v, counts)
    }
}

/// Parameters `(ℓ, ε, c)` of the upper bound on `W(2^{−ℓ}(1 − ε))`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundParams {
    pub ell: u32,
    pub eps: BigRational,
    pub c: f64,
}

impl BoundParams {
    /// Requires `1 ≤ ℓ ≤ v − 1`, `0 < ε ≤ 1/2` and `c > 0`.
    pub fn new(v: u32, ell: u32, eps: BigRational, c: f64) -> Result<Self> {
        if ell < 1 || ell + 1 > v {
            return param(format!("ℓ must lie in [1, v−1] = [1, {}], got {ell}", v as i64 - 1));
        }
        if !eps.is_positive() || eps > BigRational::new(1.into(), 2.into()) {
            return param(format!("ε must lie in (0, 1/2], got {eps}"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return param(format!("c must be a positive real, got {c}"));
        }
        Ok(Self { ell, eps, c })
    }

    /// `α = 2^{−ℓ}(1 − ε)`.
    pub fn alpha(&self) -> BigRational {
        (BigRational::one() - &self.eps) / BigRational::from_integer(num_bigint::BigInt::one() << self.ell)
    }

    pub fn log2_inv_eps(&self) -> f64 {
        let r = self.eps.recip();
        // exact for powers of two, which are the common case
        if r.is_integer() && (r.numer() & (r.numer() - num_bigint::BigInt::one())).is_zero() {
            return (r.numer().bits() - 1) as f64;
        }
        to_f64(&r).log2()
    }
}

/// `nℓ + Σ_{i=0}^{v−ℓ} C(n−ℓ, i)`.
pub fn kl_count(n: u32, v: u32, ell: u32) -> BigUint {
    BigUint::from(u64::from(n) * u64::from(ell))
        + binomial_partial_sum(u64::from(n - ell), i64::from(v) - i64::from(ell))
}

/// `log₂` of the upper bound `(1/ε)^{c(v+2)²(nℓ + Σ_{i≤v−ℓ} C(n−ℓ,i))}` on
/// `W_{n,v}(2^{−ℓ}(1−ε))`.
pub fn kl_upper_bound(n: u32, v: u32, params: &BoundParams) -> Result<f64> {
    if v > n {
        return param(format!("require v ≤ n, got n = {n}, v = {v}"));
    }
    BoundParams::new(v, params.ell, params.eps.clone(), params.c)?;
    let count = to_f64(&BigRational::from_integer(kl_count(n, v, params.ell).into()));
    let vv = f64::from(v + 2);
    Ok(params.c * vv * vv * count * params.log2_inv_eps())
}

/// The chain bounding `log₂|H|`, with `δ = 2^{−v−1}`, `L = log₂(1/ε)` and
/// `M = nℓ + Σ_{i≤v−ℓ} C(n−ℓ, i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyExponent {
    /// `t = c((v+1)L + (v+1)²)`.
    pub t: f64,
    pub count: f64,
    /// `t·M`.
    pub step_a: f64,
    /// `c(v+1)(v+2)·L·M`, using `L ≥ 1`.
    pub step_b: f64,
    /// `c(v+2)²·L·M`, equal to the exponent of [`kl_upper_bound`].
    pub exponent: f64,
}

impl FamilyExponent {
    pub fn chain_holds(&self) -> bool {
        self.step_a <= self.step_b && self.step_b <= self.exponent
    }
}

pub fn family_size_exponent(n: u32, v: u32, params: &BoundParams) -> Result<FamilyExponent> {
    let exponent = kl_upper_bound(n, v, params)?;
    let l = params.log2_inv_eps();
    let (v1, v2) = (f64::from(v + 1), f64::from(v + 2));
    let count = to_f64(&BigRational::from_integer(kl_count(n, v, params.ell).into()));
    let t = params.c * (v1 * l + v1 * v1);
    Ok(FamilyExponent {
        t,
        count,
        step_a: t * count,
        step_b: params.c * v1 * v2 * l * count,
        exponent,
    })
}

/// `nℓ + C(n−ℓ, v−ℓ)`, the `log₂` of a lower bound on `W_{n,v}(2^{−ℓ})`.
pub fn counting_lower_bound(n: u32, v: u32, ell: u32) -> Result<BigUint> {
    if ell < 1 || ell > v || v > n {
        return param(format!("require 1 ≤ ℓ ≤ v ≤ n, got n = {n}, v = {v}, ℓ = {ell}"));
    }
    Ok(BigUint::from(u64::from(n) * u64::from(ell)) + binomial(u64::from(n - ell), u64::from(v - ell)))
}

/// One instance entering the calibration of `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub n: u32,
    pub v: u32,
    pub ell: u32,
    pub eps: String,
    pub log2_w: f64,
    /// Bound exponent with `c = 1`.
    pub unit_exponent: f64,
}

impl CalibrationPoint {
    pub fn ratio(&self) -> f64 {
        self.log2_w / self.unit_exponent
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    /// Smallest `c` for which the upper bound holds on every instance.
    pub c_star: f64,
    pub points: Vec<CalibrationPoint>,
}

impl Calibration {
    pub fn tightest(&self) -> Option<&CalibrationPoint> {
        self.points.iter().max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
    }
}

/// Minimal `c` such that `log₂ W(2^{−ℓ}(1−ε)) ≤ kl_upper_bound` on every
/// given distribution, `ℓ ∈ [1, v−1]` and `ε` in `eps_values`.
pub fn calibrate_constant(dists: &[WeightDistribution], eps_values: &[BigRational]) -> Result<Calibration> {
    let mut points = Vec::new();
    for d in dists {
        for ell in 1..d.v() {
            for eps in eps_values {
                let p = BoundParams::new(d.v(), ell, eps.clone(), 1.0)?;
                points.push(CalibrationPoint {
                    n: d.n(),
                    v: d.v(),
                    ell,
                    eps: eps.to_string(),
                    log2_w: d.log2_cumulative(&p.alpha()),
                    unit_exponent: kl_upper_bound(d.n(), d.v(), &p)?,
                });
            }
        }
    }
    let c_star = points.iter().map(CalibrationPoint::ratio).fold(0.0, f64::max);
    Ok(Calibration { c_star, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn dist(n: u32, v: u32) -> WeightDistribution {
        exact_distribution(&RmCode::new(n, v).unwrap(), EnumerationCap::default()).unwrap()
    }

    #[test]
    fn small_distributions() {
        let d = dist(3, 1);
        assert_eq!(d.counts(), &[1, 0, 0, 0, 14, 0, 0, 0, 1]);
        assert_eq!(d.cumulative(&ratio(1, 2)), 15);
        assert_eq!(d.cumulative(&ratio(1, 1)), 16);
        assert_eq!(d.cumulative(&ratio(0, 1)), 1);
        let full = dist(3, 3);
        for w in 0..=8 {
            assert_eq!(BigUint::from(full.count(w)), binomial(8, w as u64));
        }
        full.check_invariants().unwrap();
    }

    #[test]
    fn csv_round_trip() {
        let d = dist(4, 2);
        let text = d.to_csv();
        assert!(text.starts_with("weight,count\n0,1\n4,140\n"));
        assert_eq!(WeightDistribution::from_csv(4, 2, &text).unwrap(), d);
        assert!(WeightDistribution::from_csv(4, 2, "w,c\n").is_err());
        assert!(WeightDistribution::from_csv(2, 1, "weight,count\n9,1\n").is_err());
    }

    #[test]
    fn broken_distribution_is_reported() {
        let mut counts = dist(3, 1).counts().to_vec();
        counts[2] = 1;
        counts[4] = 13;
        let bad = WeightDistribution::from_counts(3, 1, counts).unwrap();
        assert!(bad.check_invariants().is_err());
    }

    #[test]
    fn bound_formulas() {
        let p = BoundParams::new(2, 1, ratio(1, 2), 1.0).unwrap();
        assert_eq!(kl_upper_bound(4, 2, &p).unwrap(), 128.0);
        assert_eq!(counting_lower_bound(4, 2, 1).unwrap(), BigUint::from(7u32));
        assert_eq!(counting_lower_bound(6, 3, 3).unwrap(), BigUint::from(19u32));
        assert!(counting_lower_bound(4, 2, 0).is_err());
        assert!(BoundParams::new(2, 2, ratio(1, 2), 1.0).is_err());
        assert!(BoundParams::new(3, 1, ratio(3, 4), 1.0).is_err());
        assert!(BoundParams::new(3, 1, ratio(0, 1), 1.0).is_err());
        let f = family_size_exponent(4, 2, &p).unwrap();
        assert_eq!(f.t, 3.0 + 9.0);
        assert!(f.chain_holds());
        assert_eq!(f.exponent, 128.0);
    }

    #[test]
    fn bound_grows_as_eps_shrinks() {
        let mut last = 0.0;
        for den in [2u64, 3, 4, 10, 100] {
            let p = BoundParams::new(4, 2, ratio(1, den), 1.0).unwrap();
            let b = kl_upper_bound(6, 4, &p).unwrap();
            assert!(b >= last);
            last = b;
        }
    }
}
