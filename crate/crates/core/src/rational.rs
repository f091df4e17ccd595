//! Exact arithmetic helpers: rational parsing, binomials and quadratic surds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"3/10"`, `"0.25"`, `"1e-3"` or `"7"` into an exact rational.
///
/// Decimal strings are converted digit by digit, so `"0.1"` is exactly 1/10.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= pow(&ten, scale as u32);
    } else {
        value /= pow(&ten, (-scale) as u32);
    }
    Ok(if neg { -value } else { value })
}

pub fn pow(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguint(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// Nearest `f64`, also for values whose numerator and denominator overflow.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    let num = r.numer().to_f64().unwrap_or(f64::NAN);
    let den = r.denom().to_f64().unwrap_or(f64::NAN);
    num / den
}

/// Exact fraction followed by a decimal rendering, e.g. `225/256 (0.87890625)`.
pub fn show(r: &BigRational) -> String {
    format!("{} ({})", r, to_f64(r))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Σ_{i=0}^{k} C(n, i), zero when `k < 0`.
pub fn binomial_partial_sum(n: u64, k: i64) -> BigUint {
    if k < 0 {
        return BigUint::zero();
    }
    (0..=k as u64).map(|i| binomial(n, i)).sum()
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    binomial(n, k).to_u64().expect("binomial overflows u64")
}

/// Serializes a big number as its decimal string.
pub fn serialize_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// The real number `a + b·√q` with rational `a`, `b` and `q ≥ 0`.
///
/// Union bounds over channels whose Bhattacharyya parameter is a square root
/// of a rational land in this set, which keeps their comparisons exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub a: BigRational,
    pub b: BigRational,
    pub q: BigRational,
}

impl QuadSurd {
    pub fn new(a: BigRational, b: BigRational, q: BigRational) -> Self {
        assert!(!q.is_negative(), "surd radicand must be non-negative");
        Self { a, b, q }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.q).sqrt()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.a * s, &self.b * s, self.q.clone())
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // sign of (a - r) + b√q
        let lhs = &self.a - r;
        let rhs_sq = &self.b * &self.b * &self.q;
        let surd_sign = if self.b.is_zero() || self.q.is_zero() {
            Ordering::Equal
        } else if self.b.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        let lhs_sign = lhs.cmp(&BigRational::zero());
        match (lhs_sign, surd_sign) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            // opposite signs: compare magnitudes squared
            (x, _) => {
                let lhs_sq = &lhs * &lhs;
                match lhs_sq.cmp(&rhs_sq) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√({})", self.a, self.b, self.q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("3/10").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("2.5e-1").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), -ratio(3, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u64(10, 5), 252);
        assert_eq!(binomial_u64(3, 4), 0);
        assert_eq!(binomial_partial_sum(10, 5), BigUint::from(638u32));
        assert_eq!(binomial_partial_sum(10, -1), BigUint::zero());
    }

    #[test]
    fn surd_comparisons() {
        // √3/2 ≈ 0.866
        let s = QuadSurd::new(BigRational::zero(), ratio(1, 2), from_u64(3));
        assert_eq!(s.cmp_rational(&ratio(866, 1000)), Ordering::Greater);
        assert_eq!(s.cmp_rational(&ratio(867, 1000)), Ordering::Less);
        let t = QuadSurd::new(ratio(1, 1), -ratio(1, 2), from_u64(4));
        assert_eq!(t.cmp_rational(&BigRational::zero()), Ordering::Equal);
        assert_eq!(t.cmp_rational(&ratio(1, 10)), Ordering::Less);
    }
}
