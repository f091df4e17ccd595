//! Extended-range reals stored as a sign and a base-2 log-magnitude.
//!
//! Block-error exponents for large `n` contain terms like `2^{0.9n}`, far
//! outside the `f64` range once `n` exceeds about a thousand. `ExtReal`
//! keeps `sign · 2^{log2_abs}` so such values can be added, compared and
//! printed without overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal {
    /// −1, 0 or +1.
    sign: i8,
    /// log₂|value|; meaningless when `sign == 0`.
    log2_abs: f64,
}

impl ExtReal {
    pub const ZERO: Self = Self {
        sign: 0,
        log2_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || x.is_nan() {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                log2_abs: x.abs().log2(),
            }
        }
    }

    /// `2^e`.
    pub fn pow2(e: f64) -> Self {
        if e == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: 1, log2_abs: e }
        }
    }

    /// `sign · 2^{log2_abs}`.
    pub fn from_parts(sign: i8, log2_abs: f64) -> Self {
        if sign == 0 || log2_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log2_abs,
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log2_abs(&self) -> f64 {
        self.log2_abs
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Nearest `f64`, saturating to ±∞.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log2_abs.exp2(),
        }
    }

    /// Multiplication by a positive power of two, `self · 2^e`.
    pub fn scale_pow2(self, e: f64) -> Self {
        Self::from_parts(self.sign, self.log2_abs + e)
    }

    pub fn abs(self) -> Self {
        Self::from_parts(self.sign.abs(), self.log2_abs)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Neg for ExtReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_parts(-self.sign, self.log2_abs)
    }
}

impl Add for ExtReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log2_abs >= rhs.log2_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = small.log2_abs - big.log2_abs;
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.log2_abs + gap.exp2().ln_1p() / std::f64::consts::LN_2)
        } else if gap == 0.0 {
            Self::ZERO
        } else {
            let r = -gap.exp2();
            Self::from_parts(big.sign, big.log2_abs + r.ln_1p() / std::f64::consts::LN_2)
        }
    }
}

impl Sub for ExtReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let by_sign = self.sign.cmp(&other.sign);
        if by_sign != Ordering::Equal || self.sign == 0 {
            return Some(by_sign);
        }
        let by_mag = self.log2_abs.partial_cmp(&other.log2_abs)?;
        Some(if self.sign > 0 { by_mag } else { by_mag.reverse() })
    }
}

impl fmt::Display for ExtReal {
    /// Ordinary decimal when the value fits an `f64`, else `±2^<log2|x|>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.to_f64();
        if x.is_finite() {
            write!(f, "{x}")
        } else {
            let s = if self.sign < 0 { "-" } else { "" };
            write!(f, "{s}2^{}", self.log2_abs)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let x = self.to_f64();
        if x.is_finite() {
            serializer.serialize_f64(x)
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}
