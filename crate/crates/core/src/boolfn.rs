//! Boolean functions `f: F₂ⁿ → F₂` stored as packed truth tables.
//!
//! A point of F₂ⁿ is an `n`-bit integer whose bit `i` is the coordinate
//! `x_{i+1}`; the truth table entry at index `x` is `f(x)`. The same packing
//! is used for ANF coefficient vectors, where index `S` is the monomial
//! `Π_{i ∈ S} x_{i+1}`.

use std::fmt;

use num_rational::BigRational;

use crate::error::{param, Result};
use crate::rational::ratio;

/// Largest number of variables a table may have (2³⁰ bits = 128 MiB).
pub const MAX_VARS: u32 = 30;

/// Masks selecting the bit positions whose index has bit `i` clear.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

/// In-place Möbius transform over F₂. It is an involution, so the same
/// routine maps truth tables to ANF coefficients and back.
fn moebius(n: u32, words: &mut [u64]) {
    for (i, &mask) in LOW_MASKS.iter().enumerate().take(n.min(6) as usize) {
        let shift = 1u32 << i;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    for i in 6..n {
        let stride = 1usize << (i - 6);
        for block in words.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h ^= *l;
            }
        }
    }
}

/// Truth table of a function of `n` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: u32,
    words: Vec<u64>,
}

impl BooleanFunction {
    pub fn zero(n: u32) -> Self {
        assert!(n <= MAX_VARS, "too many variables: {n}");
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        let mut f = Self::zero(n);
        f.words.iter_mut().for_each(|w| *w = u64::MAX);
        f.clear_tail();
        f
    }

    /// Builds a table from `f(x)` for each `x` in `0..2ⁿ`.
    pub fn from_fn(n: u32, f: impl Fn(usize) -> bool) -> Self {
        let mut out = Self::zero(n);
        for x in 0..out.len() {
            if f(x) {
                out.set(x, true);
            }
        }
        out
    }

    /// Parses a table written as a string of `0`/`1` characters, index 0 first.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let len = bits.len();
        if !len.is_power_of_two() {
            return param(format!("table length {len} is not a power of two"));
        }
        let n = len.trailing_zeros();
        let mut f = Self::zero(n);
        for (x, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => f.set(x, true),
                _ => return param(format!("invalid table character {c:?}")),
            }
        }
        Ok(f)
    }

    /// Wraps packed words. Bits beyond `2ⁿ` must be zero.
    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        if words.len() != word_count(n) {
            return param(format!(
                "expected {} words for n = {n}, got {}",
                word_count(n),
                words.len()
            ));
        }
        if words[words.len() - 1] & !tail_mask(n) != 0 {
            return param("bits set beyond the table length");
        }
        Ok(Self { n, words })
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    /// Table length `2ⁿ`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, x: usize) -> bool {
        debug_assert!(x < self.len());
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    pub fn set(&mut self, x: usize, value: bool) {
        assert!(x < self.len(), "point {x} outside F₂^{}", self.n);
        let bit = 1u64 << (x & 63);
        if value {
            self.words[x >> 6] |= bit;
        } else {
            self.words[x >> 6] &= !bit;
        }
    }

    fn clear_tail(&mut self) {
        let m = tail_mask(self.n);
        if let Some(last) = self.words.last_mut() {
            *last &= m;
        }
    }

    /// Hamming weight `|{x : f(x) = 1}|`.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Normalized weight `weight / 2ⁿ` as an exact rational.
    pub fn wt(&self) -> BigRational {
        ratio(self.weight(), self.len() as u64)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n, "variable count mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count mismatch");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Self { n: self.n, words }
    }

    /// Hamming distance to another table of the same length.
    pub fn distance(&self, other: &Self) -> u64 {
        assert_eq!(self.n, other.n, "variable count mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    /// The shifted table `x ↦ f(x ⊕ y)`.
    pub fn shift(&self, y: usize) -> Self {
        assert!(y < self.len(), "direction {y} outside F₂^{}", self.n);
        let low = y & 63;
        let high = y >> 6;
        let mut words: Vec<u64> = (0..self.words.len()).map(|j| self.words[j ^ high]).collect();
        if low != 0 {
            for (i, &mask) in LOW_MASKS.iter().enumerate() {
                if low >> i & 1 == 1 {
                    let s = 1u32 << i;
                    for w in words.iter_mut() {
                        *w = ((*w & mask) << s) | ((*w >> s) & mask);
                    }
                }
            }
        }
        Self { n: self.n, words }
    }

    /// Discrete derivative `Δ_y f(x) = f(x ⊕ y) ⊕ f(x)`.
    pub fn derivative(&self, y: usize) -> Self {
        let mut d = self.shift(y);
        d.xor_assign(self);
        d
    }

    /// `Δ_{y_1} ⋯ Δ_{y_k} f`. The result does not depend on the order of `ys`.
    pub fn iterated_derivative(&self, ys: &[usize]) -> Self {
        ys.iter().fold(self.clone(), |f, &y| f.derivative(y))
    }

    /// Algebraic normal form.
    pub fn anf(&self) -> AnfPolynomial {
        let mut words = self.words.clone();
        moebius(self.n, &mut words);
        AnfPolynomial { n: self.n, words }
    }

    pub fn from_anf(p: &AnfPolynomial) -> Self {
        let mut words = p.words.clone();
        moebius(p.n, &mut words);
        Self { n: p.n, words }
    }

    /// Algebraic degree; the zero function has degree 0.
    pub fn degree(&self) -> u32 {
        self.anf().degree()
    }

    /// Table as a `u64` bitmask, available when `2ⁿ ≤ 64`.
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(j, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(j * 64 + b)
            })
        })
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 8 {
            write!(f, "BooleanFunction({self})")
        } else {
            write!(f, "BooleanFunction(n = {}, weight = {})", self.n, self.weight())
        }
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.len() {
            f.write_str(if self.get(x) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// F₂ polynomial in `n` variables, one coefficient bit per monomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AnfPolynomial {
    n: u32,
    words: Vec<u64>,
}

impl AnfPolynomial {
    pub fn zero(n: u32) -> Self {
        assert!(n <= MAX_VARS, "too many variables: {n}");
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    /// Sum of the given monomials, each a subset mask of the variables.
    /// Repeated monomials cancel.
    pub fn from_monomials(n: u32, monomials: &[usize]) -> Self {
        let mut p = Self::zero(n);
        for &m in monomials {
            assert!(m < 1 << n, "monomial {m:#b} uses variables beyond x_{n}");
            p.words[m >> 6] ^= 1 << (m & 63);
        }
        p
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn coeff(&self, monomial: usize) -> bool {
        (self.words[monomial >> 6] >> (monomial & 63)) & 1 == 1
    }

    /// Monomials with a nonzero coefficient, in increasing mask order.
    pub fn monomials(&self) -> Vec<usize> {
        BooleanFunction {
            n: self.n,
            words: self.words.clone(),
        }
        .ones()
        .collect()
    }

    pub fn degree(&self) -> u32 {
        self.monomials()
            .into_iter()
            .map(|m| m.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for AnfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnfPolynomial({self})")
    }
}

impl fmt::Display for AnfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let monos = self.monomials();
        if monos.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = monos
            .iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..self.n)
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| format!("x{}", i + 1))
                        .collect::<String>()
                }
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const X1: usize = 0b01;
    const X2: usize = 0b10;

    #[test]
    fn from_anf_examples() {
        let one = AnfPolynomial::from_monomials(2, &[0]);
        assert_eq!(BooleanFunction::from_anf(&one).to_string(), "1111");
        let x1x2 = AnfPolynomial::from_monomials(2, &[X1 | X2]);
        assert_eq!(BooleanFunction::from_anf(&x1x2).to_string(), "0001");
        let sum = AnfPolynomial::from_monomials(2, &[X1, X2]);
        assert_eq!(BooleanFunction::from_anf(&sum).to_string(), "0110");
    }

    #[test]
    fn anf_examples() {
        let f = BooleanFunction::from_bits("0110").unwrap();
        assert_eq!(f.anf(), AnfPolynomial::from_monomials(2, &[X1, X2]));
        assert_eq!(f.degree(), 1);
        let g = BooleanFunction::from_bits("0001").unwrap();
        assert_eq!(g.anf().monomials(), vec![X1 | X2]);
        assert_eq!(g.degree(), 2);
        let z = BooleanFunction::zero(3);
        assert!(z.anf().is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn wt_examples() {
        assert_eq!(BooleanFunction::zero(3).wt(), ratio(0, 1));
        assert_eq!(BooleanFunction::from_bits("0110").unwrap().wt(), ratio(1, 2));
        assert_eq!(BooleanFunction::from_bits("0001").unwrap().wt(), ratio(1, 4));
    }

    #[test]
    fn derivative_examples() {
        let f = BooleanFunction::from_bits("0001").unwrap();
        assert!(f.derivative(0).is_zero());
        let d = f.derivative(X1);
        assert_eq!(d.anf(), AnfPolynomial::from_monomials(2, &[X2]));
        assert!(f.iterated_derivative(&[X1, X1]).is_zero());
        assert_eq!(f.iterated_derivative(&[X1, X2]), BooleanFunction::one(2));
    }

    #[test]
    fn display_of_polynomial() {
        let p = AnfPolynomial::from_monomials(3, &[0, 0b101, 0b010]);
        assert_eq!(p.to_string(), "1+x2+x1x3");
        assert_eq!(AnfPolynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(BooleanFunction::from_bits("011").is_err());
        assert!(BooleanFunction::from_bits("01a1").is_err());
        assert!(BooleanFunction::from_words(2, vec![0x10]).is_err());
        assert!(BooleanFunction::from_words(8, vec![0]).is_err());
    }

    fn arb_function() -> impl Strategy<Value = BooleanFunction> {
        (0u32..=9).prop_flat_map(|n| {
            proptest::collection::vec(any::<u64>(), word_count(n)).prop_map(move |mut words| {
                let last = words.len() - 1;
                words[last] &= tail_mask(n);
                BooleanFunction::from_words(n, words).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn anf_round_trip(f in arb_function()) {
            prop_assert_eq!(BooleanFunction::from_anf(&f.anf()), f.clone());
            let p = f.anf();
            prop_assert_eq!(BooleanFunction::from_anf(&p).anf(), p);
        }

        #[test]
        fn shift_matches_pointwise(f in arb_function(), y in any::<usize>()) {
            let y = y % f.len();
            let s = f.shift(y);
            for x in 0..f.len() {
                prop_assert_eq!(s.get(x), f.get(x ^ y));
            }
        }

        #[test]
        fn derivative_is_periodic_in_its_direction(f in arb_function(), y in any::<usize>()) {
            let y = y % f.len();
            let d = f.derivative(y);
            for x in 0..f.len() {
                prop_assert_eq!(d.get(x), d.get(x ^ y));
            }
        }

        #[test]
        fn derivative_lowers_degree(f in arb_function(), y in any::<usize>()) {
            let y = y % f.len();
            let v = f.degree();
            let d = f.derivative(y);
            if y != 0 && !d.is_zero() {
                prop_assert!(d.degree() < v);
            }
        }
    }
}
