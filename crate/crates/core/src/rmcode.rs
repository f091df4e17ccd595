//! Reed-Muller codes RM(n, v): monomial basis, encoder and exhaustive
//! enumeration of codeword weights.

use num_rational::BigRational;
use rayon::prelude::*;

use crate::boolfn::{AnfPolynomial, BooleanFunction};
use crate::error::{param, Error, Result};
use crate::rational::{binomial_u64, ratio};

/// Default largest `n` accepted by [`RmCode::new`].
pub const DEFAULT_MAX_VARS: u32 = 20;
/// Default largest dimension `k` for which all `2ᵏ` codewords are enumerated.
pub const DEFAULT_MAX_K: u32 = 26;
/// Environment variable overriding [`DEFAULT_MAX_K`].
pub const MAX_K_ENV: &str = "RMLAB_MAX_K";

/// Bound on the dimension of codes whose codewords may be enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_k: u32,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self {
            max_k: DEFAULT_MAX_K,
        }
    }
}

impl EnumerationCap {
    pub fn new(max_k: u32) -> Self {
        Self { max_k }
    }

    /// Reads `RMLAB_MAX_K`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_K_ENV) {
            Ok(s) => s
                .trim()
                .parse::<u32>()
                .ok()
                .filter(|&k| k <= 40)
                .map(Self::new)
                .ok_or_else(|| Error::Parameter(format!("{MAX_K_ENV}={s:?} is not an integer in 0..=40"))),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, code: &RmCode) -> Result<()> {
        if code.dimension() as u64 > self.max_k as u64 {
            return Err(Error::Capacity(format!(
                "RM({}, {}) has dimension k = {} above the enumeration cap {}",
                code.n(),
                code.v(),
                code.dimension(),
                self.max_k
            )));
        }
        Ok(())
    }
}

/// The code RM(n, v) with its canonical monomial basis.
///
/// Basis rows are ordered by degree, then lexicographically on the sorted
/// variable lists, so `1, x1, x2, …, xn, x1x2, x1x3, …`. Message bit `j`
/// selects row `j`; message index `m` has bit `j` equal to message bit `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmCode {
    n: u32,
    v: u32,
    monomials: Vec<usize>,
}

fn lex_subsets(n: u32, size: u32, out: &mut Vec<usize>) {
    fn rec(start: u32, n: u32, left: u32, acc: usize, out: &mut Vec<usize>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, acc | 1 << i, out);
        }
    }
    rec(0, n, size, 0, out);
}

impl RmCode {
    pub fn new(n: u32, v: u32) -> Result<Self> {
        Self::with_max_vars(n, v, DEFAULT_MAX_VARS)
    }

    pub fn with_max_vars(n: u32, v: u32, max_vars: u32) -> Result<Self> {
        if v > n {
            return param(format!("require v ≤ n, got n = {n}, v = {v}"));
        }
        if n > max_vars.min(crate::boolfn::MAX_VARS) {
            return param(format!("require n ≤ {max_vars}, got n = {n}"));
        }
        let mut monomials = Vec::new();
        for d in 0..=v {
            lex_subsets(n, d, &mut monomials);
        }
        Ok(Self { n, v, monomials })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// Block length `N = 2ⁿ`.
    pub fn length(&self) -> usize {
        1 << self.n
    }

    /// Dimension `k = Σ_{i ≤ v} C(n, i)`.
    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    pub fn rate(&self) -> BigRational {
        ratio(self.dimension() as u64, self.length() as u64)
    }

    /// The minimum distance `2^{n−v}` given by the code's construction.
    pub fn formula_min_distance(&self) -> u64 {
        1 << (self.n - self.v)
    }

    /// Monomials of the basis as variable-subset masks, in canonical order.
    pub fn monomials(&self) -> &[usize] {
        &self.monomials
    }

    pub fn basis_row(&self, j: usize) -> BooleanFunction {
        BooleanFunction::from_anf(&AnfPolynomial::from_monomials(self.n, &[self.monomials[j]]))
    }

    pub fn basis(&self) -> Vec<BooleanFunction> {
        (0..self.dimension()).map(|j| self.basis_row(j)).collect()
    }

    /// XOR of the basis rows selected by the message bits.
    pub fn encode(&self, message: &[bool]) -> Result<BooleanFunction> {
        if message.len() != self.dimension() {
            return param(format!(
                "message has {} bits, RM({}, {}) needs {}",
                message.len(),
                self.n,
                self.v,
                self.dimension()
            ));
        }
        let selected: Vec<usize> = message
            .iter()
            .zip(&self.monomials)
            .filter(|(&b, _)| b)
            .map(|(_, &m)| m)
            .collect();
        Ok(BooleanFunction::from_anf(&AnfPolynomial::from_monomials(self.n, &selected)))
    }

    /// Encodes the message whose bit `j` is bit `j` of `index`.
    pub fn encode_index(&self, index: u64) -> Result<BooleanFunction> {
        let k = self.dimension();
        if k < 64 && index >> k != 0 {
            return param(format!("message index {index} needs more than k = {k} bits"));
        }
        let bits: Vec<bool> = (0..k).map(|j| j < 64 && index >> j & 1 == 1).collect();
        self.encode(&bits)
    }

    /// All `2ᵏ` codewords in canonical message order.
    pub fn codewords(&self, cap: EnumerationCap) -> Result<Vec<BooleanFunction>> {
        cap.check(self)?;
        let rows = self.basis();
        let mut out = Vec::with_capacity(1 << self.dimension());
        out.push(BooleanFunction::zero(self.n));
        for row in &rows {
            let extended: Vec<_> = out.iter().map(|c| c.xor(row)).collect();
            out.extend(extended);
        }
        Ok(out)
    }

    /// Minimum weight over the nonzero codewords, by exhaustive enumeration.
    pub fn min_distance_exhaustive(&self, cap: EnumerationCap) -> Result<u64> {
        let counts = weight_counts(self, cap)?;
        Ok(counts
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &c)| c > 0)
            .map(|(w, _)| w as u64)
            .unwrap_or(0))
    }

    /// `C(n, i)` summed over `i ≤ v`, computed without building the basis.
    pub fn dimension_formula(n: u32, v: u32) -> u64 {
        (0..=v.min(n)).map(|i| binomial_u64(n as u64, i as u64)).sum()
    }
}

/// Number of high-order message bits fixed per parallel task.
fn split_bits(k: usize) -> usize {
    k.min(6)
}

fn add_into(acc: &mut [u64], other: &[u64]) {
    acc.iter_mut().zip(other).for_each(|(a, b)| *a += b);
}

/// Calls `visit` on every XOR combination of `rows`, starting from `base`,
/// in Gray-code order so consecutive codewords differ by one row.
fn gray_walk(base: BooleanFunction, rows: &[BooleanFunction], mut visit: impl FnMut(&BooleanFunction)) {
    let mut current = base;
    visit(&current);
    for step in 1u64..(1u64 << rows.len()) {
        current.xor_assign(&rows[step.trailing_zeros() as usize]);
        visit(&current);
    }
}

/// Runs `per_task` on each of the `2^h` cosets obtained by fixing the top
/// `h` of `rows` and sums the returned histograms in task order.
fn partitioned_histogram(
    n: u32,
    rows: &[BooleanFunction],
    bins: usize,
    per_task: impl Fn(BooleanFunction, &[BooleanFunction]) -> Vec<u64> + Sync,
) -> Vec<u64> {
    let h = split_bits(rows.len());
    let (low, high) = rows.split_at(rows.len() - h);
    let partials: Vec<Vec<u64>> = (0..1u64 << h)
        .into_par_iter()
        .map(|t| {
            let mut base = BooleanFunction::zero(n);
            for (i, row) in high.iter().enumerate() {
                if t >> i & 1 == 1 {
                    base.xor_assign(row);
                }
            }
            per_task(base, low)
        })
        .collect();
    let mut total = vec![0u64; bins];
    for p in &partials {
        add_into(&mut total, p);
    }
    total
}

/// Weight histogram `counts[w]` of RM(n, v) by Gray-code enumeration of all
/// codewords with one XOR and popcount per codeword.
pub fn weight_counts_gray(code: &RmCode, cap: EnumerationCap) -> Result<Vec<u64>> {
    cap.check(code)?;
    let len = code.length();
    let rows = code.basis();
    Ok(partitioned_histogram(code.n, &rows, len + 1, |base, low| {
        let mut counts = vec![0u64; len + 1];
        gray_walk(base, low, |c| counts[c.weight() as usize] += 1);
        counts
    }))
}

/// In-place fast Walsh–Hadamard transform.
fn fwht(a: &mut [i32]) {
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Weight histogram by enumerating cosets of RM(n, 1) in RM(n, v).
///
/// For a coset representative `q`, the Walsh spectrum `Ŵ(a)` of `(−1)^q`
/// gives the weights `(N ∓ Ŵ(a))/2` of `q + a·x` and its complement, so each
/// coset of `2ⁿ⁺¹` codewords costs one transform of length `N`.
pub fn weight_counts_walsh(code: &RmCode, cap: EnumerationCap) -> Result<Vec<u64>> {
    cap.check(code)?;
    if code.v == 0 {
        return weight_counts_gray(code, cap);
    }
    let len = code.length();
    let affine = code.n as usize + 1;
    let rows: Vec<BooleanFunction> = (affine..code.dimension()).map(|j| code.basis_row(j)).collect();
    let transform = |q: &BooleanFunction, counts: &mut [u64], buf: &mut Vec<i32>| {
        buf.clear();
        buf.extend((0..len).map(|x| if q.get(x) { -1 } else { 1 }));
        fwht(buf);
        for &s in buf.iter() {
            let lo = ((len as i64 - s as i64) / 2) as usize;
            counts[lo] += 1;
            counts[len - lo] += 1;
        }
    };
    let n = code.n;
    if rows.is_empty() {
        let mut counts = vec![0u64; len + 1];
        transform(&BooleanFunction::zero(n), &mut counts, &mut Vec::with_capacity(len));
        return Ok(counts);
    }
    Ok(partitioned_histogram(n, &rows, len + 1, |base, low| {
        let mut counts = vec![0u64; len + 1];
        let mut buf = Vec::with_capacity(len);
        gray_walk(base, low, |q| transform(q, &mut counts, &mut buf));
        counts
    }))
}

/// Exact weight histogram, choosing the cheaper enumeration strategy.
pub fn weight_counts(code: &RmCode, cap: EnumerationCap) -> Result<Vec<u64>> {
    if code.n >= 7 && code.v >= 1 {
        weight_counts_walsh(code, cap)
    } else {
        weight_counts_gray(code, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let c = RmCode::new(3, 1).unwrap();
        assert_eq!((c.dimension(), c.length()), (4, 8));
        let c = RmCode::new(4, 2).unwrap();
        assert_eq!((c.dimension(), c.length()), (11, 16));
        for n in 0..=6 {
            assert_eq!(RmCode::new(n, n).unwrap().dimension(), 1 << n);
        }
        assert!(RmCode::new(2, 5).is_err());
        assert!(RmCode::new(21, 1).is_err());
        assert!(RmCode::with_max_vars(12, 1, 10).is_err());
    }

    #[test]
    fn canonical_order() {
        let c = RmCode::new(3, 2).unwrap();
        assert_eq!(c.monomials(), &[0, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110]);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(RmCode::new(3, 1).unwrap().rate(), ratio(1, 2));
        assert_eq!(RmCode::new(4, 2).unwrap().rate(), ratio(11, 16));
        assert_eq!(RmCode::new(5, 5).unwrap().rate(), ratio(1, 1));
    }

    #[test]
    fn rate_duality() {
        for n in 1..=12 {
            for v in 0..n {
                let a = RmCode::new(n, v).unwrap().rate();
                let b = RmCode::new(n, n - v - 1).unwrap().rate();
                assert_eq!(a + b, ratio(1, 1), "n = {n}, v = {v}");
            }
        }
    }

    #[test]
    fn basis_is_independent_with_bounded_degree() {
        for n in 0..=6 {
            for v in 0..=n {
                let c = RmCode::new(n, v).unwrap();
                let basis = c.basis();
                assert_eq!(gf2::rank(&basis), c.dimension());
                assert!(basis.iter().all(|r| r.degree() <= v));
                assert_eq!(c.dimension() as u64, RmCode::dimension_formula(n, v));
            }
        }
    }

    #[test]
    fn encode_examples() {
        let c = RmCode::new(3, 1).unwrap();
        assert!(c.encode(&[false; 4]).unwrap().is_zero());
        assert_eq!(c.encode(&[true, false, false, false]).unwrap(), BooleanFunction::one(3));
        assert!(c.encode(&[true; 3]).is_err());
    }

    #[test]
    fn min_distance_examples() {
        let cap = EnumerationCap::default();
        assert_eq!(RmCode::new(3, 1).unwrap().min_distance_exhaustive(cap).unwrap(), 4);
        assert_eq!(RmCode::new(4, 2).unwrap().min_distance_exhaustive(cap).unwrap(), 4);
        for n in 1..=4 {
            assert_eq!(RmCode::new(n, n).unwrap().min_distance_exhaustive(cap).unwrap(), 1);
        }
        let big = RmCode::new(6, 3).unwrap();
        assert!(matches!(big.min_distance_exhaustive(cap), Err(Error::Capacity(_))));
    }

    #[test]
    fn enumeration_strategies_agree() {
        let cap = EnumerationCap::default();
        for (n, v) in [(3, 1), (4, 2), (5, 2), (6, 1), (6, 2), (7, 1), (8, 1), (4, 4)] {
            let code = RmCode::new(n, v).unwrap();
            assert_eq!(
                weight_counts_gray(&code, cap).unwrap(),
                weight_counts_walsh(&code, cap).unwrap(),
                "RM({n}, {v})"
            );
        }
    }

    #[test]
    fn codewords_follow_message_order() {
        let code = RmCode::new(3, 1).unwrap();
        let words = code.codewords(EnumerationCap::default()).unwrap();
        for (m, w) in words.iter().enumerate() {
            assert_eq!(*w, code.encode_index(m as u64).unwrap());
        }
    }

    proptest! {
        #[test]
        fn encode_is_linear(n in 1u32..=7, v_seed in 0u32..8, a in any::<u64>(), b in any::<u64>()) {
            let v = v_seed % (n + 1);
            let code = RmCode::new(n, v).unwrap();
            let k = code.dimension();
            let bits = |m: u64| -> Vec<bool> { (0..k).map(|j| m.rotate_left(j as u32 % 64) & 1 == 1).collect() };
            let (ma, mb) = (bits(a), bits(b));
            let sum: Vec<bool> = ma.iter().zip(&mb).map(|(x, y)| x ^ y).collect();
            let lhs = code.encode(&sum).unwrap();
            let rhs = code.encode(&ma).unwrap().xor(&code.encode(&mb).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
