//! Exact error probabilities of the four decoders for small codes.
//!
//! Two engines are available. The generic one walks every channel output
//! `y ∈ Y^N` and every codeword, working with integer likelihoods
//! `L_x(y) = Π_i num[y_i][x_i]` over the common denominator `D^N`. The
//! erasure engine handles the BEC by walking erasure patterns and using
//! ranks of generator columns.
//!
//! With `T = 2^k · D^N` and `S(y) = Σ_x L_x(y)` the generic engine computes
//!
//! ```text
//! P_B  = 1 − Σ_y max_x L_x / T
//! P_Br = 1 − Σ_y Σ_x L_x² / (S·T)
//! P_b  = Σ_i Σ_y min(A0_i, A1_i) / (N·T)
//! P_br = Σ_i Σ_y 2·A0_i·A1_i / (S·N·T)
//! ```
//!
//! where `A1_i(y)` sums `L_x` over codewords with `x_i = 1` and
//! `A0_i = S − A1_i`. Averaging over the transmitted codeword is implicit in
//! the sum over all `x`, so the deterministic tie rules need no symmetry
//! argument.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{BmsChannel, ChannelKind};
use crate::error::{Error, Result};
use crate::gf2::XorBasis;
use crate::rational::{from_biguint, from_u64, pow, ratio, show};
use crate::rmcode::{EnumerationCap, RmCode};

/// Largest block length for the generic engine.
pub const GENERIC_MAX_LENGTH: usize = 12;
/// Largest number of channel outputs `|Y|^N` for the generic engine.
pub const GENERIC_MAX_OUTPUTS: u64 = 1 << 20;
/// Largest block length for the erasure-pattern engine.
pub const ERASURE_MAX_LENGTH: usize = 20;

/// Exact error probabilities of bit-MAP, block-MAP and their randomized
/// versions, averaged over a uniformly drawn codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactErrorReport {
    pub p_bit: BigRational,
    pub p_block: BigRational,
    pub p_bit_rand: BigRational,
    pub p_block_rand: BigRational,
}

/// `lhs ≤ rhs` (or `lhs = rhs` when `equality` is set), evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equality: bool,
}

impl InequalityCheck {
    pub fn le(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            equality: false,
        }
    }

    pub fn eq(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            equality: true,
        }
    }

    pub fn holds(&self) -> bool {
        if self.equality {
            self.lhs == self.rhs
        } else {
            self.lhs <= self.rhs
        }
    }
}

impl fmt::Display for InequalityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.equality { "=" } else { "<=" };
        let verdict = if self.holds() { "ok" } else { "VIOLATED" };
        write!(f, "{}: {} {rel} {} [{verdict}]", self.name, show(&self.lhs), show(&self.rhs))
    }
}

impl ExactErrorReport {
    /// `P_b ≤ P_br ≤ 2P_b` and `P_B ≤ P_Br ≤ 2P_B`.
    pub fn lemma_checks(&self) -> Vec<InequalityCheck> {
        let two = from_u64(2);
        vec![
            InequalityCheck::le("P_b <= P_br", self.p_bit.clone(), self.p_bit_rand.clone()),
            InequalityCheck::le("P_br <= 2 P_b", self.p_bit_rand.clone(), &two * &self.p_bit),
            InequalityCheck::le("P_B <= P_Br", self.p_block.clone(), self.p_block_rand.clone()),
            InequalityCheck::le("P_Br <= 2 P_B", self.p_block_rand.clone(), &two * &self.p_block),
        ]
    }

    pub fn values(&self) -> [(&'static str, &BigRational); 4] {
        [
            ("P_b", &self.p_bit),
            ("P_B", &self.p_block),
            ("P_br", &self.p_bit_rand),
            ("P_Br", &self.p_block_rand),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// BEC fast path when possible, otherwise the generic engine.
    Auto,
    Generic,
    ErasurePatterns,
}

/// Error report together with the intermediate quantities used to audit it.
#[derive(Clone, Debug)]
pub struct ExactAnalysis {
    pub report: ExactErrorReport,
    pub engine: Engine,
    pub length: usize,
    /// `Σ_x p(x) Σ_y p(y|x)·1[x̂_B(y) ≠ x]`, computed from its definition.
    pub p_block_direct: BigRational,
    /// Number of posterior rows visited.
    pub rows: u64,
    /// Rows where `Σ_j p_j(1 − p_j) ≤ 1 − max_j p_j²` failed.
    pub scalar_violations: u64,
    /// (row, position) pairs where `2·p0·p1 ≤ 2·min(p0, p1)` failed.
    pub single_bit_violations: u64,
    /// Probability that the randomized block decoder outputs a codeword at
    /// Hamming distance `d` from the transmitted one, for `d = 0..=N`.
    pub distance_mass: Option<Vec<BigRational>>,
}

impl ExactAnalysis {
    /// All audited relations: the lemma inequalities, the block-error
    /// identity, the per-row checks and, if available, the distance
    /// decomposition.
    pub fn checks(&self) -> Vec<InequalityCheck> {
        let mut out = self.report.lemma_checks();
        out.push(InequalityCheck::eq(
            "P_B direct = P_B closed form",
            self.p_block_direct.clone(),
            self.report.p_block.clone(),
        ));
        out.push(InequalityCheck::eq(
            "rows violating scalar inequality",
            from_u64(self.scalar_violations),
            BigRational::zero(),
        ));
        out.push(InequalityCheck::eq(
            "positions violating single-bit inequality",
            from_u64(self.single_bit_violations),
            BigRational::zero(),
        ));
        if let Some(mass) = &self.distance_mass {
            let total: BigRational = mass.iter().cloned().sum();
            out.push(InequalityCheck::eq("sum over distances = P_Br", total, self.report.p_block_rand.clone()));
            let weighted: BigRational = mass.iter().enumerate().map(|(d, m)| m * from_u64(d as u64)).sum();
            out.push(InequalityCheck::eq(
                "sum d * mass(d) / N = P_br",
                weighted / from_u64(self.length as u64),
                self.report.p_bit_rand.clone(),
            ));
        }
        out
    }

    pub fn distance_split(&self, threshold: u64) -> Result<DistanceSplitReport> {
        let mass = self
            .distance_mass
            .as_ref()
            .ok_or_else(|| Error::Parameter("distance profile was not computed".into()))?;
        let (mut low, mut high) = (BigRational::zero(), BigRational::zero());
        for (d, m) in mass.iter().enumerate() {
            if d as u64 <= threshold {
                low += m;
            } else {
                high += m;
            }
        }
        Ok(DistanceSplitReport {
            threshold,
            length: self.length,
            low,
            high,
            p_block_rand: self.report.p_block_rand.clone(),
            p_bit_rand: self.report.p_bit_rand.clone(),
        })
    }
}

/// Randomized block error split by the distance between the decoded and the
/// transmitted codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceSplitReport {
    pub threshold: u64,
    pub length: usize,
    /// Wrong codeword at distance `≤ T`.
    pub low: BigRational,
    /// Wrong codeword at distance `> T`.
    pub high: BigRational,
    pub p_block_rand: BigRational,
    pub p_bit_rand: BigRational,
}

impl DistanceSplitReport {
    /// `P_Br^low + P_Br^high = P_Br`.
    pub fn sum_check(&self) -> InequalityCheck {
        InequalityCheck::eq("P_Br_low + P_Br_high = P_Br", &self.low + &self.high, self.p_block_rand.clone())
    }

    /// `P_Br^high · (T+1)/N ≤ P_br`: a decoded codeword at distance above `T`
    /// carries more than `T` wrong bits.
    pub fn fraction_check(&self) -> InequalityCheck {
        let factor = ratio(self.threshold + 1, self.length as u64);
        InequalityCheck::le("P_Br_high (T+1)/N <= P_br", &self.high * factor, self.p_bit_rand.clone())
    }
}

pub fn exact_error_report(code: &RmCode, ch: &BmsChannel, cap: EnumerationCap) -> Result<ExactErrorReport> {
    Ok(exact_analysis(code, ch, cap, Engine::Auto, false)?.report)
}

pub fn distance_split_report(
    code: &RmCode,
    ch: &BmsChannel,
    threshold: u64,
    cap: EnumerationCap,
) -> Result<DistanceSplitReport> {
    exact_analysis(code, ch, cap, Engine::Generic, true)?.distance_split(threshold)
}

/// Runs an exact engine. The distance profile needs the generic engine and
/// costs `O(4^k)` per output.
pub fn exact_analysis(
    code: &RmCode,
    ch: &BmsChannel,
    cap: EnumerationCap,
    engine: Engine,
    distances: bool,
) -> Result<ExactAnalysis> {
    cap.check(code)?;
    let erasure = match ch.kind() {
        ChannelKind::Bec(eps) => Some(eps.clone()),
        _ => None,
    };
    match (engine, erasure) {
        (Engine::ErasurePatterns, None) => Err(Error::Parameter("the erasure engine needs a BEC".into())),
        (Engine::ErasurePatterns, Some(_)) if distances => {
            Err(Error::Parameter("the distance profile needs the generic engine".into()))
        }
        (Engine::ErasurePatterns, Some(eps)) => erasure_engine(code, &eps),
        (Engine::Auto, Some(eps)) if !distances => erasure_engine(code, &eps),
        _ => generic_engine(code, ch, distances),
    }
}

/// Message-ordered codewords as bit masks over positions.
fn codeword_masks(code: &RmCode) -> Vec<u64> {
    let basis: Vec<u64> = code.basis().iter().map(|r| r.as_u64().expect("length ≤ 64")).collect();
    let k = basis.len();
    let mut out = vec![0u64; 1 << k];
    for m in 1..out.len() {
        let low = m.trailing_zeros() as usize;
        out[m] = out[m & (m - 1)] ^ basis[low];
    }
    out
}

trait Weight:
    Clone + Ord + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + AddAssign + Send + Sync
{
    fn from_big(v: &BigUint) -> Self;
    fn to_big(&self) -> BigUint;
}

impl Weight for u128 {
    fn from_big(v: &BigUint) -> Self {
        v.to_u128().expect("checked to fit")
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Weight for BigUint {
    fn from_big(v: &BigUint) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

struct Accumulator {
    keep: BigUint,
    wrong: BigUint,
    square_ratio: BigRational,
    bit_min: BigUint,
    bit_rand: BigRational,
    distance: Vec<BigRational>,
    rows: u64,
    scalar_violations: u64,
    single_bit_violations: u64,
}

impl Accumulator {
    fn new(length: usize, distances: bool) -> Self {
        Self {
            keep: BigUint::zero(),
            wrong: BigUint::zero(),
            square_ratio: BigRational::zero(),
            bit_min: BigUint::zero(),
            bit_rand: BigRational::zero(),
            distance: if distances { vec![BigRational::zero(); length + 1] } else { Vec::new() },
            rows: 0,
            scalar_violations: 0,
            single_bit_violations: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.keep += other.keep;
        self.wrong += other.wrong;
        self.square_ratio += other.square_ratio;
        self.bit_min += other.bit_min;
        self.bit_rand += other.bit_rand;
        for (a, b) in self.distance.iter_mut().zip(other.distance) {
            *a += b;
        }
        self.rows += other.rows;
        self.scalar_violations += other.scalar_violations;
        self.single_bit_violations += other.single_bit_violations;
        self
    }
}

fn generic_engine(code: &RmCode, ch: &BmsChannel, distances: bool) -> Result<ExactAnalysis> {
    let n = code.length();
    let m = ch.alphabet_size() as u64;
    let outputs = m.checked_pow(n as u32).filter(|&o| o <= GENERIC_MAX_OUTPUTS);
    let Some(outputs) = outputs.filter(|_| n <= GENERIC_MAX_LENGTH) else {
        return Err(Error::Capacity(format!(
            "the generic exact engine needs N ≤ {GENERIC_MAX_LENGTH} and |Y|^N ≤ {GENERIC_MAX_OUTPUTS}; got N = {n}, |Y| = {m}"
        )));
    };
    let il = ch.integer_likelihoods();
    let words = codeword_masks(code);
    let total = BigUint::from(words.len()) * il.denominator.pow(n as u32);
    // S² · N · 2 bounds every per-output integer; keep it inside u128.
    let fits = 2 * total.bits() + u64::from(usize::BITS - n.leading_zeros()) + 2 <= 126;
    let acc = if fits {
        run_generic::<u128>(&words, n, &il.numerators, outputs, m, distances)
    } else {
        run_generic::<BigUint>(&words, n, &il.numerators, outputs, m, distances)
    };

    let t = from_biguint(&total);
    let nt = &t * from_u64(n as u64);
    let one = BigRational::one();
    let report = ExactErrorReport {
        p_bit: from_biguint(&acc.bit_min) / &nt,
        p_block: &one - from_biguint(&acc.keep) / &t,
        p_bit_rand: acc.bit_rand / &nt,
        p_block_rand: &one - acc.square_ratio / &t,
    };
    Ok(ExactAnalysis {
        report,
        engine: Engine::Generic,
        length: n,
        p_block_direct: from_biguint(&acc.wrong) / &t,
        rows: acc.rows,
        scalar_violations: acc.scalar_violations,
        single_bit_violations: acc.single_bit_violations,
        distance_mass: distances.then(|| acc.distance.into_iter().map(|d| d / &t).collect()),
    })
}

fn run_generic<W: Weight>(
    words: &[u64],
    n: usize,
    numerators: &[[BigUint; 2]],
    outputs: u64,
    m: u64,
    distances: bool,
) -> Accumulator {
    let num: Vec<[W; 2]> = numerators
        .iter()
        .map(|r| [W::from_big(&r[0]), W::from_big(&r[1])])
        .collect();
    let weights: Vec<u32> = words.iter().map(|w| w.count_ones()).collect();
    (0..outputs as usize)
        .into_par_iter()
        .with_min_len(64)
        .fold(
            || Accumulator::new(n, distances),
            |mut acc, t| {
                visit_output(&mut acc, t as u64, words, &weights, n, &num, m, distances);
                acc
            },
        )
        .reduce(|| Accumulator::new(n, distances), Accumulator::merge)
}

#[allow(clippy::too_many_arguments)]
fn visit_output<W: Weight>(
    acc: &mut Accumulator,
    t: u64,
    words: &[u64],
    weights: &[u32],
    n: usize,
    num: &[[W; 2]],
    m: u64,
    distances: bool,
) {
    let mut y = Vec::with_capacity(n);
    let mut r = t;
    for _ in 0..n {
        y.push((r % m) as usize);
        r /= m;
    }
    let l: Vec<W> = words
        .iter()
        .map(|&x| {
            let mut p = W::one();
            for (i, &s) in y.iter().enumerate() {
                p = p * num[s][(x >> i & 1) as usize].clone();
            }
            p
        })
        .collect();
    let s = l.iter().fold(W::zero(), |a, b| a + b.clone());
    if s.is_zero() {
        return;
    }
    acc.rows += 1;

    let mut best = 0;
    for (j, lj) in l.iter().enumerate() {
        if *lj > l[best] {
            best = j;
        }
    }
    let lmax = l[best].clone();
    acc.keep += lmax.to_big();
    let wrong = l
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != best)
        .fold(W::zero(), |a, (_, b)| a + b.clone());
    acc.wrong += wrong.to_big();

    let squares = l.iter().fold(W::zero(), |a, b| a + b.clone() * b.clone());
    let s_big = from_biguint(&s.to_big());
    acc.square_ratio += from_biguint(&squares.to_big()) / &s_big;
    // Σ p_j(1−p_j) ≤ 1 − p_max², scaled by S².
    let spread = l.iter().fold(W::zero(), |a, b| a + b.clone() * (s.clone() - b.clone()));
    if spread > s.clone() * s.clone() - lmax.clone() * lmax {
        acc.scalar_violations += 1;
    }

    let mut bit_rand = W::zero();
    let mut bit_min = W::zero();
    for i in 0..n {
        let a1 = words
            .iter()
            .zip(&l)
            .filter(|(x, _)| *x >> i & 1 == 1)
            .fold(W::zero(), |a, (_, b)| a + b.clone());
        let a0 = s.clone() - a1.clone();
        let lo = a0.clone().min(a1.clone());
        let prod = a0 * a1;
        // 2·p0·p1 ≤ 2·min(p0, p1), scaled by S²/2.
        if prod > lo.clone() * s.clone() {
            acc.single_bit_violations += 1;
        }
        bit_rand += prod.clone() + prod;
        bit_min += lo;
    }
    acc.bit_min += bit_min.to_big();
    acc.bit_rand += from_biguint(&bit_rand.to_big()) / &s_big;

    if distances {
        let mut per_d = vec![W::zero(); n + 1];
        for (a, la) in l.iter().enumerate() {
            if la.is_zero() {
                continue;
            }
            for c in 1..words.len() {
                let lb = &l[a ^ c];
                if !lb.is_zero() {
                    per_d[weights[c] as usize] += la.clone() * lb.clone();
                }
            }
        }
        for (d, v) in per_d.into_iter().enumerate() {
            if !v.is_zero() {
                acc.distance[d] += from_biguint(&v.to_big()) / &s_big;
            }
        }
    }
}

/// BEC engine: for an erasure pattern `E` the posterior is uniform on a coset
/// of the subcode supported inside `E`, whose dimension is `k − rank` of the
/// unerased generator columns. Position `i` is undetermined exactly when its
/// column is outside the span of the unerased columns.
fn erasure_engine(code: &RmCode, eps: &BigRational) -> Result<ExactAnalysis> {
    let n = code.length();
    if n > ERASURE_MAX_LENGTH {
        return Err(Error::Capacity(format!(
            "the erasure engine needs N ≤ {ERASURE_MAX_LENGTH}; got N = {n}"
        )));
    }
    let k = code.dimension();
    let basis = code.basis();
    let columns: Vec<u64> = (0..n)
        .map(|i| {
            basis
                .iter()
                .enumerate()
                .fold(0u64, |c, (j, row)| c | u64::from(row.get(i)) << j)
        })
        .collect();

    // Per erasure count s: Σ_E (2^k − 2^{k−dim}) and Σ_E #undetermined.
    let per_count = (0usize..1 << n)
        .into_par_iter()
        .with_min_len(256)
        .fold(
            || (vec![BigUint::zero(); n + 1], vec![0u64; n + 1]),
            |(mut block, mut bits), e| {
                let e = e as u64;
                let mut span = XorBasis::new();
                for (i, &c) in columns.iter().enumerate() {
                    if e >> i & 1 == 0 {
                        span.insert(c);
                    }
                }
                let dim = k - span.rank() as usize;
                let s = e.count_ones() as usize;
                if dim > 0 {
                    block[s] += (BigUint::one() << k) - (BigUint::one() << (k - dim));
                    bits[s] += columns
                        .iter()
                        .enumerate()
                        .filter(|&(i, &c)| e >> i & 1 == 1 && !span.contains(c))
                        .count() as u64;
                }
                (block, bits)
            },
        )
        .reduce(
            || (vec![BigUint::zero(); n + 1], vec![0u64; n + 1]),
            |(mut b1, mut u1), (b2, u2)| {
                b1.iter_mut().zip(b2).for_each(|(a, b)| *a += b);
                u1.iter_mut().zip(u2).for_each(|(a, b)| *a += b);
                (b1, u1)
            },
        );

    let keep = BigRational::one() - eps;
    let two_k = from_biguint(&(BigUint::one() << k));
    let (mut p_block, mut p_bit) = (BigRational::zero(), BigRational::zero());
    for s in 0..=n {
        let pattern = pow(eps, s as u32) * pow(&keep, (n - s) as u32);
        p_block += &pattern * from_biguint(&per_count.0[s]) / &two_k;
        p_bit += &pattern * from_u64(per_count.1[s]);
    }
    p_bit /= from_u64(2 * n as u64);
    Ok(ExactAnalysis {
        report: ExactErrorReport {
            p_bit: p_bit.clone(),
            p_block: p_block.clone(),
            p_bit_rand: p_bit,
            p_block_rand: p_block.clone(),
        },
        engine: Engine::ErasurePatterns,
        length: n,
        p_block_direct: p_block,
        rows: 1 << n,
        scalar_violations: 0,
        single_bit_violations: 0,
        distance_mass: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: u32, v: u32) -> RmCode {
        RmCode::new(n, v).unwrap()
    }

    fn cap() -> EnumerationCap {
        EnumerationCap::default()
    }

    #[test]
    fn noiseless_channel_has_no_errors() {
        for (n, v) in [(2, 1), (3, 1), (3, 2)] {
            let ch = BmsChannel::bsc(ratio(0, 1)).unwrap();
            let r = exact_error_report(&code(n, v), &ch, cap()).unwrap();
            assert!(r.values().iter().all(|(_, p)| p.is_zero()));
            let e = exact_error_report(&code(n, v), &BmsChannel::bec(ratio(0, 1)).unwrap(), cap()).unwrap();
            assert!(e.values().iter().all(|(_, p)| p.is_zero()));
        }
    }

    #[test]
    fn fully_erased_channel() {
        // every bit is a fair coin and the codeword is uniform
        let r = exact_error_report(&code(3, 1), &BmsChannel::bec(ratio(1, 1)).unwrap(), cap()).unwrap();
        assert_eq!(r.p_bit, ratio(1, 2));
        assert_eq!(r.p_block, ratio(15, 16));
    }

    #[test]
    fn engines_agree_on_erasures() {
        for (n, v) in [(1, 0), (2, 1), (3, 1), (3, 2)] {
            for eps in [ratio(1, 10), ratio(1, 2), ratio(3, 4)] {
                let ch = BmsChannel::bec(eps).unwrap();
                let fast = exact_analysis(&code(n, v), &ch, cap(), Engine::ErasurePatterns, false).unwrap();
                let slow = exact_analysis(&code(n, v), &ch.as_table(), cap(), Engine::Generic, true).unwrap();
                assert_eq!(fast.report, slow.report);
                assert!(slow.checks().iter().all(InequalityCheck::holds));
            }
        }
    }

    #[test]
    fn big_integer_path_matches_u128_path() {
        let c = code(2, 1);
        let words = codeword_masks(&c);
        let ch = BmsChannel::bsc(ratio(3, 7)).unwrap();
        let il = ch.integer_likelihoods();
        let a = run_generic::<u128>(&words, 4, &il.numerators, 16, 2, true);
        let b = run_generic::<BigUint>(&words, 4, &il.numerators, 16, 2, true);
        assert_eq!((a.keep, a.bit_min, a.square_ratio), (b.keep, b.bit_min, b.square_ratio));
        assert_eq!(a.distance, b.distance);
    }

    #[test]
    fn split_edges() {
        let ch = BmsChannel::bsc(ratio(1, 4)).unwrap();
        let c = code(2, 1);
        let top = distance_split_report(&c, &ch, 4, cap()).unwrap();
        assert!(top.high.is_zero());
        assert_eq!(top.low, top.p_block_rand);
        let bottom = distance_split_report(&c, &ch, 0, cap()).unwrap();
        assert!(bottom.low.is_zero());
        assert_eq!(bottom.high, bottom.p_block_rand);
    }

    #[test]
    fn caps_are_enforced() {
        let ch = BmsChannel::bsc(ratio(1, 4)).unwrap();
        assert!(matches!(exact_error_report(&code(4, 1), &ch, cap()), Err(Error::Capacity(_))));
        let bec = BmsChannel::bec(ratio(1, 4)).unwrap();
        assert!(exact_error_report(&code(4, 1), &bec, cap()).is_ok());
        assert!(matches!(exact_error_report(&code(5, 1), &bec, cap()), Err(Error::Capacity(_))));
    }
}
