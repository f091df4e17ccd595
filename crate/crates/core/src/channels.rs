//! Binary-input memoryless symmetric channels with finite output alphabets.
//!
//! Every channel is held as a table of exact transition probabilities
//! `P(y|0)`, `P(y|1)` together with the output involution `π` that realises
//! the symmetry `P(y|0) = P(π(y)|1)`. BEC and BSC are special tables with a
//! rational parameter.

use std::fmt;
use std::io::BufRead;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{param, Error, Result};
use crate::rational::{self, parse_rational, to_f64};

/// Which family a channel belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    /// Binary erasure channel; outputs `0`, `1`, `?`.
    Bec(BigRational),
    /// Binary symmetric channel; outputs `0`, `1`.
    Bsc(BigRational),
    /// Arbitrary symmetric table.
    Table,
}

/// One received symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelOutput {
    pub symbol: usize,
    /// `ln P(y|0) − ln P(y|1)`, possibly infinite.
    pub llr: f64,
}

/// Likelihoods scaled to integers by a common denominator `D`:
/// `P(y|b) = num[y][b] / D`.
#[derive(Clone, Debug)]
pub struct IntegerLikelihoods {
    pub denominator: BigUint,
    pub numerators: Vec<[BigUint; 2]>,
}

#[derive(Clone, Debug)]
pub struct BmsChannel {
    kind: ChannelKind,
    labels: Vec<String>,
    probs: Vec<[BigRational; 2]>,
    involution: Vec<usize>,
    probs_f64: Vec<[f64; 2]>,
    log_probs: Vec<[f64; 2]>,
    z: f64,
}

fn validate_probability(p: &BigRational, what: &str) -> Result<()> {
    if p.is_negative() || *p > BigRational::one() {
        return param(format!("{what} must lie in [0, 1], got {p}"));
    }
    Ok(())
}

impl BmsChannel {
    pub fn bec(epsilon: BigRational) -> Result<Self> {
        validate_probability(&epsilon, "erasure probability")?;
        let keep = BigRational::one() - &epsilon;
        let zero = BigRational::zero();
        let probs = vec![
            [keep.clone(), zero.clone()],
            [zero, keep],
            [epsilon.clone(), epsilon.clone()],
        ];
        Self::build(ChannelKind::Bec(epsilon), labels(&["0", "1", "?"]), probs, vec![1, 0, 2])
    }

    pub fn bsc(p: BigRational) -> Result<Self> {
        validate_probability(&p, "crossover probability")?;
        let q = BigRational::one() - &p;
        let probs = vec![[q.clone(), p.clone()], [p.clone(), q]];
        Self::build(ChannelKind::Bsc(p), labels(&["0", "1"]), probs, vec![1, 0])
    }

    /// A table channel from exact probabilities. Rows must sum to one and
    /// `P(y|0) = P(π(y)|1)` must hold exactly.
    pub fn table(probs: Vec<[BigRational; 2]>, involution: Vec<usize>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::build(ChannelKind::Table, labels, probs, involution)
    }

    fn build(
        kind: ChannelKind,
        labels: Vec<String>,
        probs: Vec<[BigRational; 2]>,
        involution: Vec<usize>,
    ) -> Result<Self> {
        let m = probs.len();
        if m == 0 {
            return param("channel needs at least one output symbol");
        }
        if involution.len() != m {
            return param(format!("involution has {} entries for {m} outputs", involution.len()));
        }
        for (y, &py) in involution.iter().enumerate() {
            if py >= m || involution[py] != y {
                return param(format!("output map is not an involution at symbol {y}"));
            }
        }
        for (y, row) in probs.iter().enumerate() {
            validate_probability(&row[0], &format!("P({y}|0)"))?;
            validate_probability(&row[1], &format!("P({y}|1)"))?;
        }
        for bit in 0..2 {
            let total: BigRational = probs.iter().map(|r| r[bit].clone()).sum();
            if !total.is_one() {
                return param(format!("P(·|{bit}) sums to {total}, not 1"));
            }
        }
        for y in 0..m {
            if probs[y][0] != probs[involution[y]][1] {
                return param(format!(
                    "symmetry fails: P({y}|0) = {} but P(π({y})|1) = {}",
                    probs[y][0], probs[involution[y]][1]
                ));
            }
        }
        let probs_f64: Vec<[f64; 2]> = probs.iter().map(|r| [to_f64(&r[0]), to_f64(&r[1])]).collect();
        let log_probs = probs_f64.iter().map(|r| [r[0].ln(), r[1].ln()]).collect();
        let z = match &kind {
            ChannelKind::Bec(e) => to_f64(e),
            ChannelKind::Bsc(p) => {
                let p = to_f64(p);
                2.0 * (p * (1.0 - p)).sqrt()
            }
            ChannelKind::Table => probs_f64.iter().map(|r| (r[0] * r[1]).sqrt()).sum(),
        };
        Ok(Self {
            kind,
            labels,
            probs,
            involution,
            probs_f64,
            log_probs,
            z: z.clamp(0.0, 1.0),
        })
    }

    /// The same channel presented as a plain table (used to cross-check the
    /// specialised engines against the generic one).
    pub fn as_table(&self) -> Self {
        let mut t = self.clone();
        t.kind = ChannelKind::Table;
        t
    }

    /// Parses `bec:<ε>`, `bsc:<p>`, `table:<path>` or
    /// `awgn:<σ>:<t1>,<t2>,…` (a BPSK/AWGN channel quantized at `0, ±tᵢ`).
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (family, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("channel spec {spec:?} lacks ':'")))?;
        match family.trim().to_ascii_lowercase().as_str() {
            "bec" => Self::bec(parse_rational(arg)?),
            "bsc" => Self::bsc(parse_rational(arg)?),
            "table" => Self::load(arg),
            "awgn" => {
                let (sigma, ts) = arg.split_once(':').unwrap_or((arg, ""));
                let sigma: f64 = sigma
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad noise level {sigma:?}")))?;
                let thresholds = ts
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad threshold {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::quantized_awgn(sigma, &thresholds)
            }
            other => Err(Error::Parse(format!("unknown channel family {other:?}"))),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::read_table(std::io::BufReader::new(file))
    }

    /// Reads the plain-text table format: the alphabet size `m`, then `m`
    /// lines `P(y|0) P(y|1)`, then the involution as `m` indices.
    ///
    /// Entries are parsed exactly. Row sums and the symmetry relation may be
    /// off by at most 1e-12, in which case `P(·|0)` is renormalised and
    /// `P(·|1)` is rebuilt from it through the involution.
    pub fn read_table(reader: impl BufRead) -> Result<Self> {
        let mut lines = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                lines.push(t.to_string());
            }
        }
        let m: usize = lines
            .first()
            .ok_or_else(|| Error::Parse("empty channel file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first line must be the alphabet size".into()))?;
        if lines.len() != m + 2 {
            return Err(Error::Parse(format!(
                "expected {} non-empty lines for m = {m}, found {}",
                m + 2,
                lines.len()
            )));
        }
        let mut probs = Vec::with_capacity(m);
        for line in &lines[1..=m] {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!("expected two probabilities in {line:?}")));
            }
            probs.push([parse_rational(cols[0])?, parse_rational(cols[1])?]);
        }
        let involution = lines[m + 1]
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad involution entry {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if involution.len() != m || involution.iter().any(|&i| i >= m) {
            return param("involution must be a permutation of 0..m-1");
        }
        let tol = 1e-12;
        let sum0: BigRational = probs.iter().map(|r| r[0].clone()).sum();
        let sum1: BigRational = probs.iter().map(|r| r[1].clone()).sum();
        let asymmetric = (0..m).any(|y| probs[y][0] != probs[involution[y]][1]);
        if !sum0.is_one() || !sum1.is_one() || asymmetric {
            let close = (to_f64(&sum0) - 1.0).abs() <= tol
                && (to_f64(&sum1) - 1.0).abs() <= tol
                && (0..m).all(|y| (to_f64(&probs[y][0]) - to_f64(&probs[involution[y]][1])).abs() <= tol);
            if close && sum0.is_positive() {
                for row in probs.iter_mut() {
                    row[0] = &row[0] / &sum0;
                }
                for y in 0..m {
                    probs[y][1] = probs[involution[y]][0].clone();
                }
            }
        }
        Self::table(probs, involution)
    }

    /// BPSK over additive Gaussian noise of standard deviation `sigma`,
    /// quantized into the cells delimited by `0` and `±t` for each threshold.
    pub fn quantized_awgn(sigma: f64, thresholds: &[f64]) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return param(format!("noise level must be positive, got {sigma}"));
        }
        let mut ts: Vec<f64> = thresholds.to_vec();
        if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return param("quantization thresholds must be positive and finite");
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(ts.iter().rev().map(|t| -t));
        edges.push(0.0);
        edges.extend(ts.iter().copied());
        edges.push(f64::INFINITY);
        let normal = Normal::new(1.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
        let cells = edges.len() - 1;
        let row0: Vec<BigRational> = (0..cells)
            .map(|j| {
                let p = normal.cdf(edges[j + 1]) - normal.cdf(edges[j]);
                BigRational::from_float(p.max(0.0)).unwrap_or_else(BigRational::zero)
            })
            .collect();
        let total: BigRational = row0.iter().cloned().sum();
        let row0: Vec<BigRational> = row0.iter().map(|p| p / &total).collect();
        let involution: Vec<usize> = (0..cells).map(|j| cells - 1 - j).collect();
        let probs = (0..cells).map(|j| [row0[j].clone(), row0[involution[j]].clone()]).collect();
        let labels = (0..cells).map(|j| format!("[{},{})", edges[j], edges[j + 1])).collect();
        Self::build(ChannelKind::Table, labels, probs, involution)
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn label(&self, symbol: usize) -> &str {
        &self.labels[symbol]
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    /// Bhattacharyya parameter `z = Σ_y √(P(y|0)·P(y|1))`.
    pub fn bhattacharyya(&self) -> f64 {
        self.z
    }

    /// `z²` as an exact rational when `z` is the square root of one
    /// (always for BEC and BSC).
    pub fn bhattacharyya_squared_exact(&self) -> Option<BigRational> {
        match &self.kind {
            ChannelKind::Bec(e) => Some(e * e),
            ChannelKind::Bsc(p) => Some(rational::from_u64(4) * p * (BigRational::one() - p)),
            ChannelKind::Table => {
                // z is rational when every product is a perfect square
                let mut z = BigRational::zero();
                for r in &self.probs {
                    z += exact_sqrt(&(&r[0] * &r[1]))?;
                }
                Some(&z * &z)
            }
        }
    }

    pub fn likelihood(&self, y: usize, bit: u8) -> Result<BigRational> {
        self.check_symbol(y)?;
        Ok(self.probs[y][(bit & 1) as usize].clone())
    }

    pub fn likelihood_f64(&self, y: usize, bit: u8) -> f64 {
        self.probs_f64[y][(bit & 1) as usize]
    }

    pub fn log_likelihood(&self, y: usize, bit: u8) -> f64 {
        self.log_probs[y][(bit & 1) as usize]
    }

    pub fn output(&self, symbol: usize) -> ChannelOutput {
        ChannelOutput {
            symbol,
            llr: self.log_probs[symbol][0] - self.log_probs[symbol][1],
        }
    }

    fn check_symbol(&self, y: usize) -> Result<()> {
        if y >= self.probs.len() {
            return param(format!("output symbol {y} outside alphabet of size {}", self.probs.len()));
        }
        Ok(())
    }

    /// Draws an output from `P(·|bit)`.
    pub fn sample<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> ChannelOutput {
        let b = (bit & 1) as usize;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (y, row) in self.probs_f64.iter().enumerate() {
            if row[b] > 0.0 {
                acc += row[b];
                last_positive = y;
                if u < acc {
                    return self.output(y);
                }
            }
        }
        self.output(last_positive)
    }

    /// Exact likelihoods over their least common denominator.
    pub fn integer_likelihoods(&self) -> IntegerLikelihoods {
        let mut den = BigInt::one();
        for r in &self.probs {
            den = den.lcm(r[0].denom()).lcm(r[1].denom());
        }
        let numerators = self
            .probs
            .iter()
            .map(|r| {
                let f = |p: &BigRational| (p.numer() * (&den / p.denom())).to_biguint().expect("non-negative");
                [f(&r[0]), f(&r[1])]
            })
            .collect();
        IntegerLikelihoods {
            denominator: den.to_biguint().expect("positive"),
            numerators,
        }
    }
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let isqrt = |v: &BigInt| -> Option<BigInt> {
        let s = v.sqrt();
        (&s * &s == *v).then_some(s)
    };
    Some(BigRational::new(isqrt(r.numer())?, isqrt(r.denom())?))
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl fmt::Display for BmsChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ChannelKind::Bec(e) => write!(f, "BEC({e})"),
            ChannelKind::Bsc(p) => write!(f, "BSC({p})"),
            ChannelKind::Table => write!(f, "Table({} outputs, z = {})", self.probs.len(), self.z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bhattacharyya_examples() {
        assert_eq!(BmsChannel::bec(ratio(3, 10)).unwrap().bhattacharyya(), 0.3);
        assert_eq!(BmsChannel::bsc(ratio(0, 1)).unwrap().bhattacharyya(), 0.0);
        // 2·√(0.11·0.89), 30-digit reference value
        let z = BmsChannel::bsc(ratio(11, 100)).unwrap().bhattacharyya();
        assert!((z - 0.625_779_513_886_480_6_f64).abs() < 1e-15, "{z}");
    }

    #[test]
    fn exact_squares() {
        let bsc = BmsChannel::bsc(ratio(1, 10)).unwrap();
        assert_eq!(bsc.bhattacharyya_squared_exact(), Some(ratio(36, 100)));
        let bec = BmsChannel::bec(ratio(1, 4)).unwrap();
        assert_eq!(bec.as_table().bhattacharyya_squared_exact(), Some(ratio(1, 16)));
        let awgn = BmsChannel::quantized_awgn(0.8, &[0.5]).unwrap();
        assert_eq!(awgn.bhattacharyya_squared_exact(), None);
    }

    #[test]
    fn likelihood_examples() {
        let e = ratio(3, 10);
        let bec = BmsChannel::bec(e.clone()).unwrap();
        assert_eq!(bec.likelihood(2, 0).unwrap(), e);
        assert_eq!(bec.likelihood(2, 1).unwrap(), e);
        let bsc = BmsChannel::bsc(ratio(1, 4)).unwrap();
        assert_eq!(bsc.likelihood(1, 0).unwrap(), ratio(1, 4));
        assert!(bsc.likelihood(2, 0).is_err());
    }

    #[test]
    fn quantized_channel_is_valid() {
        let ch = BmsChannel::quantized_awgn(0.9, &[0.7]).unwrap();
        assert_eq!(ch.alphabet_size(), 4);
        for bit in 0..2u8 {
            let total: BigRational = (0..4).map(|y| ch.likelihood(y, bit).unwrap()).sum();
            assert!(total.is_one());
        }
        for y in 0..4 {
            assert_eq!(ch.likelihood(y, 0).unwrap(), ch.likelihood(ch.involution()[y], 1).unwrap());
        }
    }

    #[test]
    fn rejects_invalid_tables() {
        let half = ratio(1, 2);
        let ok = vec![[half.clone(), half.clone()], [half.clone(), half.clone()]];
        assert!(BmsChannel::table(ok.clone(), vec![1, 0]).is_ok());
        assert!(BmsChannel::table(ok.clone(), vec![1, 1]).is_err());
        assert!(BmsChannel::table(ok, vec![0]).is_err());
        let asym = vec![[ratio(1, 4), ratio(1, 2)], [ratio(3, 4), ratio(1, 2)]];
        assert!(BmsChannel::table(asym, vec![1, 0]).is_err());
        let unnormalized = vec![[ratio(1, 4), ratio(1, 4)], [ratio(1, 4), ratio(1, 4)]];
        assert!(BmsChannel::table(unnormalized, vec![1, 0]).is_err());
        assert!(BmsChannel::bsc(ratio(3, 2)).is_err());
    }

    #[test]
    fn reads_table_files() {
        let text = "# BEC(1/4)\n3\n0.75 0\n0 0.75\n0.25 0.25\n1 0 2\n";
        let ch = BmsChannel::read_table(text.as_bytes()).unwrap();
        assert_eq!(ch.alphabet_size(), 3);
        assert_eq!(ch.bhattacharyya(), 0.25);
        let nearly = "2\n0.7500000000000001 0.25\n0.25 0.75\n1 0\n";
        let ch = BmsChannel::read_table(nearly.as_bytes()).unwrap();
        assert!(ch.likelihood(0, 0).unwrap() + ch.likelihood(1, 0).unwrap() == BigRational::one());
        assert!(BmsChannel::read_table("2\n0.5 0.5\n1 0\n".as_bytes()).is_err());
        assert!(BmsChannel::read_table("2\n0.6 0.5\n0.4 0.5\n1 0\n".as_bytes()).is_err());
    }

    #[test]
    fn parses_specs() {
        assert_eq!(BmsChannel::parse_spec("bec:3/10").unwrap().kind(), &ChannelKind::Bec(ratio(3, 10)));
        assert_eq!(BmsChannel::parse_spec("BSC:0.25").unwrap().kind(), &ChannelKind::Bsc(ratio(1, 4)));
        assert_eq!(BmsChannel::parse_spec("awgn:0.8:0.5,1").unwrap().alphabet_size(), 6);
        assert!(BmsChannel::parse_spec("bsc").is_err());
        assert!(BmsChannel::parse_spec("foo:1").is_err());
    }

    #[test]
    fn sampling_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let clean = BmsChannel::bsc(ratio(0, 1)).unwrap();
        let erase = BmsChannel::bec(ratio(1, 1)).unwrap();
        for _ in 0..1000 {
            assert_eq!(clean.sample(0, &mut rng).symbol, 0);
            assert_eq!(erase.sample(0, &mut rng).symbol, 2);
            assert_eq!(erase.sample(1, &mut rng).symbol, 2);
        }
    }

    #[test]
    fn bsc_flip_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = BmsChannel::bsc(ratio(1, 4)).unwrap();
        let trials = 1_000_000;
        let flips = (0..trials).filter(|_| ch.sample(0, &mut rng).symbol == 1).count();
        let sigma = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((flips as f64 / trials as f64 - 0.25).abs() <= 3.0 * sigma);
    }

    #[test]
    fn integer_likelihoods_share_denominator() {
        let ch = BmsChannel::bsc(ratio(1, 10)).unwrap();
        let il = ch.integer_likelihoods();
        assert_eq!(il.denominator, BigUint::from(10u32));
        assert_eq!(il.numerators[0], [BigUint::from(9u32), BigUint::from(1u32)]);
    }

    #[test]
    fn llr_signs() {
        let ch = BmsChannel::bec(ratio(1, 2)).unwrap();
        assert_eq!(ch.output(0).llr, f64::INFINITY);
        assert_eq!(ch.output(2).llr, 0.0);
    }
}
