//! Upper bound on `log₂ c_w` for codewords of weight `w` in RM(n, v_n).
//!
//! With `L = ⌈log₂ w⌉` and `ℓ = n − L − 1` the chain is
//!
//! ```text
//! (a) log₂ c_w ≤ log₂ W(w·2^{−n})
//! (b)          ≤ log₂ W(2^{L−n})
//! (c)          ≤ c(v+2)²(nℓ + Σ_{i=0}^{v−n+L+1} C(L+1, i))
//! (d)          ≤ cn²(n² + 2^{(L+1)·h2((v−n+L+1)/(L+1))})
//! (e)          ≤ cn²(n² + 2^{(log₂w+2)·h2((nb/4 − n/2 + log₂w + 2)/log₂w)})
//! ```
//!
//! where `b` is the window width of [`Variant::width`]. Steps (a) and (b)
//! need the exact spectrum; (c) to (e) are evaluated whenever their
//! arguments make sense, and each hypothesis they rely on is reported.

use num_bigint::BigUint;
use serde::Serialize;

use super::{h2_unchecked, rate_window, to_f64_lossy, Hypothesis, Variant};
use crate::error::{param, Result};
use crate::rational::{binomial_partial_sum, ratio};
use crate::spectrum::WeightDistribution;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CwBound {
    pub n: u32,
    pub v: u32,
    pub log2_w: f64,
    pub ceil_log2_w: u64,
    pub ell: i64,
    /// Exact `log₂ c_w` when a spectrum was supplied.
    pub log2_count: Option<f64>,
    pub step_a: Option<f64>,
    pub step_b: Option<f64>,
    pub step_c: Option<f64>,
    pub step_d: Option<f64>,
    pub step_e: Option<f64>,
    pub hypotheses: Vec<Hypothesis>,
}

impl CwBound {
    /// The final expression of the chain.
    pub fn value(&self) -> Option<f64> {
        self.step_e
    }

    pub fn all_hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    /// The evaluated steps in order, for audit output.
    pub fn steps(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("log2 c_w", self.log2_count),
            ("(a)", self.step_a),
            ("(b)", self.step_b),
            ("(c)", self.step_c),
            ("(d)", self.step_d),
            ("(e)", self.step_e),
        ]
    }
}

fn ceil_log2(w: &BigUint) -> u64 {
    let bits = w.bits();
    if w.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

pub fn cw_log_bound(
    n: u32,
    v: u32,
    w: &BigUint,
    c: f64,
    variant: Variant,
    dist: Option<&WeightDistribution>,
) -> Result<CwBound> {
    if v > n {
        return param(format!("require v ≤ n, got n = {n}, v = {v}"));
    }
    if w.bits() == 0 || w.bits() > u64::from(n) + 1 {
        return param(format!("w must lie in [1, 2^n], got {w}"));
    }
    if !(c > 0.0) {
        return param(format!("c must be positive, got {c}"));
    }
    let window = rate_window(n, variant)?;
    let nf = f64::from(n);
    let (vi, ni) = (i64::from(v), i64::from(n));
    let big_l = ceil_log2(w);
    let li = big_l as i64;
    let ell = ni - li - 1;
    let log2_w = if w.bits() <= 1000 { to_f64_lossy(w).log2() } else { big_l as f64 };
    let b = variant.width(nf);

    let mut hyp = Vec::new();
    let top = (nf * (1.0 - b)).exp2().ceil();
    hyp.push(Hypothesis::new(
        "2^{n-v} <= w <= ceil(2^{n(1-b)})",
        big_l >= u64::from(n - v) && log2_w <= top.log2() + 1e-12,
    ));
    hyp.push(Hypothesis::new("1 <= ell <= v - 1", ell >= 1 && ell < vi));
    hyp.push(Hypothesis::new("v + 2 <= n", v + 2 <= n));
    let top_d = vi - ni + li + 1;
    hyp.push(Hypothesis::new(
        "0 <= v - n + L + 1 <= (L + 1)/2",
        top_d >= 0 && 2 * top_d <= li + 1,
    ));
    hyp.push(Hypothesis::new("v below the window's upper end", f64::from(v) < window.upper));
    let arg_e = (nf * b / 4.0 - nf / 2.0 + log2_w + 2.0) / log2_w;
    hyp.push(Hypothesis::new(
        "entropy argument of (e) in [0, 1/2]",
        log2_w > 0.0 && (0.0..=0.5).contains(&arg_e),
    ));

    let (mut log2_count, mut step_a, mut step_b) = (None, None, None);
    if let Some(d) = dist {
        if d.n() != n || d.v() != v {
            return param("the spectrum belongs to a different code");
        }
        let wi = w.iter_u64_digits().next().unwrap_or(0) as usize;
        log2_count = Some((d.count(wi) as f64).log2());
        step_a = Some(d.log2_cumulative(&ratio(wi as u64, 1u64 << n)));
        step_b = Some(d.log2_cumulative(&ratio(1u64 << big_l.min(63), 1u64 << n)));
    }

    let vv = f64::from(v + 2);
    let step_c = (ell >= 0).then(|| {
        let sum = binomial_partial_sum(big_l + 1, top_d);
        c * vv * vv * (nf * ell as f64 + to_f64_lossy(&sum))
    });
    let arg_d = top_d as f64 / (li + 1) as f64;
    let step_d = (0.0..=1.0)
        .contains(&arg_d)
        .then(|| c * nf * nf * (nf * nf + ((li + 1) as f64 * h2_unchecked(arg_d)).exp2()));
    let step_e = (log2_w > 0.0 && (0.0..=1.0).contains(&arg_e))
        .then(|| c * nf * nf * (nf * nf + ((log2_w + 2.0) * h2_unchecked(arg_e)).exp2()));

    Ok(CwBound {
        n,
        v,
        log2_w,
        ceil_log2_w: big_l,
        ell,
        log2_count,
        step_a,
        step_b,
        step_c,
        step_d,
        step_e,
        hypotheses: hyp,
    })
}
