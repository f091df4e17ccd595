//! Upper bound on `log₂` of the probability that the randomized block
//! decoder lands on a wrong codeword of small weight:
//!
//! ```text
//! n + cn⁴ + max_{x ∈ [1/2 − b/4, 1 − 7b/8]} ( −log₂(1/z)·2^{nx} + 4cn²·2^{nx·h2((b/3 − 1/2 + x)/x)} )
//! ```
//!
//! with `b = β` (polynomial window) or `b = n^{β′−1/2}` (refined window).
//! The terms reach `2^{0.9n}` and are handled as [`ExtReal`]s.

use serde::Serialize;

use super::{h2_unchecked, pipeline::default_order, rate_window, Variant};
use crate::error::{param, Error, Result};
use crate::extreal::ExtReal;

/// A named precondition and whether it holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    /// Smallest `n` at which the condition holds, where that is tracked.
    pub first_n: Option<u64>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
            first_n: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogBoundOptions {
    /// Grid points over the `x` interval, endpoints included.
    pub grid: usize,
    /// Relative tolerance of the golden-section refinement in `x`.
    pub tol: f64,
}

impl Default for LogBoundOptions {
    fn default() -> Self {
        Self { grid: 10_000, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogBoundReport {
    pub n: u32,
    pub v_n: u32,
    pub z: f64,
    pub c: f64,
    pub variant: Variant,
    /// Window width `b` at this `n`.
    pub width: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_star: f64,
    /// The whole bound, `additive + channel_term + counting_term` at `x*`.
    pub exponent: ExtReal,
    /// `−log₂(1/z)·2^{n x*}`.
    pub channel_term: ExtReal,
    /// `4cn²·2^{n x* h2(·)}`.
    pub counting_term: ExtReal,
    /// `n + cn⁴`.
    pub additive: f64,
    /// Best bracketed value on the grid before refinement.
    pub grid_max: ExtReal,
    pub hypotheses: Vec<Hypothesis>,
}

impl LogBoundReport {
    pub fn is_negative(&self) -> bool {
        self.exponent.is_negative()
    }
}

struct Objective {
    n: f64,
    b: f64,
    /// `log₂ log₂(1/z)`.
    log2_rate: f64,
    /// `log₂(4cn²)`.
    log2_scale: f64,
}

impl Objective {
    fn terms(&self, x: f64) -> (ExtReal, ExtReal) {
        let channel = -ExtReal::pow2(self.n * x + self.log2_rate);
        let arg = (self.b / 3.0 - 0.5 + x) / x;
        let counting = ExtReal::pow2(self.log2_scale + self.n * x * h2_unchecked(arg));
        (channel, counting)
    }

    fn value(&self, x: f64) -> ExtReal {
        let (a, b) = self.terms(x);
        a + b
    }
}

pub fn logbound_exponent(
    n: u32,
    v_n: u32,
    z: f64,
    variant: Variant,
    c: f64,
    opts: LogBoundOptions,
) -> Result<LogBoundReport> {
    if !(z > 0.0 && z < 1.0) {
        return param(format!("z must lie in (0, 1), got {z}"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return param(format!("c must be a positive real, got {c}"));
    }
    if opts.grid < 2 || !(opts.tol > 0.0) {
        return param("the grid needs at least two points and a positive tolerance");
    }
    let window = rate_window(n, variant)?;
    let nf = f64::from(n);
    let b = variant.width(nf);
    let (x_lo, x_hi) = (0.5 - b / 4.0, 1.0 - 7.0 * b / 8.0);
    if n == 0 || x_lo > x_hi {
        return Err(Error::Parameter(format!(
            "the bound is not applicable at n = {n}: the x-interval [{x_lo}, {x_hi}] is empty (b = {b} > 4/5)"
        )));
    }
    let f = Objective {
        n: nf,
        b,
        log2_rate: (1.0 / z).log2().log2(),
        log2_scale: (4.0 * c).log2() + 2.0 * nf.log2(),
    };

    let step = (x_hi - x_lo) / (opts.grid - 1) as f64;
    let xs = |i: usize| if i + 1 == opts.grid { x_hi } else { x_lo + step * i as f64 };
    let mut best = 0;
    let mut best_val = f.value(xs(0));
    for i in 1..opts.grid {
        let val = f.value(xs(i));
        if val > best_val {
            best = i;
            best_val = val;
        }
    }
    let lo = xs(best.saturating_sub(1));
    let hi = xs((best + 1).min(opts.grid - 1));
    let (x_ref, val_ref) = golden_max(&f, lo, hi, opts.tol);
    let (x_star, max_val) = if val_ref > best_val { (x_ref, val_ref) } else { (xs(best), best_val) };
    let (channel_term, counting_term) = f.terms(x_star);
    let additive = nf + c * nf.powi(4);

    let l_top = (nf * (1.0 - b)).ceil();
    let vf = f64::from(v_n);
    let hypotheses = vec![
        Hypothesis::new("v_n inside the rate window", window.contains(v_n)),
        Hypothesis::new("1 - 7b/8 >= 1 - b + 1/n", nf * b >= 8.0),
        Hypothesis::new("b/4 + 2/n <= b/3", nf * b >= 24.0),
        Hypothesis::new("ell >= 1 at the largest weight", nf - l_top - 1.0 >= 1.0),
        Hypothesis::new(
            "v_n - n + L + 1 <= (L + 1)/2 at the largest weight",
            vf - nf + l_top + 1.0 <= (l_top + 1.0) / 2.0,
        ),
    ];

    Ok(LogBoundReport {
        n,
        v_n,
        z,
        c,
        variant,
        width: b,
        x_lo,
        x_hi,
        x_star,
        exponent: ExtReal::from_f64(additive) + max_val,
        channel_term,
        counting_term,
        additive,
        grid_max: best_val,
        hypotheses,
    })
}

fn golden_max(f: &Objective, mut a: f64, mut b: f64, tol: f64) -> (f64, ExtReal) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f.value(c), f.value(d));
    while (b - a) > tol * a.abs().max(b.abs()).max(1e-300) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f.value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f.value(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// The hypotheses of [`logbound_exponent`] with the first `n` at which each
/// holds, using the default order `v_n = ⌊n/2⌋`. Scans `n ≤ limit`.
pub fn hypothesis_thresholds(variant: Variant, limit: u32) -> Result<Vec<Hypothesis>> {
    variant.validate()?;
    let mut out: Vec<Hypothesis> = Vec::new();
    for n in 1..=limit {
        let rep = logbound_exponent(n, default_order(n), 0.5, variant, 1.0, LogBoundOptions { grid: 2, tol: 1.0 });
        let Ok(rep) = rep else { continue };
        if out.is_empty() {
            out = rep
                .hypotheses
                .iter()
                .map(|h| Hypothesis {
                    holds: false,
                    ..h.clone()
                })
                .collect();
        }
        for (slot, h) in out.iter_mut().zip(&rep.hypotheses) {
            if h.holds && slot.first_n.is_none() {
                slot.first_n = Some(u64::from(n));
                slot.holds = true;
            }
        }
        if out.iter().all(|h| h.first_n.is_some()) {
            break;
        }
    }
    Ok(out)
}

/// Smallest `n ≥ start` at which the bound is negative, searching up to
/// `limit`. Doubles the step until a negative value is found and then
/// bisects, which assumes a single sign change in the searched range.
pub fn find_negative_onset(
    z: f64,
    variant: Variant,
    c: f64,
    opts: LogBoundOptions,
    start: u32,
    limit: u32,
) -> Result<Option<u32>> {
    let negative = |n: u32| -> Result<bool> {
        match logbound_exponent(n, default_order(n), z, variant, c, opts) {
            Ok(r) => Ok(r.is_negative()),
            Err(Error::Parameter(m)) if m.contains("not applicable") => Ok(false),
            Err(e) => Err(e),
        }
    };
    if negative(start)? {
        return Ok(Some(start));
    }
    let (mut lo, mut step) = (start, 1u32);
    let hi = loop {
        let next = lo.saturating_add(step).min(limit);
        if negative(next)? {
            break next;
        }
        if next >= limit {
            return Ok(None);
        }
        lo = next;
        step = step.saturating_mul(2);
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if negative(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Scan of `h2((b/3 − 1/2 + x)/x)` over `x ∈ [1/2 − b/4, 1 − 7b/8]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyCheck {
    pub width: f64,
    pub points: usize,
    pub min_arg: f64,
    pub max_arg: f64,
    pub max_h2: f64,
}

impl EntropyCheck {
    /// Every argument lies in `(0, 1/2]` and every value is below 1.
    pub fn passes(&self) -> bool {
        self.min_arg > 0.0 && self.max_arg <= 0.5 && self.max_h2 < 1.0
    }
}

pub fn entropy_argument_check(width: f64, points: usize) -> Result<EntropyCheck> {
    if !(width > 0.0 && width <= 0.8) || points < 2 {
        return param(format!("need b in (0, 4/5] and at least two points, got b = {width}"));
    }
    let (lo, hi) = (0.5 - width / 4.0, 1.0 - 7.0 * width / 8.0);
    let mut check = EntropyCheck {
        width,
        points,
        min_arg: f64::INFINITY,
        max_arg: f64::NEG_INFINITY,
        max_h2: f64::NEG_INFINITY,
    };
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let arg = (width / 3.0 - 0.5 + x) / x;
        check.min_arg = check.min_arg.min(arg);
        check.max_arg = check.max_arg.max(arg);
        check.max_h2 = check.max_h2.max(h2_unchecked(arg));
    }
    Ok(check)
}
