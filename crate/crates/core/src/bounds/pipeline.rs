//! Per-`n` bound on the block error probability, assuming a bit error
//! model `P_b(n)`.
//!
//! The randomized block decoder errs either on a codeword at distance below
//! `2^{n(1−β)}` (bounded by [`logbound_exponent`]) or above it. In the second
//! case at least a `2^{−nβ}` fraction of bits is wrong, so that term is at
//! most `2·P_b·2^{nβ}`. The refined window replaces `nβ` by `n^{1/2+β′}`.

use rayon::prelude::*;
use serde::Serialize;

use super::logbound::{logbound_exponent, LogBoundOptions};
use super::Variant;
use crate::error::{param, Error, Result};
use crate::extreal::ExtReal;

/// The default code order `⌊n/2⌋`, the integer nearest `n/2` with ties
/// rounded down.
pub fn default_order(n: u32) -> u32 {
    n / 2
}

/// `n = 40..=200`, then growing by 10% per step up to `10⁶`.
pub fn default_n_grid() -> Vec<u32> {
    let mut out: Vec<u32> = (40..=200).collect();
    let mut n = 200u32;
    while n < 1_000_000 {
        n = (f64::from(n) * 1.1).ceil() as u32;
        out.push(n);
    }
    out
}

/// Assumed decay of the bit-MAP error probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum BitErrorModel {
    /// `P_b = C_b·2^{−nδ}`.
    Polynomial { delta: f64 },
    /// `P_b = C_b·2^{−n^{1/2+δ′}}`.
    Stretched { delta_prime: f64 },
}

impl BitErrorModel {
    /// `log₂ P_b(n)` without the constant.
    fn log2_rate(&self, n: f64) -> f64 {
        match *self {
            BitErrorModel::Polynomial { delta } => -n * delta,
            BitErrorModel::Stretched { delta_prime } => -n.powf(0.5 + delta_prime),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    pub n_values: Vec<u32>,
    pub model: BitErrorModel,
    pub z: f64,
    pub c_b: f64,
    pub c: f64,
    /// `β` (or `β′`); half the model's `δ` (or `δ′`) when unset.
    pub beta: Option<f64>,
    pub opts: LogBoundOptions,
}

impl PipelineParams {
    pub fn variant(&self) -> Variant {
        match self.model {
            BitErrorModel::Polynomial { delta } => Variant::Polynomial {
                beta: self.beta.unwrap_or(delta / 2.0),
            },
            BitErrorModel::Stretched { delta_prime } => Variant::Refined {
                beta_prime: self.beta.unwrap_or(delta_prime / 2.0),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let (d, name) = match self.model {
            BitErrorModel::Polynomial { delta } => (delta, "δ"),
            BitErrorModel::Stretched { delta_prime } => (delta_prime, "δ′"),
        };
        if !(d > 0.0 && d.is_finite()) {
            return param(format!("{name} must be positive, got {d}"));
        }
        if !(self.c_b > 0.0 && self.c_b.is_finite()) {
            return param(format!("C_b must be positive, got {}", self.c_b));
        }
        if !(self.z > 0.0 && self.z < 1.0) {
            return param(format!("z must lie in (0, 1), got {}", self.z));
        }
        self.variant().validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineRow {
    pub n: u32,
    pub v_n: u32,
    /// `log₂` of the low-distance bound; `0` when the bound is inapplicable.
    pub low_log2: ExtReal,
    /// `log₂(2·C_b·P_b·2^{nβ})`.
    pub high_log2: f64,
    /// `log₂(low + high)`.
    pub total_log2: ExtReal,
    /// `log₂ min(1, low + high)`.
    pub clipped_log2: f64,
    pub x_star: Option<f64>,
    pub applicable: bool,
}

impl PipelineRow {
    pub const CSV_HEADER: &'static str = "n,v_n,low_log2,high_log2,total_log2,x_star,clipped_log2";

    pub fn to_csv(&self) -> String {
        let x = self.x_star.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.n, self.v_n, self.low_log2, self.high_log2, self.total_log2, x, self.clipped_log2
        )
    }
}

pub fn theorem_pipeline(params: &PipelineParams) -> Result<Vec<PipelineRow>> {
    params.validate()?;
    let variant = params.variant();
    params
        .n_values
        .par_iter()
        .map(|&n| pipeline_row(params, variant, n))
        .collect()
}

fn pipeline_row(p: &PipelineParams, variant: Variant, n: u32) -> Result<PipelineRow> {
    let nf = f64::from(n);
    let v_n = default_order(n);
    let (low_log2, x_star, applicable) = match logbound_exponent(n, v_n, p.z, variant, p.c, p.opts) {
        Ok(r) => (r.exponent, Some(r.x_star), true),
        Err(Error::Parameter(m)) if m.contains("not applicable") => (ExtReal::ZERO, None, false),
        Err(e) => return Err(e),
    };
    let fraction_log2 = nf * variant.width(nf);
    let high_log2 = 1.0 + p.c_b.log2() + p.model.log2_rate(nf) + fraction_log2;
    let total_log2 = log2_sum(low_log2, high_log2);
    let clipped_log2 = if total_log2.is_positive() { 0.0 } else { total_log2.to_f64() };
    Ok(PipelineRow {
        n,
        v_n,
        low_log2,
        high_log2,
        total_log2,
        clipped_log2,
        x_star,
        applicable,
    })
}

/// `log₂(2^a + 2^b)` where `a` may be out of `f64` range.
fn log2_sum(a: ExtReal, b: f64) -> ExtReal {
    let af = a.to_f64();
    if af == f64::INFINITY {
        return a;
    }
    if af == f64::NEG_INFINITY {
        return ExtReal::from_f64(b);
    }
    let (hi, lo) = if af >= b { (af, b) } else { (b, af) };
    ExtReal::from_f64(hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2)
}

/// Monotonicity summary of a pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineSummary {
    /// The clipped bound never increases along the rows.
    pub clipped_non_increasing: bool,
    /// The clipped bound strictly decreases from the first row below 1 on.
    pub strictly_decreasing_below_one: bool,
    /// First `n` whose bound is below `target`.
    pub first_below_target: Option<u32>,
    pub target: f64,
    /// `n` with the largest unclipped total.
    pub unclipped_peak_n: u32,
}

pub fn summarize(rows: &[PipelineRow], target: f64) -> Result<PipelineSummary> {
    if rows.is_empty() {
        return param("empty pipeline");
    }
    let clipped: Vec<f64> = rows.iter().map(|r| r.clipped_log2).collect();
    let non_increasing = clipped.windows(2).all(|w| w[1] <= w[0]);
    let first_sub_one = clipped.iter().position(|&c| c < 0.0);
    let strictly = first_sub_one.is_some_and(|i| clipped[i..].windows(2).all(|w| w[1] < w[0]));
    let t = target.log2();
    let peak = rows
        .iter()
        .fold(&rows[0], |best, r| if r.total_log2 > best.total_log2 { r } else { best });
    Ok(PipelineSummary {
        clipped_non_increasing: non_increasing,
        strictly_decreasing_below_one: strictly,
        first_below_target: rows.iter().find(|r| r.clipped_log2 < t).map(|r| r.n),
        target,
        unclipped_peak_n: peak.n,
    })
}

/// Least-squares fit `y ≈ a·n^p` through the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub power: f64,
    pub scale: f64,
    /// `‖a·n^p − y‖₂ / ‖y‖₂`.
    pub rel_rms: f64,
    /// `max |a·n^p − y| / |y|`.
    pub max_rel: f64,
    pub points: usize,
}

pub fn fit_power_scale(ns: &[f64], ys: &[f64], power: f64) -> Result<PowerFit> {
    if ns.len() != ys.len() || ns.is_empty() {
        return param("the fit needs matching, non-empty samples");
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.powf(power)).collect();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let scale = sxy / sxx;
    let (mut r2, mut y2, mut max_rel) = (0.0, 0.0, 0.0f64);
    for (x, y) in xs.iter().zip(ys) {
        let r = scale * x - y;
        r2 += r * r;
        y2 += y * y;
        max_rel = max_rel.max((r / y).abs());
    }
    Ok(PowerFit {
        power,
        scale,
        rel_rms: (r2 / y2).sqrt(),
        max_rel,
        points: ns.len(),
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let m = xs.len();
    if m < 2 || ys.len() != m {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| LinearFit {
        slope: sxy / sxx,
        intercept: my - sxy / sxx * mx,
        points: m,
    })
}

/// Empirical decay exponents of the two pipeline terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    /// Polynomial model: `−log₂ high ≈ ρn + const`.
    pub high_linear: Option<LinearFit>,
    /// Stretched model: `−log₂ high ≈ a·n^{1/2+δ′}`.
    pub high_power: Option<PowerFit>,
    /// `log₂(−log₂ low) ≈ γn + const` over rows where the low bound is
    /// below 1.
    pub low_doubly_exponential: Option<LinearFit>,
    /// Which term is larger at the last row, `"low"` or `"high"`.
    pub dominant_at_end: &'static str,
    /// First row from which the high term stays the larger one.
    pub high_dominates_from: Option<u32>,
}

pub fn decay_report(rows: &[PipelineRow], model: BitErrorModel) -> Result<DecayReport> {
    let last = rows.last().ok_or_else(|| Error::Parameter("empty pipeline".into()))?;
    let ns: Vec<f64> = rows.iter().map(|r| f64::from(r.n)).collect();
    let minus_high: Vec<f64> = rows.iter().map(|r| -r.high_log2).collect();
    let (high_linear, high_power) = match model {
        BitErrorModel::Polynomial { .. } => (fit_line(&ns, &minus_high), None),
        BitErrorModel::Stretched { delta_prime } => (None, Some(fit_power_scale(&ns, &minus_high, 0.5 + delta_prime)?)),
    };
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.applicable && r.low_log2.is_negative())
        .map(|r| (f64::from(r.n), r.low_log2.log2_abs()))
        .unzip();
    let high_wins = |r: &PipelineRow| ExtReal::from_f64(r.high_log2) > r.low_log2;
    let from = rows.iter().rposition(|r| !high_wins(r)).map_or(0, |i| i + 1);
    Ok(DecayReport {
        high_linear,
        high_power,
        low_doubly_exponential: fit_line(&lx, &ly),
        dominant_at_end: if high_wins(last) { "high" } else { "low" },
        high_dominates_from: rows.get(from).map(|r| r.n),
    })
}
