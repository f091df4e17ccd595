use std::path::PathBuf;
use std::process::ExitCode;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use rmlab::bounds::{
    binom_tail_bound, block_error_union_bound_surd, cw_log_bound, decay_report, default_n_grid, default_order,
    find_negative_onset, hypothesis_thresholds, logbound_exponent, rate_window, summarize, theorem_pipeline,
    BitErrorModel, LogBoundOptions, PipelineParams, Variant,
};
use rmlab::channels::{BmsChannel, ChannelKind};
use rmlab::decoders::{exact_analysis, exact_error_report, mc_error_report, Engine, Estimate, InequalityCheck, McOptions};
use rmlab::rational::{parse_rational, to_f64};
use rmlab::rmcode::{EnumerationCap, RmCode};
use rmlab::spectrum::{
    calibrate_constant, counting_lower_bound, exact_distribution, kl_upper_bound, BoundParams, WeightDistribution,
};
use rmlab::{Error, Result};

use crate::config::ExperimentConfig;
use crate::output::{dec, emit, frac, num, pretty, to_value, Format, Table};
use crate::{BoundArgs, BoundKind, CodeArgs, Command, OutputArgs};

const DEFAULT_TRIALS: u64 = 10_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_ONSET_LIMIT: u32 = 10_000_000;
const DEFAULT_CALIBRATION_N: u32 = 10;
const DEFAULT_TARGET: f64 = 1e-3;

pub fn dispatch(cmd: Command, cfg: &ExperimentConfig) -> Result<ExitCode> {
    let cap = EnumerationCap::from_env()?;
    match cmd {
        Command::CodeInfo { code, output } => code_info(cfg, &code, &output, cap),
        Command::Weights { code, alpha, output } => weights(cfg, &code, alpha.as_deref(), &output, cap),
        Command::Verify {
            code,
            channel,
            engine,
            distances,
            output,
        } => verify(cfg, &code, channel.as_deref(), engine.as_deref(), distances, &output, cap),
        Command::Simulate {
            code,
            channel,
            params,
            trials,
            seed,
            output,
        } => simulate(cfg, &code, channel.as_deref(), params.as_deref(), trials, seed, &output, cap),
        Command::Bounds { kind, p, output } => bounds(cfg, kind, &p, &output, cap),
        Command::Sweep {
            codes,
            code,
            channel,
            params,
            output,
        } => sweep(cfg, codes.as_deref(), &code, channel.as_deref(), params.as_deref(), &output, cap),
    }
}

struct Sink {
    format: Format,
    out: Option<PathBuf>,
}

impl Sink {
    fn new(cfg: &ExperimentConfig, o: &OutputArgs, allowed: &[Format]) -> Result<Self> {
        let format = cfg.or("format", o.format.as_deref().map(str::parse).transpose().map_err(Error::Parameter)?, allowed[0])?;
        if !allowed.contains(&format) {
            return Err(Error::Parameter(format!("format {format:?} is not available for this command")));
        }
        let out = cfg.get("out", o.out.clone())?;
        Ok(Self { format, out })
    }

    fn write(&self, text: &str) -> Result<()> {
        emit(text, self.out.as_deref())
    }

    /// Lines that accompany a data file: stdout when the data goes to a
    /// file, stderr otherwise.
    fn note(&self, line: &str) {
        if self.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }

    fn table(&self, t: &Table, head: Value) -> Result<()> {
        match self.format {
            Format::Json => {
                let mut v = head;
                v["rows"] = t.to_json_rows();
                self.write(&pretty(&v))
            }
            _ => self.write(&t.to_csv()),
        }
    }
}

fn code(cfg: &ExperimentConfig, c: &CodeArgs) -> Result<RmCode> {
    RmCode::new(cfg.require("n", c.n)?, cfg.require("v", c.v)?)
}

/// `Ok(None)` when the request exceeds a cap, so callers can skip optional
/// exact columns.
fn within_cap<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::Capacity(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn code_info(cfg: &ExperimentConfig, c: &CodeArgs, o: &OutputArgs, cap: EnumerationCap) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Text, Format::Json, Format::Csv])?;
    let rm = code(cfg, c)?;
    let exhaustive = within_cap(rm.min_distance_exhaustive(cap))?;
    if exhaustive.is_some_and(|d| d != rm.formula_min_distance()) {
        return Err(Error::Inconsistent(format!(
            "exhaustive minimum distance {} differs from 2^(n-v) = {}",
            exhaustive.unwrap(),
            rm.formula_min_distance()
        )));
    }
    let rate = rm.rate();
    match sink.format {
        Format::Text => {
            let mut s = format!(
                "RM({},{})\nN = {}\nk = {}\nR = {} ({})\nd = {} (formula)\n",
                rm.n(),
                rm.v(),
                rm.length(),
                rm.dimension(),
                rate,
                to_f64(&rate),
                rm.formula_min_distance()
            );
            match exhaustive {
                Some(d) => s.push_str(&format!("d = {d} (exhaustive)\n")),
                None => s.push_str(&format!("d exhaustive: skipped, k = {} above cap {}\n", rm.dimension(), cap.max_k)),
            }
            sink.write(&s)?;
        }
        _ => {
            let mut t = Table::new(&["n", "v", "length", "dimension", "rate", "rate_decimal", "d_formula", "d_exhaustive"]);
            t.push(vec![
                json!(rm.n()),
                json!(rm.v()),
                json!(rm.length()),
                json!(rm.dimension()),
                frac(&rate),
                dec(&rate),
                json!(rm.formula_min_distance()),
                json!(exhaustive),
            ]);
            if sink.format == Format::Json {
                let row = t.to_json_rows()[0].clone();
                sink.write(&pretty(&row))?;
            } else {
                sink.write(&t.to_csv())?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn weights(cfg: &ExperimentConfig, c: &CodeArgs, alpha: Option<&str>, o: &OutputArgs, cap: EnumerationCap) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Csv, Format::Json])?;
    let rm = code(cfg, c)?;
    let alphas = cfg
        .list("alpha", alpha)
        .unwrap_or_default()
        .iter()
        .map(|a| parse_rational(a))
        .collect::<Result<Vec<_>>>()?;
    if let Some(a) = alphas.iter().find(|a| **a < BigRational::zero()) {
        return Err(Error::Parameter(format!("alpha must be non-negative, got {a}")));
    }
    let dist = exact_distribution(&rm, cap)?;
    dist.check_invariants()?;
    let queries: Vec<(String, u64)> = alphas.iter().map(|a| (a.to_string(), dist.cumulative(a))).collect();
    match sink.format {
        Format::Json => {
            let counts: Vec<Value> = dist
                .counts()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(w, c)| json!({"weight": w, "count": c}))
                .collect();
            let cumulative: Vec<Value> = queries.iter().map(|(a, w)| json!({"alpha": a, "count": w})).collect();
            sink.write(&pretty(&json!({
                "n": rm.n(),
                "v": rm.v(),
                "length": rm.length(),
                "total": dist.total(),
                "counts": counts,
                "cumulative": cumulative,
            })))?;
        }
        _ => {
            sink.write(&dist.to_csv())?;
            for (a, w) in &queries {
                sink.note(&format!("W({a}) = {w}"));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_engine(s: &str) -> Result<Engine> {
    match s.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(Engine::Auto),
        "generic" => Ok(Engine::Generic),
        "erasure" | "erasure-patterns" => Ok(Engine::ErasurePatterns),
        other => Err(Error::Parameter(format!("unknown engine {other:?} (expected auto, generic or erasure)"))),
    }
}

/// One audited relation; the right side may be an irrational bound shown as
/// text.
struct Audit {
    name: String,
    relation: &'static str,
    lhs: Value,
    lhs_decimal: f64,
    rhs: Value,
    rhs_decimal: f64,
    holds: bool,
}

impl From<InequalityCheck> for Audit {
    fn from(c: InequalityCheck) -> Self {
        Self {
            holds: c.holds(),
            relation: if c.equality { "=" } else { "<=" },
            lhs: frac(&c.lhs),
            lhs_decimal: to_f64(&c.lhs),
            rhs: frac(&c.rhs),
            rhs_decimal: to_f64(&c.rhs),
            name: c.name,
        }
    }
}

impl Audit {
    fn text(&self) -> String {
        let verdict = if self.holds { "ok" } else { "VIOLATED" };
        let show = |v: &Value, d: f64| match v {
            Value::String(s) => format!("{s} ({d})"),
            other => format!("{other} ({d})"),
        };
        format!(
            "[{verdict}] {}: {} {} {}",
            self.name,
            show(&self.lhs, self.lhs_decimal),
            self.relation,
            show(&self.rhs, self.rhs_decimal)
        )
    }
}

/// `P_B ≤ ½ Σ_w z^w c_w` when the spectrum is enumerable and `z²` is
/// rational.
fn union_audit(rm: &RmCode, ch: &BmsChannel, p_block: &BigRational, cap: EnumerationCap) -> Result<Option<Audit>> {
    let Some(q) = ch.bhattacharyya_squared_exact() else {
        return Ok(None);
    };
    let Some(dist) = within_cap(exact_distribution(rm, cap))? else {
        return Ok(None);
    };
    let bound = block_error_union_bound_surd(&dist, &q);
    Ok(Some(Audit {
        name: "P_B <= 1/2 sum_w z^w c_w".into(),
        relation: "<=",
        lhs: frac(p_block),
        lhs_decimal: to_f64(p_block),
        rhs: Value::String(bound.to_string()),
        rhs_decimal: bound.to_f64(),
        holds: bound.cmp_rational(p_block) != std::cmp::Ordering::Less,
    }))
}

fn verify(
    cfg: &ExperimentConfig,
    c: &CodeArgs,
    channel: Option<&str>,
    engine: Option<&str>,
    distances: bool,
    o: &OutputArgs,
    cap: EnumerationCap,
) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Text, Format::Json, Format::Csv])?;
    let rm = code(cfg, c)?;
    let spec: String = cfg.require("channel", channel.map(String::from))?;
    let ch = BmsChannel::parse_spec(&spec)?;
    let engine = parse_engine(&cfg.or("engine", engine.map(String::from), "auto".to_string())?)?;
    let distances = distances || cfg.or("distances", None, false)?;

    let a = exact_analysis(&rm, &ch, cap, engine, distances)?;
    let r = &a.report;
    let mut audits: Vec<Audit> = a.checks().into_iter().map(Audit::from).collect();
    if matches!(ch.kind(), ChannelKind::Bec(_)) {
        audits.push(InequalityCheck::eq("BEC: P_b = P_br", r.p_bit.clone(), r.p_bit_rand.clone()).into());
        audits.push(InequalityCheck::eq("BEC: P_B = P_Br", r.p_block.clone(), r.p_block_rand.clone()).into());
    }
    if distances {
        for t in 0..=rm.length() as u64 {
            let s = a.distance_split(t)?;
            let mut f: Audit = s.fraction_check().into();
            f.name = format!("T = {t}: {}", f.name);
            audits.push(f);
        }
    }
    audits.extend(union_audit(&rm, &ch, &r.p_block, cap)?);
    let all_hold = audits.iter().all(|a| a.holds);
    let engine_name = to_value(&a.engine);

    match sink.format {
        Format::Text => {
            let mut s = format!(
                "RM({},{}) over {spec}, engine {}, {} posterior rows\n",
                rm.n(),
                rm.v(),
                engine_name.as_str().unwrap_or_default(),
                a.rows
            );
            for (name, v) in r.values() {
                s.push_str(&format!("{name:<4} = {} ({})\n", v, to_f64(v)));
            }
            for audit in &audits {
                s.push_str(&audit.text());
                s.push('\n');
            }
            let failed = audits.iter().filter(|a| !a.holds).count();
            s.push_str(&format!("{} checks, {failed} violated\n", audits.len()));
            sink.write(&s)?;
        }
        Format::Json => {
            let values: serde_json::Map<String, Value> = r
                .values()
                .iter()
                .map(|(name, v)| (name.to_string(), json!({"exact": frac(v), "decimal": dec(v)})))
                .collect();
            let checks: Vec<Value> = audits
                .iter()
                .map(|a| {
                    json!({
                        "name": a.name,
                        "relation": a.relation,
                        "lhs": a.lhs,
                        "lhs_decimal": num(a.lhs_decimal),
                        "rhs": a.rhs,
                        "rhs_decimal": num(a.rhs_decimal),
                        "holds": a.holds,
                    })
                })
                .collect();
            sink.write(&pretty(&json!({
                "n": rm.n(),
                "v": rm.v(),
                "channel": spec,
                "engine": engine_name,
                "distances": distances,
                "rows": a.rows,
                "values": values,
                "checks": checks,
                "all_hold": all_hold,
            })))?;
        }
        Format::Csv => {
            let mut t = Table::new(&["kind", "name", "lhs", "lhs_decimal", "relation", "rhs", "rhs_decimal", "holds"]);
            for (name, v) in r.values() {
                t.push(vec![json!("value"), json!(name), frac(v), dec(v), Value::Null, Value::Null, Value::Null, Value::Null]);
            }
            for a in &audits {
                t.push(vec![
                    json!("check"),
                    json!(a.name),
                    a.lhs.clone(),
                    num(a.lhs_decimal),
                    json!(a.relation),
                    a.rhs.clone(),
                    num(a.rhs_decimal),
                    json!(a.holds),
                ]);
            }
            sink.write(&t.to_csv())?;
        }
    }
    if all_hold {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: at least one audited relation is violated");
        Ok(ExitCode::from(4))
    }
}

/// A single spec (`bsc:1/4`) or a family swept over a parameter list.
fn channels(cfg: &ExperimentConfig, channel: Option<&str>, params: Option<&str>) -> Result<Vec<(String, BmsChannel)>> {
    let spec: String = cfg.require("channel", channel.map(String::from))?;
    let params = cfg.list("params", params);
    if spec.contains(':') {
        if params.is_some() {
            return Err(Error::Parameter(format!("channel {spec:?} is fully specified; drop params")));
        }
        return Ok(vec![(spec.clone(), BmsChannel::parse_spec(&spec)?)]);
    }
    let family = spec.trim().to_ascii_lowercase();
    if family != "bec" && family != "bsc" {
        return Err(Error::Parameter(format!("a parameter sweep needs family bec or bsc, got {family:?}")));
    }
    let params = params
        .filter(|p| !p.is_empty())
        .ok_or_else(|| Error::Parameter(format!("channel family {family} needs params (e.g. 0.1,0.2)")))?;
    params
        .iter()
        .map(|p| {
            let label = format!("{family}:{}", parse_rational(p)?);
            Ok((label.clone(), BmsChannel::parse_spec(&label)?))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cfg: &ExperimentConfig,
    c: &CodeArgs,
    channel: Option<&str>,
    params: Option<&str>,
    trials: Option<u64>,
    seed: Option<u64>,
    o: &OutputArgs,
    cap: EnumerationCap,
) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Csv, Format::Json])?;
    let rm = code(cfg, c)?;
    let chans = channels(cfg, channel, params)?;
    let trials = cfg.or("trials", trials, DEFAULT_TRIALS)?;
    let seed = cfg.or("seed", seed, DEFAULT_SEED)?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let opts = McOptions { trials, seed };
    let mut t = Table::new(&[
        "channel",
        "estimator",
        "trials",
        "seed",
        "mean",
        "std_error",
        "ci_low",
        "ci_high",
        "exact",
        "exact_decimal",
        "deviation_sigmas",
    ]);
    for (label, ch) in &chans {
        let mc = mc_error_report(&rm, ch, opts, cap)?;
        let exact = within_cap(exact_error_report(&rm, ch, cap))?;
        let est: [(&str, Estimate, Option<&BigRational>); 4] = [
            ("P_b", mc.p_bit, exact.as_ref().map(|e| &e.p_bit)),
            ("P_B", mc.p_block, exact.as_ref().map(|e| &e.p_block)),
            ("P_br", mc.p_bit_rand, exact.as_ref().map(|e| &e.p_bit_rand)),
            ("P_Br", mc.p_block_rand, exact.as_ref().map(|e| &e.p_block_rand)),
        ];
        for (name, e, x) in est {
            let dev = x.and_then(|x| {
                let p = to_f64(x);
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                (sigma > 0.0).then(|| num((e.mean - p) / sigma))
            });
            t.push(vec![
                json!(label),
                json!(name),
                json!(trials),
                json!(seed),
                num(e.mean),
                num(e.std_error),
                num(e.mean - e.half_width),
                num(e.mean + e.half_width),
                x.map_or(Value::Null, frac),
                x.map_or(Value::Null, dec),
                dev.unwrap_or(Value::Null),
            ]);
        }
    }
    let labels: Vec<&str> = chans.iter().map(|(l, _)| l.as_str()).collect();
    sink.table(
        &t,
        json!({"command": "simulate", "params": {"n": rm.n(), "v": rm.v(), "channels": labels, "trials": trials, "seed": seed}}),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn parse_codes(cfg: &ExperimentConfig, codes: Option<&str>, c: &CodeArgs) -> Result<Vec<RmCode>> {
    match cfg.list("codes", codes) {
        Some(list) => list
            .iter()
            .map(|s| {
                let (n, v) = s
                    .split_once(':')
                    .ok_or_else(|| Error::Parameter(format!("code {s:?} is not of the form n:v")))?;
                let p = |x: &str| x.trim().parse::<u32>().map_err(|e| Error::Parameter(format!("code {s:?}: {e}")));
                RmCode::new(p(n)?, p(v)?)
            })
            .collect(),
        None => Ok(vec![code(cfg, c)?]),
    }
}

fn sweep(
    cfg: &ExperimentConfig,
    codes: Option<&str>,
    c: &CodeArgs,
    channel: Option<&str>,
    params: Option<&str>,
    o: &OutputArgs,
    cap: EnumerationCap,
) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Csv, Format::Json])?;
    let codes = parse_codes(cfg, codes, c)?;
    let chans = channels(cfg, channel, params)?;
    let mut t = Table::new(&[
        "n",
        "v",
        "channel",
        "p_bit",
        "p_bit_decimal",
        "p_block",
        "p_block_decimal",
        "p_bit_rand",
        "p_bit_rand_decimal",
        "p_block_rand",
        "p_block_rand_decimal",
        "union_bound",
        "union_bound_decimal",
        "checks_hold",
    ]);
    let mut all = true;
    for rm in &codes {
        for (label, ch) in &chans {
            let a = exact_analysis(rm, ch, cap, Engine::Auto, false)?;
            let r = &a.report;
            let union = union_audit(rm, ch, &r.p_block, cap)?;
            let mut holds = a.checks().iter().all(InequalityCheck::holds);
            if let Some(u) = &union {
                holds &= u.holds;
            }
            all &= holds;
            let mut row = vec![json!(rm.n()), json!(rm.v()), json!(label)];
            for (_, v) in r.values() {
                row.push(frac(v));
                row.push(dec(v));
            }
            match &union {
                Some(u) => {
                    row.push(u.rhs.clone());
                    row.push(num(u.rhs_decimal));
                }
                None => row.extend([Value::Null, Value::Null]),
            }
            row.push(json!(holds));
            t.push(row);
        }
    }
    let code_names: Vec<String> = codes.iter().map(|c| format!("{}:{}", c.n(), c.v())).collect();
    let labels: Vec<&str> = chans.iter().map(|(l, _)| l.as_str()).collect();
    sink.table(&t, json!({"command": "sweep", "params": {"codes": code_names, "channels": labels}}))?;
    if all {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: at least one audited relation is violated");
        Ok(ExitCode::from(4))
    }
}

fn variant(cfg: &ExperimentConfig, p: &BoundArgs) -> Result<Variant> {
    let name: String = cfg.or("variant", p.variant.clone(), "polynomial".into())?;
    let beta: f64 = cfg.require("beta", p.beta)?;
    let v = match name.as_str() {
        "polynomial" => Variant::Polynomial { beta },
        "refined" => Variant::Refined { beta_prime: beta },
        other => return Err(Error::Parameter(format!("unknown variant {other:?} (expected polynomial or refined)"))),
    };
    v.validate()?;
    Ok(v)
}

/// `n_min..=n_max` if both are set, else the single `n`, else `fallback`.
fn n_values(cfg: &ExperimentConfig, p: &BoundArgs, fallback: Option<Vec<u32>>) -> Result<Vec<u32>> {
    let lo: Option<u32> = cfg.get("n_min", p.n_min)?;
    let hi: Option<u32> = cfg.get("n_max", p.n_max)?;
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo <= hi => Ok((lo..=hi).collect()),
        (Some(lo), Some(hi)) => Err(Error::Parameter(format!("require n_min ≤ n_max, got {lo} > {hi}"))),
        (None, None) => match cfg.get("n", p.n)? {
            Some(n) => Ok(vec![n]),
            None => fallback.ok_or_else(|| Error::Parameter("missing parameter n (or n_min and n_max)".into())),
        },
        _ => Err(Error::Parameter("n_min and n_max must be given together".into())),
    }
}

fn logbound_options(cfg: &ExperimentConfig, p: &BoundArgs) -> Result<LogBoundOptions> {
    let d = LogBoundOptions::default();
    let grid = cfg.or("grid", p.grid, d.grid)?;
    if grid < 2 {
        return Err(Error::Parameter(format!("grid needs at least 2 points, got {grid}")));
    }
    Ok(LogBoundOptions { grid, ..d })
}

fn bounds(cfg: &ExperimentConfig, kind: BoundKind, p: &BoundArgs, o: &OutputArgs, cap: EnumerationCap) -> Result<ExitCode> {
    let sink = Sink::new(cfg, o, &[Format::Csv, Format::Json])?;
    let z = cfg.or("z", p.z, 0.5)?;
    let c = cfg.or("c", p.c, 1.0)?;
    match kind {
        BoundKind::Pipeline => {
            let model_name: String = cfg.or("model", p.model.clone(), "polynomial".into())?;
            let model = match model_name.as_str() {
                "polynomial" => BitErrorModel::Polynomial {
                    delta: cfg.require("delta", p.delta)?,
                },
                "stretched" => BitErrorModel::Stretched {
                    delta_prime: cfg.require("delta_prime", p.delta_prime)?,
                },
                other => return Err(Error::Parameter(format!("unknown model {other:?} (expected polynomial or stretched)"))),
            };
            let params = PipelineParams {
                n_values: n_values(cfg, p, Some(default_n_grid()))?,
                model,
                z,
                c_b: cfg.or("c_b", p.c_b, 1.0)?,
                c,
                beta: cfg.get("beta", p.beta)?,
                opts: logbound_options(cfg, p)?,
            };
            let target = cfg.or("target", p.target, DEFAULT_TARGET)?;
            if !(target > 0.0 && target < 1.0) {
                return Err(Error::Parameter(format!("target must lie in (0, 1), got {target}")));
            }
            let rows = theorem_pipeline(&params)?;
            let mut t = Table::new(&[
                "n",
                "v_n",
                "low_log2",
                "high_log2",
                "total_log2",
                "x_star",
                "clipped_log2",
                "applicable",
            ]);
            for r in &rows {
                t.push(vec![
                    json!(r.n),
                    json!(r.v_n),
                    to_value(&r.low_log2),
                    num(r.high_log2),
                    to_value(&r.total_log2),
                    r.x_star.map_or(Value::Null, num),
                    num(r.clipped_log2),
                    json!(r.applicable),
                ]);
            }
            let skipped: Vec<u32> = rows.iter().filter(|r| !r.applicable).map(|r| r.n).collect();
            if let (Some(first), Some(last)) = (skipped.first(), skipped.last()) {
                eprintln!(
                    "warning: low-distance bound not applicable for {} of {} values of n (n = {first}..{last}); low term replaced by the trivial bound 1",
                    skipped.len(),
                    rows.len()
                );
            }
            let summary = summarize(&rows, target)?;
            let decay = decay_report(&rows, model)?;
            let n_desc = json!({"first": params.n_values[0], "last": params.n_values[params.n_values.len() - 1], "count": params.n_values.len()});
            sink.table(
                &t,
                json!({
                    "command": "bounds",
                    "kind": "pipeline",
                    "params": {
                        "model": to_value(&model),
                        "z": z,
                        "c_b": params.c_b,
                        "c": c,
                        "variant": to_value(&params.variant()),
                        "n_values": n_desc,
                        "target": target,
                        "grid": params.opts.grid,
                        "tol": params.opts.tol,
                    },
                    "summary": to_value(&summary),
                    "decay": to_value(&decay),
                }),
            )?;
        }
        BoundKind::Logbound => {
            let var = variant(cfg, p)?;
            let ns = n_values(cfg, p, None)?;
            let v_fixed: Option<u32> = cfg.get("v", p.v)?;
            if v_fixed.is_some() && ns.len() > 1 {
                return Err(Error::Parameter("v can only be fixed for a single n".into()));
            }
            let opts = logbound_options(cfg, p)?;
            let mut t = Table::new(&[
                "n",
                "v_n",
                "width",
                "x_lo",
                "x_hi",
                "x_star",
                "exponent",
                "channel_term",
                "counting_term",
                "negative",
                "hypotheses_hold",
            ]);
            let mut reports = Vec::new();
            for &n in &ns {
                let r = logbound_exponent(n, v_fixed.unwrap_or(default_order(n)), z, var, c, opts)?;
                t.push(vec![
                    json!(r.n),
                    json!(r.v_n),
                    num(r.width),
                    num(r.x_lo),
                    num(r.x_hi),
                    num(r.x_star),
                    to_value(&r.exponent),
                    to_value(&r.channel_term),
                    to_value(&r.counting_term),
                    json!(r.is_negative()),
                    json!(r.hypotheses.iter().all(|h| h.holds)),
                ]);
                reports.push(r);
            }
            match sink.format {
                Format::Json => sink.write(&pretty(&json!({
                    "command": "bounds",
                    "kind": "logbound",
                    "params": {"variant": to_value(&var), "z": z, "c": c, "n_values": ns, "v": v_fixed, "grid": opts.grid, "tol": opts.tol},
                    "rows": to_value(&reports),
                })))?,
                _ => sink.write(&t.to_csv())?,
            }
        }
        BoundKind::Onset => {
            let var = variant(cfg, p)?;
            let opts = logbound_options(cfg, p)?;
            let start = cfg.or("start", p.start, 1)?;
            let limit = cfg.or("limit", p.limit, DEFAULT_ONSET_LIMIT)?;
            if start == 0 || start > limit {
                return Err(Error::Parameter(format!("require 1 ≤ start ≤ limit, got start = {start}, limit = {limit}")));
            }
            let n0 = find_negative_onset(z, var, c, opts, start, limit)?;
            let hyps = hypothesis_thresholds(var, limit)?;
            let mut t = Table::new(&["condition", "first_n"]);
            t.push(vec![json!("log-bound exponent < 0"), json!(n0)]);
            for h in &hyps {
                t.push(vec![json!(h.name), json!(h.first_n)]);
            }
            sink.table(
                &t,
                json!({"command": "bounds", "kind": "onset", "params": {"variant": to_value(&var), "z": z, "c": c, "start": start, "limit": limit, "grid": opts.grid}}),
            )?;
        }
        BoundKind::Window => {
            let var = variant(cfg, p)?;
            let ns = n_values(cfg, p, None)?;
            let mut t = Table::new(&["n", "lower", "upper", "width", "contains_default_order"]);
            for &n in &ns {
                let w = rate_window(n, var)?;
                t.push(vec![
                    json!(n),
                    num(w.lower),
                    num(w.upper),
                    num(var.width(f64::from(n))),
                    json!(w.contains(default_order(n))),
                ]);
            }
            sink.table(&t, json!({"command": "bounds", "kind": "window", "params": {"variant": to_value(&var), "n_values": ns}}))?;
        }
        BoundKind::Tail => {
            let n: u64 = cfg.require("n", p.n.map(u64::from))?;
            let ks: Vec<u64> = match cfg.get("k", p.k)? {
                Some(k) => vec![k],
                None => (0..=n / 2).collect(),
            };
            let mut t = Table::new(&["n", "k", "exact", "bound_log2", "holds"]);
            for k in ks {
                let b = binom_tail_bound(n, k)?;
                t.push(vec![json!(b.n), json!(b.k), json!(b.exact.to_string()), num(b.bound_log2), json!(b.holds)]);
            }
            sink.table(&t, json!({"command": "bounds", "kind": "tail", "params": {"n": n, "k": cfg.get::<u64>("k", p.k)?}}))?;
        }
        BoundKind::Kl => {
            let n: u32 = cfg.require("n", p.n)?;
            let v: u32 = cfg.require("v", p.v)?;
            let eps = cfg
                .rational("eps", p.eps.as_deref())?
                .ok_or_else(|| Error::Parameter("missing parameter eps (flag --eps or config key eps)".into()))?;
            let ells: Vec<u32> = match cfg.get("ell", p.ell)? {
                Some(l) => vec![l],
                None => (1..v).collect(),
            };
            if ells.is_empty() {
                return Err(Error::Parameter(format!("no ell in [1, v-1] for v = {v}")));
            }
            let dist = within_cap(exact_distribution(&RmCode::new(n, v)?, cap))?;
            let mut t = Table::new(&[
                "n",
                "v",
                "ell",
                "eps",
                "alpha",
                "log2_w",
                "upper_log2",
                "lower_log2",
                "upper_holds",
                "lower_holds",
            ]);
            for ell in ells {
                let bp = BoundParams::new(v, ell, eps.clone(), c)?;
                let ub = kl_upper_bound(n, v, &bp)?;
                let lb = counting_lower_bound(n, v, ell)?;
                let alpha = bp.alpha();
                let (log2_w, upper, lower) = match &dist {
                    Some(d) => {
                        let w = d.cumulative(&alpha);
                        (num((w as f64).log2()), json!((w as f64).log2() <= ub), json!(pow2_le(&lb, w)))
                    }
                    None => (Value::Null, Value::Null, Value::Null),
                };
                t.push(vec![
                    json!(n),
                    json!(v),
                    json!(ell),
                    frac(&eps),
                    frac(&alpha),
                    log2_w,
                    num(ub),
                    json!(lb.to_string()),
                    upper,
                    lower,
                ]);
            }
            sink.table(
                &t,
                json!({"command": "bounds", "kind": "kl", "params": {"n": n, "v": v, "eps": eps.to_string(), "c": c, "ell": cfg.get::<u32>("ell", p.ell)?}}),
            )?;
        }
        BoundKind::Cw => {
            let n: u32 = cfg.require("n", p.n)?;
            let v: u32 = cfg.require("v", p.v)?;
            let w_text: String = cfg.require("w", p.w.clone())?;
            let w: BigUint = w_text
                .trim()
                .parse()
                .map_err(|e| Error::Parameter(format!("w must be a positive integer: {e}")))?;
            let var = variant(cfg, p)?;
            let dist = match RmCode::new(n, v) {
                Ok(rm) => within_cap(exact_distribution(&rm, cap))?,
                Err(_) => None,
            };
            let b = cw_log_bound(n, v, &w, c, var, dist.as_ref())?;
            let mut t = Table::new(&["item", "value", "holds"]);
            for (name, val) in b.steps() {
                t.push(vec![json!(name), val.map_or(Value::Null, num), Value::Null]);
            }
            for h in &b.hypotheses {
                t.push(vec![json!(h.name), Value::Null, json!(h.holds)]);
            }
            match sink.format {
                Format::Json => sink.write(&pretty(&json!({
                    "command": "bounds",
                    "kind": "cw",
                    "params": {"n": n, "v": v, "w": w.to_string(), "c": c, "variant": to_value(&var)},
                    "result": to_value(&b),
                })))?,
                _ => sink.write(&t.to_csv())?,
            }
            if !b.all_hypotheses_hold() {
                eprintln!("warning: not every hypothesis of the chain holds for these parameters");
            }
        }
        BoundKind::Calibrate => {
            let n_max: u32 = cfg.or("n_max", p.n_max.or(p.n), DEFAULT_CALIBRATION_N)?;
            let eps = cfg
                .list("eps", p.eps.as_deref())
                .unwrap_or_else(|| vec!["1/2".into(), "1/4".into()])
                .iter()
                .map(|e| parse_rational(e))
                .collect::<Result<Vec<_>>>()?;
            let mut dists: Vec<WeightDistribution> = Vec::new();
            for n in 0..=n_max {
                for v in 2..=n {
                    if RmCode::dimension_formula(n, v) <= u64::from(cap.max_k) {
                        dists.push(exact_distribution(&RmCode::new(n, v)?, cap)?);
                    }
                }
            }
            let cal = calibrate_constant(&dists, &eps)?;
            let mut t = Table::new(&["n", "v", "ell", "eps", "log2_w", "unit_exponent", "ratio"]);
            for q in &cal.points {
                t.push(vec![
                    json!(q.n),
                    json!(q.v),
                    json!(q.ell),
                    json!(q.eps),
                    num(q.log2_w),
                    num(q.unit_exponent),
                    num(q.ratio()),
                ]);
            }
            sink.note(&format!("c* = {}", cal.c_star));
            let eps_s: Vec<String> = eps.iter().map(ToString::to_string).collect();
            sink.table(
                &t,
                json!({"command": "bounds", "kind": "calibrate", "params": {"n_max": n_max, "eps": eps_s, "max_k": cap.max_k}, "c_star": num(cal.c_star)}),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// `2^e ≤ w` in integers.
fn pow2_le(e: &BigUint, w: u64) -> bool {
    u64::try_from(e).is_ok_and(|e| e < 64 && BigUint::one() << e <= BigUint::from(w))
}
