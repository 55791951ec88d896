use std::path::Path;
use std::sync::Arc;

use chaos_edge::boundary::{locate_boundary, BoundaryConfig, ParameterPath};
use chaos_edge::entropy::{entropy_lap, entropy_markov, positive_entropy_witness, MarkovConfig};
use chaos_edge::maps::{BuiltMap, IntervalMap, MapDescriptor, OneParameterFamily, QuadraticFamily, SharedMap};
use chaos_edge::parallel::par_map;
use chaos_edge::periods::{
    is_power_of_two_spectrum, period_set, period_set_exact, PeriodSet, DEFAULT_EXACT_BOUND, DEFAULT_FLOAT_BOUND,
    DEFAULT_PIECE_BUDGET,
};
use chaos_edge::rational::{self, Rational};
use chaos_edge::renorm::{RenormalizedMap, cascade_trace, feigenbaum_delta, find_restrictive, renormalize};
use chaos_edge::symbolic::{
    itinerary_float, kneading_float, kneading_stunted, psi as psi_map, shape_float, shape_stunted, DEFAULT_PSI_DEPTH,
    DEFAULT_PSI_TOLERANCE,
};
use chaos_edge::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Format, RunConfig};

const DEFAULT_N_MAX: usize = 30;
const DEFAULT_KNEADING_DEPTH: usize = 32;
const DEFAULT_CASCADE_DEPTH: usize = 8;
const DEFAULT_K_MAX: usize = 10;
const DEFAULT_SWEEP_BOUND: usize = 8;
const RENORM_SAMPLES: usize = 50;
const CLOUD_TRANSIENT: usize = 500;
const CLOUD_SAMPLES: usize = 100;

/// Keys sorted at every level, independent of serde_json's map backing.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonical(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

fn emit_json(v: Value) -> String {
    serde_json::to_string_pretty(&canonical(v)).expect("json value serializes")
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn build(text: &str) -> Result<BuiltMap> {
    MapDescriptor::parse(text)?.build()
}

fn budget(cfg: &RunConfig) -> Result<usize> {
    match cfg.budget {
        Some(0) => Err(Error::Invalid("--budget must be positive".into())),
        Some(b) => Ok(b),
        None => Ok(DEFAULT_PIECE_BUDGET),
    }
}

fn positive(name: &str, v: Option<usize>, default: usize) -> Result<usize> {
    match v {
        Some(0) => Err(Error::Invalid(format!("--{name} must be positive"))),
        Some(x) => Ok(x),
        None => Ok(default),
    }
}

pub fn entropy(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?;
    let n_max = positive("n-max", cfg.n_max, DEFAULT_N_MAX)?;
    let (lap, markov) = match &map {
        BuiltMap::Stunted(t) => {
            let mc = MarkovConfig { orbit_budget: budget(cfg)?.min(MarkovConfig::default().orbit_budget), ..Default::default() };
            (entropy_lap(t.as_ref(), n_max)?, Some(entropy_markov(t, mc)?))
        }
        BuiltMap::Float(f) => (entropy_lap(f.as_ref(), n_max)?, None),
    };
    Ok(match cfg.format {
        Format::Json => emit_json(json!({
            "lap": lap.value,
            "lap_residual": lap.residual,
            "lap_n_used": lap.n_used,
            "lap_saturated": lap.saturated,
            "markov": markov.as_ref().map(|m| m.value),
            "markov_residual": markov.as_ref().map(|m| m.residual),
            "markov_states": markov.as_ref().map(|m| m.n_used),
        })),
        Format::Csv => {
            let mut out = String::from("method,value,residual,n_used\n");
            for e in std::iter::once(&lap).chain(markov.as_ref()) {
                let method = to_value(&e.method);
                out.push_str(&format!("{},{},{},{}\n", method.as_str().unwrap_or(""), e.value, e.residual, e.n_used));
            }
            out
        }
    })
}

fn map_period_set(map: &BuiltMap, bound: Option<usize>, budget: usize) -> Result<PeriodSet> {
    match map {
        BuiltMap::Stunted(t) => period_set_exact(t, positive("bound", bound, DEFAULT_EXACT_BOUND)?, budget),
        BuiltMap::Float(f) => period_set(f.as_ref(), positive("bound", bound, DEFAULT_FLOAT_BOUND)?),
    }
}

pub fn periods(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?;
    let ps = map_period_set(&map, cfg.bound, budget(cfg)?)?;
    if ps.complete_upto < ps.bound {
        let found: Vec<String> = ps.periods.iter().map(|p| p.to_string()).collect();
        return Err(Error::Budget(format!(
            "period search complete only up to {} of {} (found {}); raise --budget or lower --bound",
            ps.complete_upto,
            ps.bound,
            found.join(" ")
        )));
    }
    Ok(match cfg.format {
        Format::Json => {
            let mut v = ps.to_json();
            v["spectrum"] = to_value(&is_power_of_two_spectrum(&ps));
            emit_json(v)
        }
        Format::Csv => {
            let mut out = String::from("period\n");
            for p in &ps.periods {
                out.push_str(&format!("{p}\n"));
            }
            out
        }
    })
}

pub fn kneading(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?;
    let depth = positive("depth", cfg.depth, DEFAULT_KNEADING_DEPTH)?;
    let nu = match &map {
        BuiltMap::Stunted(t) => kneading_stunted(t, depth)?,
        BuiltMap::Float(f) => kneading_float(f.as_ref(), depth)?,
    };
    Ok(match cfg.format {
        Format::Json => emit_json(json!({ "depth": depth, "kneading": to_value(&nu) })),
        Format::Csv => {
            let mut out = String::from("turning_point,itinerary\n");
            for (i, it) in nu.nu.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, to_value(it).as_str().unwrap_or("")));
            }
            out
        }
    })
}

pub fn shape(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?;
    let s = match &map {
        BuiltMap::Stunted(t) => shape_stunted(t),
        BuiltMap::Float(f) => shape_float(f.as_ref()),
    };
    Ok(match cfg.format {
        Format::Json => emit_json(to_value(&s)),
        Format::Csv => {
            let mut out = String::from("turning_point,value_index\n");
            for (i, j) in &s.pairs {
                out.push_str(&format!("{i},{j}\n"));
            }
            out
        }
    })
}

pub fn psi(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?.as_float();
    let depth = positive("depth", cfg.depth, DEFAULT_PSI_DEPTH)?;
    let tol = cfg.precision.unwrap_or(DEFAULT_PSI_TOLERANCE);
    let r = psi_map(map.as_ref(), depth, tol)?;
    let descriptor = MapDescriptor::from_stunted(&r.map);
    Ok(match cfg.format {
        Format::Json => emit_json(json!({
            "descriptor": to_value(&descriptor),
            "endpoints": r.endpoints.iter().map(rational::format).collect::<Vec<_>>(),
            "widths": r.widths,
        })),
        Format::Csv => {
            let mut out = String::from("turning_point,xi,endpoint,width\n");
            for (i, ((xi, s), w)) in r.map.xi.iter().zip(&r.endpoints).zip(&r.widths).enumerate() {
                out.push_str(&format!("{},{},{},{w}\n", i + 1, rational::format(xi), rational::format(s)));
            }
            out
        }
    })
}

pub fn renorm(text: &str, cfg: &RunConfig) -> Result<String> {
    let map = build(text)?.as_float();
    let period = positive("bound", cfg.bound, 2)?;
    let depth = positive("depth", cfg.depth, DEFAULT_CASCADE_DEPTH)?;
    let ri = find_restrictive(map.as_ref(), period)?;
    let check = match &ri {
        Some(ri) => {
            let r = renormalize(map.clone(), ri)?;
            let dom = r.domain();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let ys: Vec<f64> = (0..RENORM_SAMPLES).map(|_| rng.gen_range(dom.lo..=dom.hi)).collect();
            let matched = ys.iter().filter(|&&y| same_itinerary(&r, y, DEFAULT_KNEADING_DEPTH)).count();
            Some(json!({ "samples": RENORM_SAMPLES, "matched": matched, "depth": DEFAULT_KNEADING_DEPTH }))
        }
        None => None,
    };
    let trace = cascade_trace(map, depth)?;
    Ok(match cfg.format {
        Format::Json => emit_json(json!({
            "restrictive": ri.as_ref().map(to_value),
            "itinerary_check": check,
            "cascade": to_value(&trace),
        })),
        Format::Csv => {
            let mut out = String::from("level,lo,hi,relative_period,total_period\n");
            for (i, l) in trace.levels.iter().enumerate() {
                out.push_str(&format!("{},{},{},{},{}\n", i + 1, l.j.lo, l.j.hi, l.relative_period, l.total_period));
            }
            out
        }
    })
}

/// Itinerary of `u` under ℛ(f) against the one read off the orbit of f.
fn same_itinerary(r: &RenormalizedMap, u: f64, depth: usize) -> bool {
    match (itinerary_float(r, u, depth), r.induced_itinerary(r.to_base(u), depth)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn family(path: &ParameterPath) -> Result<Box<dyn OneParameterFamily>> {
    match path {
        ParameterPath::Quadratic { c_lo, c_hi } => Ok(Box::new(QuadraticFamily { range: (*c_lo, *c_hi) })),
        ParameterPath::TypeB { line, .. } => Ok(Box::new(line.clone())),
        ParameterPath::Stunted { .. } => Err(Error::Precondition("superstable parameters need a smooth family".into())),
    }
}

pub fn feigenbaum(text: &str, cfg: &RunConfig) -> Result<String> {
    let path = ParameterPath::parse(text)?;
    let fam = family(&path)?;
    let k_max = positive("depth", cfg.depth, DEFAULT_K_MAX)?;
    let seq = feigenbaum_delta(fam.as_ref(), k_max)?;
    Ok(match cfg.format {
        Format::Json => {
            let mut v = to_value(&seq);
            v["delta"] = json!(seq.delta());
            v["accumulation"] = json!(seq.accumulation());
            emit_json(v)
        }
        Format::Csv => seq.to_csv(),
    })
}

pub fn boundary(text: &str, cfg: &RunConfig) -> Result<String> {
    let path = ParameterPath::parse(text)?;
    let mut bc = match path {
        ParameterPath::Stunted { .. } => BoundaryConfig::default(),
        _ => BoundaryConfig::float(),
    };
    if let Some(b) = cfg.bound {
        bc.bound = positive("bound", Some(b), b)?;
        bc.float_bound = b;
    }
    if let Some(d) = cfg.depth {
        bc.depth = positive("depth", Some(d), d)?;
    }
    if let Some(p) = cfg.precision {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Invalid("--precision must lie in (0, 1)".into()));
        }
        bc.float_resolution = p;
        bc.resolution_bits = (-p.log2()).ceil() as u32;
    }
    let pair = locate_boundary(&path, &bc)?;
    Ok(match cfg.format {
        Format::Json => emit_json(pair.to_json()),
        Format::Csv => {
            let mut out = String::from("t,verdict\n");
            for p in &pair.probes {
                out.push_str(&format!("{},{}\n", p.t, p.verdict));
            }
            out
        }
    })
}

struct SweepRow {
    t: String,
    entropy: Option<f64>,
    method: &'static str,
    periods: String,
    witness: Option<usize>,
    error: String,
    cloud: Vec<f64>,
}

fn sweep_member(map: Result<BuiltMap>, cfg: &RunConfig, seed: u64) -> Result<(f64, &'static str, PeriodSet, Option<usize>, Vec<f64>)> {
    let map = map?;
    let bound = Some(cfg.bound.unwrap_or(DEFAULT_SWEEP_BOUND));
    let (h, method, witness) = match &map {
        BuiltMap::Stunted(t) => {
            let h = entropy_markov(t, MarkovConfig::default())?.value;
            (h, "markov", positive_entropy_witness(t.as_ref(), bound.unwrap_or(DEFAULT_SWEEP_BOUND)).and_then(|w| w.period()))
        }
        BuiltMap::Float(f) => {
            let h = entropy_lap(f.as_ref(), positive("n-max", cfg.n_max, DEFAULT_N_MAX)?)?.value;
            (h, "lap", None)
        }
    };
    let ps = map_period_set(&map, bound, budget(cfg)?)?;
    let witness = witness.or_else(|| ps.periods.iter().copied().find(|p| !p.is_power_of_two()));
    let cloud = point_cloud(&map.as_float(), seed);
    Ok((h, method, ps, witness, cloud))
}

fn point_cloud(map: &SharedMap, seed: u64) -> Vec<f64> {
    let dom = map.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: f64 = rng.gen_range(dom.lo..=dom.hi);
    let clamp = |y: f64| y.clamp(dom.lo, dom.hi);
    for _ in 0..CLOUD_TRANSIENT {
        x = clamp(map.eval(x));
    }
    (0..CLOUD_SAMPLES)
        .map(|_| {
            x = clamp(map.eval(x));
            x
        })
        .collect()
}

pub fn sweep(text: &str, grid: usize, cloud: Option<&Path>, cfg: &RunConfig) -> Result<String> {
    if grid < 2 {
        return Err(Error::Invalid(format!("sweep needs a grid of at least 2 points, got {grid}")));
    }
    let path = ParameterPath::parse(text)?;
    let (lo, hi) = path.range_f64();
    if !(lo < hi) {
        return Err(Error::Precondition("path needs t_lo < t_hi".into()));
    }
    let idx: Vec<usize> = (0..grid).collect();
    let member = |i: &usize| -> (String, Result<BuiltMap>) {
        match &path {
            ParameterPath::Stunted { t_lo, t_hi, .. } => {
                let t: Rational = t_lo + (t_hi - t_lo) * rational::ratio(*i as i64, (grid - 1) as i64);
                (rational::format(&t), path.stunted_at(&t).map(|m| BuiltMap::Stunted(Arc::new(m))))
            }
            _ => {
                let t = lo + (hi - lo) * (*i as f64) / ((grid - 1) as f64);
                let t = if *i == grid - 1 { hi } else { t };
                (format!("{t}"), path.float_at(t).map(BuiltMap::Float))
            }
        }
    };
    let rows: Vec<SweepRow> = par_map(&idx, |i| {
        let (t, map) = member(i);
        match sweep_member(map, cfg, cfg.seed.wrapping_add(*i as u64)) {
            Ok((h, method, ps, witness, cloud)) => SweepRow {
                t,
                entropy: Some(h),
                method,
                periods: ps.periods.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
                witness,
                error: String::new(),
                cloud,
            },
            Err(e) => SweepRow {
                t,
                entropy: None,
                method: "",
                periods: String::new(),
                witness: None,
                error: e.to_string().replace(',', ";"),
                cloud: Vec::new(),
            },
        }
    });
    if let Some(p) = cloud {
        let mut out = String::from("t,x\n");
        for r in &rows {
            for x in &r.cloud {
                out.push_str(&format!("{},{x}\n", r.t));
            }
        }
        std::fs::write(p, out).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
    }
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("t,entropy,method,periods,witness_period,error\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.t,
                    r.entropy.map(|h| h.to_string()).unwrap_or_default(),
                    r.method,
                    r.periods,
                    r.witness.map(|w| w.to_string()).unwrap_or_default(),
                    r.error
                ));
            }
            out
        }
        Format::Json => emit_json(Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "t": r.t,
                        "entropy": r.entropy,
                        "method": r.method,
                        "periods": r.periods,
                        "witness_period": r.witness,
                        "error": r.error,
                    })
                })
                .collect(),
        )),
    })
}
