//! Locating the boundary between zero and positive entropy along a
//! parameter path, with a certificate on each side of the final bracket.
//!
//! A probe is *positive* when a witness (non-power-of-two period or
//! horseshoe) is found and *zero* when every plateau orbit is eventually
//! periodic with a power-of-two period and every period found up to the
//! bound is a power of two. Everything is bound-qualified: no finite search
//! proves that a map has exactly the periods `{2ⁿ}`.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::entropy::markov::{plateau_orbits, MarkovConfig, TransitionMatrix};
use crate::entropy::witness::{positive_entropy_witness, Witness};
use crate::error::{Error, Result};
use crate::maps::interval_map::SharedMap;
use crate::maps::{QuadraticFamily, StuntedSawtooth, TypeBLine, OneParameterFamily};
use crate::parallel::par_map;
use crate::periods::{period_set, period_set_exact, FloatOrbit, PeriodSet, DEFAULT_PIECE_BUDGET};
use crate::rational::{self, int, Rational};
use crate::renorm::{cascade_trace, feigenbaum_delta, CascadeLevel};
use crate::symbolic::{shape_stunted, Shape};

/// Default bracket width on exact paths: `2⁻⁴⁰`.
pub const DEFAULT_EXACT_RESOLUTION_BITS: u32 = 40;
/// Default bracket width on float paths.
pub const DEFAULT_FLOAT_RESOLUTION: f64 = 1e-9;
/// Cascade levels explored per float probe.
pub const DEFAULT_CASCADE_DEPTH: usize = 11;
/// Period ceiling for float probes on the terminal renormalization.
pub const DEFAULT_FLOAT_PROBE_BOUND: usize = 8;
/// Largest exponent `k` accepted for plateau periods `2ᵏ`.
pub const DEFAULT_PLATEAU_EXPONENT: u32 = 16;

#[derive(Debug, Clone)]
pub enum ParameterPath {
    /// `ξ(t) = origin + t·direction` with `direction ≥ 0` coordinatewise.
    Stunted {
        m: usize,
        epsilon: i8,
        origin: Vec<Rational>,
        direction: Vec<Rational>,
        t_lo: Rational,
        t_hi: Rational,
    },
    Quadratic { c_lo: f64, c_hi: f64 },
    TypeB { line: TypeBLine, t_lo: f64, t_hi: f64 },
}

impl ParameterPath {
    /// `ξ(t) = (t, …, t)` scaled by `direction` from zero.
    pub fn stunted_line(m: usize, epsilon: i8, direction: Vec<Rational>, t_lo: Rational, t_hi: Rational) -> Self {
        ParameterPath::Stunted { m, epsilon, origin: vec![int(0); direction.len()], direction, t_lo, t_hi }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ParameterPath::Stunted { m, origin, direction, t_lo, t_hi, .. } => {
                if origin.len() != *m || direction.len() != *m {
                    return Err(Error::invalid(format!("stunted path needs {m} origin and direction coordinates")));
                }
                if direction.iter().any(|d| d.is_negative()) || direction.iter().all(|d| d.is_zero()) {
                    return Err(Error::invalid("stunted path direction must be non-negative and non-zero"));
                }
                if t_lo >= t_hi {
                    return Err(Error::precondition("path needs t_lo < t_hi"));
                }
            }
            ParameterPath::Quadratic { c_lo, c_hi } => {
                if !(c_lo < c_hi) {
                    return Err(Error::precondition("path needs c_lo < c_hi"));
                }
            }
            ParameterPath::TypeB { t_lo, t_hi, .. } => {
                if !(t_lo < t_hi) {
                    return Err(Error::precondition("path needs t_lo < t_hi"));
                }
            }
        }
        Ok(())
    }

    /// Parses a JSON path descriptor:
    ///
    /// ```json
    /// {"kind":"stunted","m":1,"epsilon":1,"origin":["0"],"direction":["1"],"t_lo":"1/2","t_hi":"3/2"}
    /// {"kind":"quadratic","c_lo":-1.5,"c_hi":-1.3}
    /// {"kind":"type_b","ells":[2],"origin":[0.0],"direction":[-1.0],"t_lo":1.0,"t_hi":2.0}
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let d: PathDescriptor = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("path descriptor, line {} column {}: {e}", e.line(), e.column())))?;
        let path = match d {
            PathDescriptor::Stunted { m, epsilon, origin, direction, t_lo, t_hi } => {
                ParameterPath::Stunted { m, epsilon, origin, direction, t_lo, t_hi }
            }
            PathDescriptor::Quadratic { c_lo, c_hi } => ParameterPath::Quadratic { c_lo, c_hi },
            PathDescriptor::TypeB { ells, origin, direction, t_lo, t_hi } => {
                if origin.len() != ells.len() || direction.len() != ells.len() {
                    return Err(Error::invalid("type_b path needs one origin and direction entry per stage"));
                }
                ParameterPath::TypeB { line: TypeBLine { ells, origin, direction, range: (t_lo, t_hi) }, t_lo, t_hi }
            }
        };
        if let ParameterPath::Stunted { m, origin, direction, .. } = &path {
            if origin.len() != *m || direction.len() != *m {
                return Err(Error::invalid(format!("stunted path needs {m} origin and direction coordinates")));
            }
        }
        Ok(path)
    }

    /// Parameter interval as floats.
    pub fn range_f64(&self) -> (f64, f64) {
        match self {
            ParameterPath::Stunted { t_lo, t_hi, .. } => (rational::to_f64(t_lo), rational::to_f64(t_hi)),
            ParameterPath::Quadratic { c_lo, c_hi } => (*c_lo, *c_hi),
            ParameterPath::TypeB { t_lo, t_hi, .. } => (*t_lo, *t_hi),
        }
    }

    pub fn stunted_at(&self, t: &Rational) -> Result<StuntedSawtooth> {
        match self {
            ParameterPath::Stunted { m, epsilon, origin, direction, .. } => {
                let xi = origin.iter().zip(direction).map(|(o, d)| o + t * d).collect();
                StuntedSawtooth::from_parts(*m, *epsilon, xi)
            }
            _ => Err(Error::invalid("not a stunted path")),
        }
    }

    pub fn float_at(&self, t: f64) -> Result<SharedMap> {
        match self {
            ParameterPath::Quadratic { .. } => QuadraticFamily::default().member(t),
            ParameterPath::TypeB { line, .. } => Ok(Arc::new(line.at(t)?)),
            ParameterPath::Stunted { .. } => Err(Error::invalid("stunted paths are exact")),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PathDescriptor {
    Stunted {
        m: usize,
        epsilon: i8,
        #[serde(with = "rational::vec")]
        origin: Vec<Rational>,
        #[serde(with = "rational::vec")]
        direction: Vec<Rational>,
        #[serde(with = "rational")]
        t_lo: Rational,
        #[serde(with = "rational")]
        t_hi: Rational,
    },
    Quadratic {
        c_lo: f64,
        c_hi: f64,
    },
    TypeB {
        ells: Vec<u32>,
        origin: Vec<f64>,
        direction: Vec<f64>,
        t_lo: f64,
        t_hi: f64,
    },
}

/// Plateau `index` has an orbit that enters a cycle of length `2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlateauCycle {
    pub index: usize,
    pub preperiod: usize,
    pub period: usize,
    pub exponent: u32,
}

/// Bounded evidence that a stunted map sits on the zero-entropy side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEntropyCertificate {
    #[serde(with = "rational::vec")]
    pub xi: Vec<Rational>,
    pub plateaus: Vec<PlateauCycle>,
    /// Largest exponent allowed for plateau periods.
    pub max_exponent: u32,
    pub periods: PeriodSet,
    /// The Markov graph (when it closes within budget) has no branching component.
    pub markov_zero: Option<bool>,
}

impl ZeroEntropyCertificate {
    /// Recomputes all evidence from scratch on `t`.
    pub fn verify(&self, t: &StuntedSawtooth) -> bool {
        if t.xi != self.xi {
            return false;
        }
        match zero_entropy_certificate(t, self.max_exponent, self.periods.bound) {
            Ok(Some(again)) => again == *self,
            _ => false,
        }
    }
}

/// Evidence that every plateau orbit is eventually `2ᵏ`-periodic (`k ≤ n`)
/// and every period up to `bound` is a power of two. `Ok(None)` is a
/// refutation; a budget error means the evidence could not be gathered.
pub fn zero_entropy_certificate(t: &StuntedSawtooth, n: u32, bound: usize) -> Result<Option<ZeroEntropyCertificate>> {
    let config = MarkovConfig::default();
    let mut plateaus = Vec::new();
    for (index, o) in plateau_orbits(t, config.orbit_budget)?.into_iter().enumerate() {
        if !o.period.is_power_of_two() || o.period.trailing_zeros() > n {
            return Ok(None);
        }
        plateaus.push(PlateauCycle { index, preperiod: o.preperiod, period: o.period, exponent: o.period.trailing_zeros() });
    }
    let periods = period_set_exact(t, bound, DEFAULT_PIECE_BUDGET)?;
    if periods.periods.iter().any(|p| !p.is_power_of_two()) {
        return Ok(None);
    }
    if periods.complete_upto < bound {
        return Err(Error::budget(format!("period search stopped at {} of {bound}", periods.complete_upto)));
    }
    let markov_zero = TransitionMatrix::build(t, config.orbit_budget).ok().map(|tm| tm.is_zero_entropy());
    if markov_zero == Some(false) {
        return Ok(None);
    }
    Ok(Some(ZeroEntropyCertificate { xi: t.xi.clone(), plateaus, max_exponent: n, periods, markov_zero }))
}

/// Zero-side evidence for a float map: after `cascade_depth` period-doubling
/// renormalizations the terminal map has only power-of-two periods up to the bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatZeroCertificate {
    pub parameter: f64,
    pub cascade_depth: usize,
    pub levels: Vec<CascadeLevel>,
    pub terminal_periods: PeriodSet,
}

/// A positive-entropy witness found on the terminal renormalization `g = ℛᵈ(f)`:
/// an orbit of `g` of period `q` lifts to an orbit of `f` of period `q·2ᵈ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenormalizedWitness {
    pub parameter: f64,
    pub cascade_depth: usize,
    pub levels: Vec<CascadeLevel>,
    pub orbit: FloatOrbit,
    pub total_period: usize,
}

impl RenormalizedWitness {
    /// Rebuilds the terminal renormalization of `map` and re-checks the orbit.
    pub fn verify(&self, map: SharedMap) -> bool {
        let Ok(trace) = cascade_trace(map, self.cascade_depth.max(1)) else { return false };
        if trace.depth < self.cascade_depth {
            return false;
        }
        let g = if self.cascade_depth == 0 {
            crate::renorm::RenormalizedMap::identity(trace.terminal.expect("present").base().clone())
        } else {
            trace.terminal.expect("present")
        };
        !self.orbit.period.is_power_of_two() && self.orbit.verify(&g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroSide {
    Exact(ZeroEntropyCertificate),
    Float(FloatZeroCertificate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositiveSide {
    Exact {
        #[serde(with = "rational::vec")]
        xi: Vec<Rational>,
        witness: Witness,
    },
    Renormalized(RenormalizedWitness),
}

#[derive(Debug, Clone, PartialEq)]
enum Verdict {
    Zero(ZeroSide),
    Positive(PositiveSide),
    Undecided,
}

impl Verdict {
    fn label(&self) -> &'static str {
        match self {
            Verdict::Zero(_) => "zero",
            Verdict::Positive(_) => "positive",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConfig {
    /// Period ceiling for witnesses and certificates on exact maps.
    pub bound: usize,
    /// Plateau exponent ceiling on exact paths; cascade depth on float paths.
    pub depth: usize,
    /// Stop once the exact bracket is at most `2^-resolution_bits` wide.
    pub resolution_bits: u32,
    pub float_resolution: f64,
    /// Period ceiling on the terminal renormalization of float probes.
    pub float_bound: usize,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig {
            bound: 64,
            depth: DEFAULT_PLATEAU_EXPONENT as usize,
            resolution_bits: DEFAULT_EXACT_RESOLUTION_BITS,
            float_resolution: DEFAULT_FLOAT_RESOLUTION,
            float_bound: DEFAULT_FLOAT_PROBE_BOUND,
        }
    }
}

impl BoundaryConfig {
    /// Defaults suited to float paths (`depth` is the cascade depth there).
    pub fn float() -> Self {
        BoundaryConfig { depth: DEFAULT_CASCADE_DEPTH, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub t: String,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCertificatePair {
    /// `[zero side, positive side]` or the reverse, in increasing `t`.
    pub t_star_bracket: [String; 2],
    pub t_star: String,
    pub gap: f64,
    /// Parameter of the zero-entropy endpoint.
    pub zero_t: String,
    pub positive_t: String,
    pub below: ZeroSide,
    pub above: PositiveSide,
    pub probes: Vec<ProbeRecord>,
    pub undecided_count: usize,
    /// Superstable extrapolation of the accumulation point (quadratic paths only).
    pub extrapolated_accumulation: Option<f64>,
}

impl BoundaryCertificatePair {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn probe_exact(path: &ParameterPath, t: &Rational, cfg: &BoundaryConfig) -> Verdict {
    let Ok(map) = path.stunted_at(t) else { return Verdict::Undecided };
    if let Some(w) = positive_entropy_witness(&map, cfg.bound) {
        return Verdict::Positive(PositiveSide::Exact { xi: map.xi.clone(), witness: w });
    }
    match zero_entropy_certificate(&map, cfg.depth as u32, cfg.bound) {
        Ok(Some(c)) => Verdict::Zero(ZeroSide::Exact(c)),
        _ => Verdict::Undecided,
    }
}

/// Classifies a float map through its terminal period-doubling renormalization.
fn probe_float_map(map: SharedMap, t: f64, cfg: &BoundaryConfig) -> Verdict {
    let Ok(trace) = cascade_trace(map, cfg.depth.max(1)) else { return Verdict::Undecided };
    let Some(g) = trace.terminal_map() else { return Verdict::Undecided };
    if let Some(Witness::FloatPeriodic(orbit)) = positive_entropy_witness(g, cfg.float_bound) {
        return Verdict::Positive(PositiveSide::Renormalized(RenormalizedWitness {
            parameter: t,
            cascade_depth: trace.depth,
            levels: trace.levels.clone(),
            total_period: orbit.period << trace.depth,
            orbit,
        }));
    }
    match period_set(g, cfg.float_bound) {
        Ok(ps) if ps.complete_upto == cfg.float_bound && ps.periods.iter().all(|p| p.is_power_of_two()) => {
            Verdict::Zero(ZeroSide::Float(FloatZeroCertificate {
                parameter: t,
                cascade_depth: trace.depth,
                levels: trace.levels.clone(),
                terminal_periods: ps,
            }))
        }
        _ => Verdict::Undecided,
    }
}

fn probe_float(path: &ParameterPath, t: f64, cfg: &BoundaryConfig) -> Verdict {
    match path.float_at(t) {
        Ok(map) => probe_float_map(map, t, cfg),
        Err(_) => Verdict::Undecided,
    }
}

/// Bracket state shared by the exact and float searches. Each round probes
/// the three quartile points concurrently and keeps the tightest bracket
/// between the last zero-side probe and the first positive-side probe.
struct Bracket<T> {
    zero_t: T,
    positive_t: T,
    zero: ZeroSide,
    positive: PositiveSide,
}

fn search<T, P, M, W>(
    mut bracket: Bracket<T>,
    zero_is_low: bool,
    probe: P,
    midpoints: M,
    width: W,
    resolution: f64,
    probes: &mut Vec<ProbeRecord>,
    render: impl Fn(&T) -> String,
) -> Result<(Bracket<T>, usize)>
where
    T: Clone + Send + Sync,
    P: Fn(&T) -> Verdict + Send + Sync,
    M: Fn(&T, &T) -> Vec<T>,
    W: Fn(&T, &T) -> f64,
{
    let mut undecided = 0;
    while width(&bracket.zero_t, &bracket.positive_t) > resolution {
        // Points ordered from the zero end towards the positive end.
        let pts = midpoints(&bracket.zero_t, &bracket.positive_t);
        let verdicts = par_map(&pts, |t| probe(t));
        let mut last_zero: Option<usize> = None;
        let mut first_pos: Option<usize> = None;
        for (i, v) in verdicts.iter().enumerate() {
            probes.push(ProbeRecord { t: render(&pts[i]), verdict: v.label() });
            match v {
                Verdict::Undecided => undecided += 1,
                Verdict::Positive(_) if first_pos.is_none() => first_pos = Some(i),
                Verdict::Zero(_) if first_pos.is_none() => last_zero = Some(i),
                _ => {}
            }
        }
        if last_zero.is_none() && first_pos.is_none() {
            return Err(Error::budget(format!(
                "every probe between {} and {} was undecided",
                render(&bracket.zero_t),
                render(&bracket.positive_t)
            )));
        }
        let mut verdicts: Vec<Option<Verdict>> = verdicts.into_iter().map(Some).collect();
        if let Some(i) = last_zero {
            if let Some(Verdict::Zero(z)) = verdicts[i].take() {
                bracket.zero_t = pts[i].clone();
                bracket.zero = z;
            }
        }
        if let Some(j) = first_pos {
            if let Some(Verdict::Positive(p)) = verdicts[j].take() {
                bracket.positive_t = pts[j].clone();
                bracket.positive = p;
            }
        }
    }
    let _ = zero_is_low;
    Ok((bracket, undecided))
}

/// Bisects `path` until the bracket is below the configured resolution and
/// returns the certificates at both ends.
pub fn locate_boundary(path: &ParameterPath, cfg: &BoundaryConfig) -> Result<BoundaryCertificatePair> {
    path.validate()?;
    let mut probes = Vec::new();
    match path {
        ParameterPath::Stunted { t_lo, t_hi, .. } => {
            let render = |t: &Rational| rational::format(t);
            let lo = probe_exact(path, t_lo, cfg);
            let hi = probe_exact(path, t_hi, cfg);
            probes.push(ProbeRecord { t: render(t_lo), verdict: lo.label() });
            probes.push(ProbeRecord { t: render(t_hi), verdict: hi.label() });
            let (bracket, zero_is_low) = initial_bracket(t_lo.clone(), t_hi.clone(), lo, hi)?;
            let resolution = 0.5f64.powi(cfg.resolution_bits as i32);
            let (b, undecided) = search(
                bracket,
                zero_is_low,
                |t| probe_exact(path, t, cfg),
                |a, b| (1..4).map(|k| a + (b - a) * rational::ratio(k, 4)).collect(),
                |a, b| rational::to_f64(&(a - b).abs()),
                resolution,
                &mut probes,
                render,
            )?;
            Ok(pair(b, zero_is_low, render, |a, b| rational::to_f64(&(a - b).abs()), |a, b| render(&((a + b) / int(2))), probes, undecided, None))
        }
        ParameterPath::Quadratic { c_lo: lo_t, c_hi: hi_t } | ParameterPath::TypeB { t_lo: lo_t, t_hi: hi_t, .. } => {
            let render = |t: &f64| format!("{t:.17e}");
            let lo = probe_float(path, *lo_t, cfg);
            let hi = probe_float(path, *hi_t, cfg);
            probes.push(ProbeRecord { t: render(lo_t), verdict: lo.label() });
            probes.push(ProbeRecord { t: render(hi_t), verdict: hi.label() });
            let (bracket, zero_is_low) = initial_bracket(*lo_t, *hi_t, lo, hi)?;
            let (b, undecided) = search(
                bracket,
                zero_is_low,
                |t| probe_float(path, *t, cfg),
                |a, b| (1..4).map(|k| a + (b - a) * k as f64 / 4.0).collect(),
                |a, b| (a - b).abs(),
                cfg.float_resolution,
                &mut probes,
                render,
            )?;
            let extrapolated = match path {
                ParameterPath::Quadratic { .. } => feigenbaum_delta(&QuadraticFamily::default(), 10).ok().map(|s| s.accumulation()),
                _ => None,
            };
            Ok(pair(b, zero_is_low, render, |a, b| (a - b).abs(), |a, b| render(&(0.5 * (a + b))), probes, undecided, extrapolated))
        }
    }
}

fn initial_bracket<T>(lo_t: T, hi_t: T, lo: Verdict, hi: Verdict) -> Result<(Bracket<T>, bool)> {
    match (lo, hi) {
        (Verdict::Zero(z), Verdict::Positive(p)) => Ok((Bracket { zero_t: lo_t, positive_t: hi_t, zero: z, positive: p }, true)),
        (Verdict::Positive(p), Verdict::Zero(z)) => Ok((Bracket { zero_t: hi_t, positive_t: lo_t, zero: z, positive: p }, false)),
        (a, b) => Err(Error::precondition(format!(
            "path endpoints must be certified on opposite sides, got {} and {}",
            a.label(),
            b.label()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn pair<T>(
    b: Bracket<T>,
    zero_is_low: bool,
    render: impl Fn(&T) -> String,
    width: impl Fn(&T, &T) -> f64,
    mid: impl Fn(&T, &T) -> String,
    probes: Vec<ProbeRecord>,
    undecided_count: usize,
    extrapolated_accumulation: Option<f64>,
) -> BoundaryCertificatePair {
    let (z, p) = (render(&b.zero_t), render(&b.positive_t));
    let t_star_bracket = if zero_is_low { [z.clone(), p.clone()] } else { [p.clone(), z.clone()] };
    BoundaryCertificatePair {
        t_star_bracket,
        t_star: mid(&b.zero_t, &b.positive_t),
        gap: width(&b.zero_t, &b.positive_t),
        zero_t: z,
        positive_t: p,
        below: b.zero,
        above: b.positive,
        probes,
        undecided_count,
        extrapolated_accumulation,
    }
}

/// Two maps within sup-distance `radius` of `gamma`, with the same shape:
/// `plus` carrying a positive-entropy witness and `minus` a zero-entropy
/// certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Approximants {
    #[serde(with = "rational::vec")]
    pub plus: Vec<Rational>,
    #[serde(with = "rational::vec")]
    pub minus: Vec<Rational>,
    pub witness: Witness,
    pub certificate: ZeroEntropyCertificate,
    pub shape: Shape,
    #[serde(with = "rational")]
    pub plus_distance: Rational,
    #[serde(with = "rational")]
    pub minus_distance: Rational,
}

/// Halvings of the radius tried before giving up.
const APPROXIMANT_HALVINGS: u32 = 40;

pub fn approximants(gamma: &StuntedSawtooth, radius: &Rational, cfg: &BoundaryConfig) -> Result<Approximants> {
    if !radius.is_positive() {
        return Err(Error::invalid("radius must be positive"));
    }
    let shape = shape_stunted(gamma);
    let m = gamma.m();
    let mut directions: Vec<Vec<Rational>> = vec![vec![int(1); m]];
    for i in 0..m {
        let mut d = vec![int(0); m];
        d[i] = int(1);
        directions.push(d);
    }
    let candidate = |sign: i64, d: &[Rational], s: &Rational| -> Option<StuntedSawtooth> {
        let xi: Vec<Rational> = gamma.xi.iter().zip(d).map(|(x, di)| x + int(sign) * s * di).collect();
        let t = StuntedSawtooth::from_parts(m, gamma.base.epsilon, xi).ok()?;
        (shape_stunted(&t) == shape).then_some(t)
    };
    let mut plus = None;
    let mut minus = None;
    let mut smallest = radius.clone();
    for k in 0..=APPROXIMANT_HALVINGS {
        let s = radius / Rational::from_integer(num_bigint::BigInt::from(1u64) << k);
        smallest = s.clone();
        for d in &directions {
            if plus.is_none() {
                if let Some(t) = candidate(1, d, &s) {
                    if let Some(w) = positive_entropy_witness(&t, cfg.bound) {
                        plus = Some((t, w));
                    }
                }
            }
            if minus.is_none() {
                if let Some(t) = candidate(-1, d, &s) {
                    if let Ok(Some(c)) = zero_entropy_certificate(&t, cfg.depth as u32, cfg.bound) {
                        minus = Some((t, c));
                    }
                }
            }
        }
        if plus.is_some() && minus.is_some() {
            break;
        }
    }
    match (plus, minus) {
        (Some((p, witness)), Some((n, certificate))) => Ok(Approximants {
            plus_distance: p.sup_distance(gamma),
            minus_distance: n.sup_distance(gamma),
            plus: p.xi,
            minus: n.xi,
            witness,
            certificate,
            shape,
        }),
        (p, n) => Err(Error::budget(format!(
            "could not certify both sides down to radius {} (positive side {}, zero side {})",
            rational::format(&smallest),
            if p.is_some() { "found" } else { "missing" },
            if n.is_some() { "found" } else { "missing" },
        ))),
    }
}
