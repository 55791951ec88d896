//! Periodic orbits, period sets and the Sharkovskii order.
//!
//! Stunted maps are handled exactly: `Tᵖ` is piecewise affine or constant on
//! finitely many rational pieces, so `Tᵖ(x) = x` is one linear solve per
//! piece. Float maps are searched on a grid refined by the laps of `fᵖ`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::entropy::markov::{MarkovConfig, TransitionMatrix};
use crate::entropy::witness::{exact_orbit, walk_fixed_point};
use crate::error::{Error, Result};
use crate::maps::interval_map::{iterate_derivative, iterate_unchecked, IntervalMap};
use crate::maps::interval_map::iterate_turning_points_capped;
use crate::maps::{Piece, StuntedSawtooth};
use crate::rational::{self, int, Rational};

/// Default search ceiling for exact maps.
pub const DEFAULT_EXACT_BOUND: usize = 64;
/// Default search ceiling for float maps.
pub const DEFAULT_FLOAT_BOUND: usize = 32;
/// Default cap on the number of pieces of `Tᵖ` in exact searches.
pub const DEFAULT_PIECE_BUDGET: usize = 200_000;
/// Float orbits must close to this accuracy (scaled by `max(1, |Dfᵖ|)`).
pub const FLOAT_ORBIT_TOL: f64 = 1e-10;
/// Multipliers this close to ±1 are tagged neutral.
pub const NEUTRAL_TOL: f64 = 1e-6;
/// Total grid cells spread over the laps of `fᵖ` in float searches.
pub const FLOAT_GRID_CELLS: usize = 1 << 12;
/// Float searches give up once `fᵖ` has more turning points than this.
pub const FLOAT_LAP_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
    PlateauAbsorbed,
}

/// An exact periodic orbit of a stunted map, listed from its leftmost point
/// in orbit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactOrbit {
    #[serde(with = "rational::vec")]
    pub points: Vec<Rational>,
    pub period: usize,
    pub stability: Stability,
}

impl ExactOrbit {
    /// Re-checks `Tᵖ(x) = x` exactly with minimal `p` from the first point.
    pub fn verify(&self, t: &StuntedSawtooth) -> bool {
        exact_minimal_period(t, &self.points[0], self.period) == Some(self.period)
            && self.points.windows(2).all(|w| t.eval_unchecked(&w[0]) == w[1])
    }
}

/// A float periodic orbit with its multiplier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatOrbit {
    pub points: Vec<f64>,
    pub period: usize,
    pub stability: Stability,
    pub multiplier: f64,
}

impl FloatOrbit {
    pub fn verify(&self, map: &dyn IntervalMap) -> bool {
        let x = self.points[0];
        let tol = FLOAT_ORBIT_TOL * self.multiplier.abs().max(1.0);
        (iterate_unchecked(map, x, self.period) - x).abs() <= tol
            && prime_factors(self.period)
                .into_iter()
                .all(|q| (iterate_unchecked(map, x, self.period / q) - x).abs() > tol)
    }
}

/// Minimal periods found up to `bound`; the search covered every `p ≤ complete_upto`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodSet {
    pub periods: BTreeSet<usize>,
    pub bound: usize,
    pub complete_upto: usize,
}

impl PeriodSet {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "periods": self.periods.iter().collect::<Vec<_>>(),
            "bound": self.bound,
            "complete_upto": self.complete_upto,
        })
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest `d ≤ p` with `Tᵈ(x) = x`, or `None` if `x` is not `p`-periodic.
pub fn exact_minimal_period(t: &StuntedSawtooth, x: &Rational, p: usize) -> Option<usize> {
    let mut y = x.clone();
    for d in 1..=p {
        y = t.eval_unchecked(&y);
        if &y == x {
            return (p % d == 0).then_some(d);
        }
    }
    None
}

/// A piece of `Tᵖ`: affine `slope·x + icpt`, or constant.
#[derive(Debug, Clone, PartialEq, Eq)]
enum IterPiece {
    Affine { lo: Rational, hi: Rational, slope: Rational, icpt: Rational },
    Const { lo: Rational, hi: Rational, value: Rational },
}

impl IterPiece {
    fn bounds(&self) -> (&Rational, &Rational) {
        match self {
            IterPiece::Affine { lo, hi, .. } | IterPiece::Const { lo, hi, .. } => (lo, hi),
        }
    }
}

/// The pieces of `Tᵖ`, advanced one iterate at a time.
#[derive(Debug, Clone)]
pub struct IteratePieces<'a> {
    t: &'a StuntedSawtooth,
    p: usize,
    pieces: Vec<IterPiece>,
}

impl<'a> IteratePieces<'a> {
    /// `T⁰ = id`.
    pub fn new(t: &'a StuntedSawtooth) -> Self {
        let d = t.domain();
        IteratePieces {
            t,
            p: 0,
            pieces: vec![IterPiece::Affine { lo: d.lo, hi: d.hi, slope: Rational::one(), icpt: int(0) }],
        }
    }

    pub fn power(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Replaces `Tᵖ` by `T ∘ Tᵖ`, failing if the piece count would pass `budget`.
    pub fn advance(&mut self, budget: usize) -> Result<()> {
        let t = self.t;
        let mut out: Vec<IterPiece> = Vec::with_capacity(self.pieces.len() * 2);
        for piece in &self.pieces {
            match piece {
                IterPiece::Const { lo, hi, value } => {
                    push_merged(&mut out, IterPiece::Const { lo: lo.clone(), hi: hi.clone(), value: t.eval_unchecked(value) })
                }
                IterPiece::Affine { lo, hi, slope, icpt } => {
                    let ga = slope * lo + icpt;
                    let gb = slope * hi + icpt;
                    let (ilo, ihi) = if ga <= gb { (ga, gb) } else { (gb, ga) };
                    let mut parts = Vec::new();
                    for tp in t.pieces() {
                        let (plo, phi) = tp.bounds();
                        let olo = if plo > &ilo { plo.clone() } else { ilo.clone() };
                        let ohi = if phi < &ihi { phi.clone() } else { ihi.clone() };
                        if olo >= ohi {
                            continue;
                        }
                        let (xa, xb) = {
                            let a = (&olo - icpt) / slope;
                            let b = (&ohi - icpt) / slope;
                            if a <= b { (a, b) } else { (b, a) }
                        };
                        parts.push(match tp {
                            Piece::Linear { lap, .. } => {
                                let (s, c) = t.base.lap_affine(*lap);
                                let s = int(s);
                                IterPiece::Affine { lo: xa, hi: xb, slope: &s * slope, icpt: &s * icpt + c }
                            }
                            Piece::Flat { index, .. } => {
                                IterPiece::Const { lo: xa, hi: xb, value: t.plateaus[*index].value.clone() }
                            }
                        });
                    }
                    if slope.is_negative() {
                        parts.reverse();
                    }
                    for part in parts {
                        push_merged(&mut out, part);
                    }
                }
            }
            if out.len() > budget {
                return Err(Error::budget(format!(
                    "iterate {} of the map has more than {budget} pieces",
                    self.p + 1
                )));
            }
        }
        self.pieces = out;
        self.p += 1;
        Ok(())
    }

    /// Sorted solutions of `Tᵖ(x) = x`.
    pub fn fixed_points(&self) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        for piece in &self.pieces {
            let (lo, hi) = piece.bounds();
            let x = match piece {
                IterPiece::Const { value, .. } => value.clone(),
                IterPiece::Affine { slope, icpt, .. } => {
                    if slope.is_one() {
                        continue;
                    }
                    icpt / (Rational::one() - slope)
                }
            };
            if lo <= &x && &x <= hi {
                out.insert(x);
            }
        }
        out.into_iter().collect()
    }
}

fn push_merged(out: &mut Vec<IterPiece>, piece: IterPiece) {
    if let (Some(IterPiece::Const { hi, value, .. }), IterPiece::Const { hi: new_hi, value: v, .. }) = (out.last_mut(), &piece) {
        if value == v {
            *hi = new_hi.clone();
            return;
        }
    }
    out.push(piece);
}

fn exact_orbits_from(t: &StuntedSawtooth, roots: &[Rational], p: usize) -> Vec<ExactOrbit> {
    let mut seen: BTreeSet<Rational> = BTreeSet::new();
    let mut orbits = Vec::new();
    for x in roots {
        if seen.contains(x) || exact_minimal_period(t, x, p) != Some(p) {
            continue;
        }
        let o = exact_orbit(t, x, p);
        seen.extend(o.points.iter().cloned());
        orbits.push(o);
    }
    orbits.sort_by(|a, b| a.points[0].cmp(&b.points[0]));
    orbits
}

/// Every periodic orbit of a stunted map whose Markov graph has zero
/// entropy, or `None` if the graph has a component with branching.
///
/// Such a map has finitely many periodic orbits: those through partition
/// points (found on the finite functional graph of `T` restricted to the
/// partition) and one per cyclic component of the state graph.
pub fn zero_entropy_orbits(t: &StuntedSawtooth, tm: &TransitionMatrix) -> Option<Vec<ExactOrbit>> {
    if !tm.is_zero_entropy() {
        return None;
    }
    let pts = &tm.points;
    let next: Vec<usize> = pts
        .iter()
        .map(|x| pts.binary_search(&t.eval_unchecked(x)).expect("partition is forward invariant"))
        .collect();
    // 0 unvisited, 1 on the current path, 2 done.
    let mut mark = vec![0u8; pts.len()];
    let mut roots: Vec<(Rational, usize)> = Vec::new();
    for start in 0..pts.len() {
        let mut path = Vec::new();
        let mut i = start;
        while mark[i] == 0 {
            mark[i] = 1;
            path.push(i);
            i = next[i];
        }
        if mark[i] == 1 {
            let pos = path.iter().position(|&j| j == i).expect("on path");
            roots.push((pts[i].clone(), path.len() - pos));
        }
        for j in path {
            mark[j] = 2;
        }
    }
    for comp in tm.components() {
        let inside = |j: &usize| comp.binary_search(j).is_ok();
        let mut walk = vec![comp[0]];
        loop {
            let last = *walk.last().expect("non-empty");
            match tm.successors(last).find(inside) {
                Some(n) if n == comp[0] => break,
                Some(n) => walk.push(n),
                None => {
                    walk.clear();
                    break;
                }
            }
        }
        if walk.is_empty() {
            continue;
        }
        if let Some(x) = walk_fixed_point(t, tm, &walk) {
            if let Some(d) = exact_minimal_period(t, &x, walk.len()) {
                roots.push((x, d));
            }
        }
    }
    let mut orbits: Vec<ExactOrbit> = Vec::new();
    let mut seen: BTreeSet<Rational> = BTreeSet::new();
    for (x, p) in roots {
        if seen.contains(&x) {
            continue;
        }
        let o = exact_orbit(t, &x, p);
        seen.extend(o.points.iter().cloned());
        orbits.push(o);
    }
    orbits.sort_by(|a, b| (a.period, &a.points[0]).cmp(&(b.period, &b.points[0])));
    Some(orbits)
}

fn zero_entropy_orbits_of(t: &StuntedSawtooth) -> Option<Vec<ExactOrbit>> {
    let tm = TransitionMatrix::build(t, MarkovConfig::default().orbit_budget).ok()?;
    zero_entropy_orbits(t, &tm)
}

/// All periodic orbits of minimal period `p`, exactly.
pub fn periodic_points_exact(t: &StuntedSawtooth, p: usize, budget: usize) -> Result<Vec<ExactOrbit>> {
    if p == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    if let Some(all) = zero_entropy_orbits_of(t) {
        return Ok(all.into_iter().filter(|o| o.period == p).collect());
    }
    let mut it = IteratePieces::new(t);
    for _ in 0..p {
        it.advance(budget)?;
    }
    Ok(exact_orbits_from(t, &it.fixed_points(), p))
}

/// Minimal periods `≤ bound`, stopping early (with `complete_upto < bound`)
/// when the piece budget runs out.
pub fn period_set_exact(t: &StuntedSawtooth, bound: usize, budget: usize) -> Result<PeriodSet> {
    if bound == 0 {
        return Err(Error::invalid("bound must be at least 1"));
    }
    if let Some(all) = zero_entropy_orbits_of(t) {
        let periods = all.iter().map(|o| o.period).filter(|&p| p <= bound).collect();
        return Ok(PeriodSet { periods, bound, complete_upto: bound });
    }
    let mut periods = BTreeSet::new();
    let mut it = IteratePieces::new(t);
    let mut complete_upto = 0;
    for p in 1..=bound {
        if it.advance(budget).is_err() {
            break;
        }
        if !exact_orbits_from(t, &it.fixed_points(), p).is_empty() {
            periods.insert(p);
        }
        complete_upto = p;
    }
    Ok(PeriodSet { periods, bound, complete_upto })
}

fn stability_of(multiplier: f64) -> Stability {
    let a = multiplier.abs();
    if (a - 1.0).abs() <= NEUTRAL_TOL {
        Stability::Neutral
    } else if a < 1.0 {
        Stability::Attracting
    } else {
        Stability::Repelling
    }
}

/// Periodic orbits of minimal period `p` of a float map.
///
/// Roots of `fᵖ(x) - x` are bracketed on a grid refined by the laps of `fᵖ`
/// and polished by bisection. Tangent orbits without a sign change can be
/// missed; orbits found with multiplier near ±1 are tagged neutral.
pub fn periodic_points(map: &dyn IntervalMap, p: usize) -> Result<Vec<FloatOrbit>> {
    if p == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    let d = map.domain();
    let turning = turning_points_budgeted(map, p)?;
    let mut knots = vec![d.lo];
    knots.extend(turning.iter().copied());
    knots.push(d.hi);
    let laps = knots.len() - 1;
    let per_lap = (FLOAT_GRID_CELLS / laps).max(4);
    let g = |x: f64| iterate_unchecked(map, x, p) - x;
    let scale = d.width().max(1.0);
    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut x0 = a;
        let mut g0 = g(a);
        if g0 == 0.0 {
            roots.push(a);
        }
        for k in 1..=per_lap {
            let x1 = if k == per_lap { b } else { a + (b - a) * k as f64 / per_lap as f64 };
            let g1 = g(x1);
            if g1 == 0.0 {
                roots.push(x1);
            } else if g0 != 0.0 && g0.signum() != g1.signum() {
                roots.push(bisect(&g, x0, x1, g0));
            }
            x0 = x1;
            g0 = g1;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);

    let mut orbits: Vec<FloatOrbit> = Vec::new();
    for &x in &roots {
        let multiplier = iterate_derivative(map, x, p);
        let tol = FLOAT_ORBIT_TOL * multiplier.abs().max(1.0) * scale;
        if (iterate_unchecked(map, x, p) - x).abs() > tol {
            continue;
        }
        let proper = prime_factors(p)
            .into_iter()
            .any(|q| (iterate_unchecked(map, x, p / q) - x).abs() <= tol.max(1e-9 * scale));
        if proper {
            continue;
        }
        let mut points: Vec<f64> = (0..p).map(|j| iterate_unchecked(map, x, j)).collect();
        let start = (0..p)
            .min_by(|&i, &j| points[i].partial_cmp(&points[j]).unwrap_or(Ordering::Equal))
            .unwrap_or(0);
        points.rotate_left(start);
        if orbits.iter().any(|o| (o.points[0] - points[0]).abs() <= 1e-8 * scale) {
            continue;
        }
        orbits.push(FloatOrbit { points, period: p, stability: stability_of(multiplier), multiplier });
    }
    orbits.sort_by(|a, b| a.points[0].partial_cmp(&b.points[0]).unwrap_or(Ordering::Equal));
    Ok(orbits)
}

fn turning_points_budgeted(map: &dyn IntervalMap, p: usize) -> Result<Vec<f64>> {
    iterate_turning_points_capped(map, p, FLOAT_LAP_BUDGET)
        .ok_or_else(|| Error::budget(format!("iterate {p} has more than {FLOAT_LAP_BUDGET} turning points")))
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, ga: f64) -> f64 {
    let sa = ga.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Minimal periods `≤ bound` of a float map.
pub fn period_set(map: &dyn IntervalMap, bound: usize) -> Result<PeriodSet> {
    if bound == 0 {
        return Err(Error::invalid("bound must be at least 1"));
    }
    let mut periods = BTreeSet::new();
    let mut complete_upto = 0;
    for p in 1..=bound {
        match periodic_points(map, p) {
            Ok(orbits) => {
                if !orbits.is_empty() {
                    periods.insert(p);
                }
                complete_upto = p;
            }
            Err(Error::Budget(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(PeriodSet { periods, bound, complete_upto })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SpectrumVerdict {
    /// Every found period is a power of two (only as far as the search went).
    YesUpToBound { bound: usize },
    /// A found period that is not a power of two.
    No { witness: usize },
}

pub fn is_power_of_two_spectrum(ps: &PeriodSet) -> SpectrumVerdict {
    match ps.periods.iter().find(|p| !p.is_power_of_two()) {
        Some(&witness) => SpectrumVerdict::No { witness },
        None => SpectrumVerdict::YesUpToBound { bound: ps.complete_upto },
    }
}

/// Position in the Sharkovskii order `3 ◁ 5 ◁ 7 ◁ … ◁ 2·3 ◁ 2·5 ◁ … ◁ 4 ◁ 2 ◁ 1`;
/// smaller keys come first and force everything after them.
fn sharkovskii_key(n: usize) -> (u8, i64, usize) {
    let k = n.trailing_zeros() as i64;
    let odd = n >> k;
    if odd > 1 {
        (0, k, odd)
    } else {
        (1, -k, 0)
    }
}

/// `a` precedes `b` in the Sharkovskii order (strictly).
pub fn sharkovskii_precedes(a: usize, b: usize) -> bool {
    sharkovskii_key(a) < sharkovskii_key(b)
}

/// Periods forced by a period-`p` orbit: `p` and everything after it in the
/// Sharkovskii order. The set is infinite unless `p` is a power of two, so it
/// is exposed as a predicate plus finite listings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForcedPeriods {
    pub p: usize,
}

impl ForcedPeriods {
    pub fn contains(&self, r: usize) -> bool {
        r >= 1 && !sharkovskii_precedes(r, self.p)
    }

    /// `p = 3` forces every period.
    pub fn is_everything(&self) -> bool {
        self.p == 3
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_power_of_two()
    }

    /// Forced periods `≤ bound`, in descending Sharkovskii order (from `p` down to 1).
    pub fn up_to(&self, bound: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (1..=bound).filter(|&r| self.contains(r)).collect();
        v.sort_by_key(|&r| sharkovskii_key(r));
        v
    }
}

pub fn sharkovskii_forces(p: usize) -> Result<ForcedPeriods> {
    if p == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    Ok(ForcedPeriods { p })
}

/// `(period, point)` rows for exact orbits.
pub fn exact_orbits_csv(orbits: &[ExactOrbit]) -> String {
    let mut out = String::from("period,index,point\n");
    for o in orbits {
        for (i, x) in o.points.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", o.period, i, rational::format(x)));
        }
    }
    out
}

pub fn float_orbits_csv(orbits: &[FloatOrbit]) -> String {
    let mut out = String::from("period,index,point\n");
    for o in orbits {
        for (i, x) in o.points.iter().enumerate() {
            out.push_str(&format!("{},{},{:.17e}\n", o.period, i, x));
        }
    }
    out
}
