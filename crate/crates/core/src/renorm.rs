//! Restrictive intervals, the renormalization operator and period-doubling
//! cascades.
//!
//! A restrictive interval of period `n` is a proper `J ∋ c` whose first `n`
//! images have disjoint interiors, with `fⁿ(J) ⊆ J` and `fⁿ(∂J) ⊆ ∂J`. The
//! renormalization rescales `fⁿ|J` affinely to `[-1, 1]`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::interval_map::{iterate_derivative, iterate_unchecked, lap_index, solve_monotone_with, IntervalMap, MapKind, SharedMap};
use crate::maps::{iterate_turning_points, Interval, OneParameterFamily};
use crate::periods::periodic_points;
use crate::symbolic::{Itinerary, Symbol, ADDRESS_TOL};

/// Tolerance for the boundary and invariance conditions, relative to the domain width.
pub const RESTRICTIVE_TOL: f64 = 1e-8;
/// Restrictive intervals narrower than this (relative) are degenerate.
pub const MIN_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictiveInterval {
    pub j: Interval<f64>,
    pub period: usize,
    /// Turning point (index) inside `J`.
    pub turning_point: usize,
    /// Turning points lying in the interior of some `fᵏ(J)`.
    pub turning_points_inside_orbit: Vec<usize>,
    /// Widest among the verified candidates.
    pub maximal: bool,
}

/// `f(I)` for a continuous piecewise monotone `f`.
pub fn image_interval(map: &dyn IntervalMap, iv: &Interval<f64>) -> Interval<f64> {
    let mut lo = map.eval(iv.lo).min(map.eval(iv.hi));
    let mut hi = map.eval(iv.lo).max(map.eval(iv.hi));
    for c in map.turning_points() {
        if iv.lo < c && c < iv.hi {
            let v = map.eval(c);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Interval { lo, hi }
}

/// All solutions of `fⁿ(x) = target` in `[lo, hi]`, one per lap of `fⁿ`.
pub fn iterate_preimages(map: &dyn IntervalMap, n: usize, target: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut knots = vec![lo];
    knots.extend(iterate_turning_points(map, n).into_iter().filter(|&c| lo < c && c < hi));
    knots.push(hi);
    let mut out: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        if let Some(x) = solve_monotone_with(|x| iterate_unchecked(map, x, n), w[0], w[1], target) {
            if out.last().map_or(true, |&y| (x - y).abs() > 1e-14) {
                out.push(x);
            }
        }
    }
    out
}

/// Independent check of the defining conditions (plus a non-attracting
/// boundary orbit, which rules out the tiny intervals around an attracting
/// cycle that satisfy the conditions only up to tolerance).
pub fn verify_restrictive(map: &dyn IntervalMap, ri: &RestrictiveInterval) -> bool {
    check_candidate(map, &ri.j, ri.period, ri.turning_point).is_some()
}

fn check_candidate(map: &dyn IntervalMap, j: &Interval<f64>, n: usize, ci: usize) -> Option<Vec<usize>> {
    let d = map.domain();
    let tol = RESTRICTIVE_TOL * d.width();
    let turning = map.turning_points();
    let c = *turning.get(ci)?;
    if !(j.lo < c && c < j.hi) || j.width() < MIN_WIDTH * d.width() || j.width() > d.width() - tol {
        return None;
    }
    // Boundary goes to boundary.
    let on_boundary = |y: f64| (y - j.lo).abs() <= tol || (y - j.hi).abs() <= tol;
    if !on_boundary(iterate_unchecked(map, j.lo, n)) || !on_boundary(iterate_unchecked(map, j.hi, n)) {
        return None;
    }
    // Images have disjoint interiors and return inside J.
    let mut images = vec![j.clone()];
    for _ in 1..=n {
        let next = image_interval(map, images.last().expect("non-empty"));
        images.push(next);
    }
    let back = &images[n];
    if back.lo < j.lo - tol || back.hi > j.hi + tol {
        return None;
    }
    for a in 0..n {
        for b in a + 1..n {
            let overlap = images[a].hi.min(images[b].hi) - images[a].lo.max(images[b].lo);
            if overlap > tol {
                return None;
            }
        }
    }
    // The periodic boundary orbit must not attract.
    let p = [j.lo, j.hi]
        .into_iter()
        .find(|&x| (iterate_unchecked(map, x, n) - x).abs() <= tol)?;
    if iterate_derivative(map, p, n).abs() < 1.0 - 1e-9 {
        return None;
    }
    let inside = turning
        .iter()
        .enumerate()
        .filter(|(_, &t)| images[..n].iter().any(|iv| iv.lo < t && t < iv.hi))
        .map(|(i, _)| i)
        .collect();
    Some(inside)
}

/// The widest verified restrictive interval of the given period, if any.
///
/// Candidates are `[p, p̂]` with `p` periodic of period dividing `n` and `p̂`
/// the nearest point across a turning point with `fⁿ(p̂) = p`.
pub fn find_restrictive(map: &dyn IntervalMap, period: usize) -> Result<Option<RestrictiveInterval>> {
    if period < 2 {
        return Err(Error::invalid("restrictive intervals need period >= 2"));
    }
    let d = map.domain();
    let mut boundary_points: Vec<f64> = Vec::new();
    for q in (1..=period).filter(|q| period % q == 0) {
        for orbit in periodic_points(map, q)? {
            boundary_points.extend(orbit.points);
        }
    }
    let mut best: Option<RestrictiveInterval> = None;
    for (ci, &c) in map.turning_points().iter().enumerate() {
        for &p in &boundary_points {
            if (p - c).abs() <= RESTRICTIVE_TOL * d.width() {
                continue;
            }
            let (lo, hi) = if p < c { (c, d.hi) } else { (d.lo, c) };
            let roots = iterate_preimages(map, period, p, lo, hi);
            let nearest = roots
                .into_iter()
                .min_by(|a, b| (a - c).abs().partial_cmp(&(b - c).abs()).expect("finite"));
            let Some(q) = nearest else { continue };
            let j = Interval::hull(p, q);
            if let Some(inside) = check_candidate(map, &j, period, ci) {
                if best.as_ref().map_or(true, |b| j.width() > b.j.width()) {
                    best = Some(RestrictiveInterval {
                        j,
                        period,
                        turning_point: ci,
                        turning_points_inside_orbit: inside,
                        maximal: true,
                    });
                }
            }
        }
    }
    Ok(best)
}

/// `Φ ∘ fᴺ ∘ Φ⁻¹` where `Φ(x) = scale·x + shift` maps `J` onto the new domain.
#[derive(Debug, Clone)]
pub struct RenormalizedMap {
    base: SharedMap,
    /// Total iterate `N` of the base map.
    pub period: usize,
    /// `J` in base coordinates.
    pub j: Interval<f64>,
    scale: f64,
    shift: f64,
    domain: Interval<f64>,
    turning: Vec<f64>,
}

impl RenormalizedMap {
    /// The base map itself, as level zero.
    pub fn identity(base: SharedMap) -> Self {
        let domain = base.domain();
        let turning = base.turning_points();
        RenormalizedMap { period: 1, j: domain.clone(), scale: 1.0, shift: 0.0, domain, turning, base }
    }

    pub fn base(&self) -> &SharedMap {
        &self.base
    }

    /// `Φ` reverses orientation.
    pub fn flipped(&self) -> bool {
        self.scale < 0.0
    }

    pub fn to_base(&self, u: f64) -> f64 {
        (u - self.shift) / self.scale
    }

    pub fn from_base(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    /// Renormalizes this map on a restrictive interval `ri` of itself,
    /// normalized to `[-1, 1]` and oriented so the first lap increases.
    pub fn renormalize(&self, ri: &RestrictiveInterval) -> Result<RenormalizedMap> {
        if ri.j.width() < MIN_WIDTH * self.domain.width() {
            return Err(Error::numerical(format!("restrictive interval of width {} is degenerate", ri.j.width())));
        }
        let n = ri.period;
        let j_base = Interval::hull(self.to_base(ri.j.lo), self.to_base(ri.j.hi));
        // Turning points of gⁿ inside J, in this map's coordinates.
        let inner: Vec<f64> = iterate_turning_points(self, n)
            .into_iter()
            .filter(|&u| ri.j.lo < u && u < ri.j.hi)
            .collect();
        let build = |sign: f64| {
            let scale = sign * 2.0 / j_base.width();
            let shift = -sign * (j_base.lo + j_base.hi) / j_base.width();
            let mut m = RenormalizedMap {
                base: self.base.clone(),
                period: self.period * n,
                j: j_base.clone(),
                scale,
                shift,
                domain: Interval { lo: -1.0, hi: 1.0 },
                turning: Vec::new(),
            };
            let mut t: Vec<f64> = inner.iter().map(|&u| m.from_base(self.to_base(u))).collect();
            t.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            m.turning = t;
            m
        };
        let m = build(1.0);
        let first = m.turning.first().copied().unwrap_or(1.0);
        let probe = -1.0 + 0.5 * (first + 1.0);
        Ok(if m.eval(probe) >= m.eval(-1.0) { m } else { build(-1.0) })
    }

    /// Symbolic itinerary of a base point `y ∈ J` under `fᴺ|J`, with laps of
    /// `fᴺ|J` numbered in the orientation of the renormalized coordinate.
    pub fn induced_itinerary(&self, y: f64, depth: usize) -> Result<Itinerary> {
        if !self.j.contains(&y) {
            return Err(Error::invalid(format!("point {y} outside the restrictive interval")));
        }
        let mut crit: Vec<f64> = self.turning.iter().map(|&u| self.to_base(u)).collect();
        crit.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let r = crit.len();
        let flip = self.flipped();
        let tol = ADDRESS_TOL * self.j.width() / 2.0 * self.domain.width();
        let mut x = y;
        let mut symbols = Vec::with_capacity(depth);
        for _ in 0..depth {
            match crit.iter().position(|&c| (x - c).abs() <= tol) {
                Some(k) => {
                    symbols.push(Symbol::Address(if flip { r - k } else { k + 1 }));
                    x = crit[k];
                }
                None => {
                    let k = lap_index(&crit, x);
                    symbols.push(Symbol::Lap(if flip { r - k } else { k }));
                }
            }
            x = iterate_unchecked(self.base.as_ref(), x, self.period).clamp(self.j.lo, self.j.hi);
        }
        Ok(Itinerary { symbols })
    }
}

impl IntervalMap for RenormalizedMap {
    fn domain(&self) -> Interval<f64> {
        self.domain.clone()
    }
    fn eval(&self, u: f64) -> f64 {
        let x = self.to_base(u.clamp(self.domain.lo, self.domain.hi));
        let y = iterate_unchecked(self.base.as_ref(), x, self.period).clamp(self.j.lo, self.j.hi);
        self.from_base(y).clamp(self.domain.lo, self.domain.hi)
    }
    fn turning_points(&self) -> Vec<f64> {
        self.turning.clone()
    }
    fn kind(&self) -> MapKind {
        if self.period == 1 {
            self.base.kind()
        } else {
            MapKind::Renormalized
        }
    }
    fn derivative(&self, u: f64) -> f64 {
        iterate_derivative(self.base.as_ref(), self.to_base(u), self.period)
    }
}

/// `ℛ(f)` on a restrictive interval of `map`.
pub fn renormalize(map: SharedMap, ri: &RestrictiveInterval) -> Result<RenormalizedMap> {
    RenormalizedMap::identity(map).renormalize(ri)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeLevel {
    /// Restrictive interval in base coordinates.
    pub j: Interval<f64>,
    /// Period of this level inside the previous one.
    pub relative_period: usize,
    /// Period over the base map.
    pub total_period: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CascadeTrace {
    pub levels: Vec<CascadeLevel>,
    pub depth: usize,
    /// Stopped because the next interval was too narrow for floats.
    pub degenerate: bool,
    #[serde(skip)]
    pub terminal: Option<RenormalizedMap>,
}

impl CascadeTrace {
    /// Renormalization after the last recorded level.
    pub fn terminal_map(&self) -> Option<&RenormalizedMap> {
        self.terminal.as_ref()
    }
}

/// Nested period-2 restrictive intervals, renormalizing at each level.
pub fn cascade_trace(map: SharedMap, max_depth: usize) -> Result<CascadeTrace> {
    if max_depth == 0 {
        return Err(Error::invalid("cascade depth must be at least 1"));
    }
    let mut current = RenormalizedMap::identity(map);
    let mut levels = Vec::new();
    let mut degenerate = false;
    while levels.len() < max_depth {
        let Some(ri) = find_restrictive(&current, 2)? else { break };
        match current.renormalize(&ri) {
            Ok(next) => {
                levels.push(CascadeLevel { j: next.j.clone(), relative_period: 2, total_period: next.period });
                current = next;
            }
            Err(_) => {
                degenerate = true;
                break;
            }
        }
    }
    Ok(CascadeTrace { depth: levels.len(), levels, degenerate, terminal: Some(current) })
}

/// Relative accuracy of superstable parameters.
pub const SUPERSTABLE_TOL: f64 = 1e-15;

fn critical_return(family: &dyn OneParameterFamily, t: f64, n: usize) -> Result<f64> {
    let f = family.member(t)?;
    let c = family.critical_point();
    Ok(iterate_unchecked(f.as_ref(), c, n) - c)
}

fn bisect_param(family: &dyn OneParameterFamily, n: usize, mut a: f64, mut b: f64) -> Result<f64> {
    let ga = critical_return(family, a, n)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b || (b - a).abs() <= SUPERSTABLE_TOL * m.abs().max(1.0) {
            break;
        }
        let gm = critical_return(family, m, n)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Superstable parameters `c₀, c₁, …, c_k` of the period-doubling cascade:
/// `c_i` is the first root of `f^{2^i}(crit) = crit` below `c_{i-1}`, found
/// by a downward scan with steps of 1/40 of the previous gap, then bisection.
pub fn superstable_sequence(family: &dyn OneParameterFamily, k: usize) -> Result<Vec<f64>> {
    let (lo, hi) = family.param_range();
    let mut params: Vec<f64> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let n = 1usize << i;
        let (start, step) = match params.len() {
            0 => (hi, (hi - lo) / 1000.0),
            1 => {
                let gap = (hi - params[0]).max((hi - lo) / 1000.0);
                (params[0] - gap / 80.0, gap / 40.0)
            }
            len => {
                let gap = params[len - 2] - params[len - 1];
                (params[len - 1] - gap / 80.0, gap / 40.0)
            }
        };
        let mut a = start;
        let mut ga = critical_return(family, a, n)?;
        let mut found = None;
        while a - step >= lo {
            let b = a - step;
            let gb = critical_return(family, b, n)?;
            if ga == 0.0 {
                found = Some(a);
                break;
            }
            if gb.signum() != ga.signum() {
                found = Some(bisect_param(family, n, b, a)?);
                break;
            }
            a = b;
            ga = gb;
        }
        let c = found.ok_or_else(|| {
            Error::numerical(format!(
                "no superstable parameter of period {n} bracketed below {start} in [{lo}, {hi}] for family {}",
                family.name()
            ))
        })?;
        params.push(c);
    }
    Ok(params)
}

pub fn superstable_parameter(family: &dyn OneParameterFamily, k: usize) -> Result<f64> {
    Ok(*superstable_sequence(family, k)?.last().expect("k + 1 parameters"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperstableSequence {
    pub family: String,
    /// `c_0, …, c_{k_max}`.
    pub params: Vec<f64>,
    /// `δ_k` for `k = 2..=k_max`.
    pub deltas: Vec<f64>,
    /// Some gap `|c_k − c_{k−1}|` fell below `1e3·ε_machine`.
    pub precision_loss: bool,
}

impl SuperstableSequence {
    pub fn delta(&self) -> f64 {
        *self.deltas.last().expect("k_max >= 2")
    }

    /// Accumulation point extrapolated from the last two parameters.
    pub fn accumulation(&self) -> f64 {
        let n = self.params.len();
        let (a, b) = (self.params[n - 2], self.params[n - 1]);
        b + (b - a) / (self.delta() - 1.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,c_k,delta_k\n");
        for (k, c) in self.params.iter().enumerate() {
            let d = if k >= 2 { format!("{:.12}", self.deltas[k - 2]) } else { String::new() };
            out.push_str(&format!("{k},{c:.17e},{d}\n"));
        }
        out
    }
}

/// `δ_k = (c_{k−1} − c_{k−2}) / (c_k − c_{k−1})` up to `k_max`.
pub fn feigenbaum_delta(family: &dyn OneParameterFamily, k_max: usize) -> Result<SuperstableSequence> {
    if k_max < 5 {
        return Err(Error::invalid(format!("feigenbaum_delta needs k_max >= 5, got {k_max}")));
    }
    let params = superstable_sequence(family, k_max)?;
    let deltas = (2..=k_max)
        .map(|k| (params[k - 1] - params[k - 2]) / (params[k] - params[k - 1]))
        .collect();
    let precision_loss = params.windows(2).any(|w| (w[1] - w[0]).abs() < 1e3 * f64::EPSILON);
    Ok(SuperstableSequence { family: family.name(), params, deltas, precision_loss })
}

/// Convenience: a shared handle for a renormalized map.
pub fn shared(map: RenormalizedMap) -> SharedMap {
    Arc::new(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{QuadraticFamily, QuadraticMap, StuntedSawtooth};
    use crate::rational::ratio;

    #[test]
    fn basilica_interval() {
        let f = QuadraticMap::new(-1.0).unwrap();
        let ri = find_restrictive(&f, 2).unwrap().unwrap();
        let alpha = (1.0 - 5f64.sqrt()) / 2.0;
        assert!((ri.j.lo - alpha).abs() < 1e-10 && (ri.j.hi + alpha).abs() < 1e-10, "{:?}", ri.j);
        assert!(verify_restrictive(&f, &ri));
        let r = renormalize(Arc::new(f), &ri).unwrap();
        assert_eq!(r.turning_points().len(), 1);
        let c = r.turning_points()[0];
        assert!(c.abs() < 1e-12 && (r.eval(c) - c).abs() < 1e-12);
        assert_eq!(r.epsilon(), 1);
    }

    #[test]
    fn full_maps_are_not_renormalizable() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        assert!(find_restrictive(&t, 2).unwrap().is_none());
        let q = QuadraticMap::new(-2.0).unwrap();
        assert!(find_restrictive(&q, 2).unwrap().is_none());
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(1, 2)]).unwrap();
        assert_eq!(cascade_trace(Arc::new(t), 4).unwrap().depth, 0);
    }

    #[test]
    fn first_superstable_parameters() {
        let fam = QuadraticFamily::default();
        let c = superstable_sequence(&fam, 2).unwrap();
        assert!(c[0].abs() < 1e-12);
        assert!((c[1] + 1.0).abs() < 1e-12);
        assert!((c[2] + 1.310_702_641_336_83).abs() < 1e-9);
    }

    #[test]
    fn cascade_depth_at_superstable_parameter() {
        let fam = QuadraticFamily::default();
        let c3 = superstable_parameter(&fam, 3).unwrap();
        let trace = cascade_trace(Arc::new(QuadraticMap::new(c3).unwrap()), 10).unwrap();
        assert_eq!(trace.depth, 3);
        assert!(trace.levels.iter().all(|l| l.relative_period == 2));
        let g = trace.terminal_map().unwrap();
        let c = g.turning_points()[0];
        assert!((g.eval(c) - c).abs() < 1e-8);
        for w in trace.levels.windows(2) {
            assert!(w[0].j.covers(&w[1].j));
        }
    }

    #[test]
    fn affine_conjugate_renormalizes_alike() {
        let f = QuadraticMap::new(-1.0).unwrap();
        let beta = f.beta();
        // g = A f A⁻¹ with A(x) = (x + beta) / 2 - 1 mapping [-β, β] onto [-1, β - 1].
        let a = move |x: f64| (x + beta) / 2.0 - 1.0;
        let ainv = move |y: f64| 2.0 * (y + 1.0) - beta;
        let g = crate::maps::FnMap::new(Interval::new(a(-beta), a(beta)).unwrap(), vec![a(0.0)], move |y| a(f.eval(ainv(y))));
        let rf = renormalize(Arc::new(f), &find_restrictive(&f, 2).unwrap().unwrap()).unwrap();
        let ri = find_restrictive(&g, 2).unwrap().unwrap();
        let rg = renormalize(Arc::new(g), &ri).unwrap();
        for k in 0..=20 {
            let u = -1.0 + k as f64 / 10.0;
            assert!((rf.eval(u) - rg.eval(u)).abs() < 1e-9);
        }
    }
}
