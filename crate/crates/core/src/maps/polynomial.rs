//! Polynomial maps of `[-1, 1]` built from rescaled unicritical stages, and
//! the real quadratic family.

use std::sync::Arc;

use serde::Serialize;

use super::interval::Interval;
use super::interval_map::{solve_monotone_with, IntervalMap, MapKind, SharedMap};
use crate::error::{Error, Result};

/// Tolerance on the stage fixed-point equation `b^ℓ + a = b`.
pub const STAGE_ROOT_TOL: f64 = 1e-14;

/// One stage `q(x) = -((b x)^ℓ + a) / b`, the conjugate of `z^ℓ + a` by
/// `z = -b x`, so that `q(-1) = q(1) = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage {
    pub ell: u32,
    pub a: f64,
    pub b: f64,
}

impl Stage {
    pub fn new(ell: u32, a: f64) -> Result<Self> {
        if ell < 2 || ell % 2 != 0 {
            return Err(Error::invalid(format!("stage order must be even and at least 2, got {ell}")));
        }
        if !a.is_finite() {
            return Err(Error::invalid("stage parameter must be finite"));
        }
        let b = invariant_radius(ell, a).ok_or_else(|| {
            Error::invalid(format!(
                "z^{ell} + ({a}) has no invariant interval: b^{ell} + a = b has no admissible positive root"
            ))
        })?;
        if a < -b {
            return Err(Error::invalid(format!(
                "z^{ell} + ({a}) escapes [-b, b] with b = {b}: critical value below -b"
            )));
        }
        Ok(Stage { ell, a, b })
    }

    pub fn eval(&self, x: f64) -> f64 {
        -((self.b * x).powi(self.ell as i32) + self.a) / self.b
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -(self.ell as f64) * (self.b * x).powi(self.ell as i32 - 1)
    }

    /// `q(0)`.
    pub fn critical_value(&self) -> f64 {
        -self.a / self.b
    }

    /// Positive zero of the stage, when `a < 0`.
    pub fn positive_root(&self) -> Option<f64> {
        (self.a < 0.0).then(|| (-self.a).powf(1.0 / self.ell as f64) / self.b)
    }
}

/// Largest root of `g(b) = b^ℓ + a - b`, bracketed to the right of the
/// minimum of `g` where `g` is increasing.
fn invariant_radius(ell: u32, a: f64) -> Option<f64> {
    let g = |b: f64| b.powi(ell as i32) + a - b;
    let b_min = (1.0 / ell as f64).powf(1.0 / (ell as f64 - 1.0));
    if g(b_min) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (b_min, 2.0 + a.abs());
    while hi - lo > STAGE_ROOT_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Composition `q_b ∘ … ∘ q_1` of stages on `[-1, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct PolynomialTypeB {
    pub stages: Vec<Stage>,
    turning: Vec<f64>,
    /// Stage (1-based) that contributes each turning point.
    turning_stage: Vec<usize>,
}

impl PolynomialTypeB {
    pub fn new(stages: &[(u32, f64)]) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::invalid("type-b polynomial needs at least one stage"));
        }
        let stages = stages
            .iter()
            .enumerate()
            .map(|(i, &(ell, a))| Stage::new(ell, a).map_err(|e| Error::invalid(format!("stage {}: {e}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_stages(stages))
    }

    pub fn from_stages(stages: Vec<Stage>) -> Self {
        let mut turning: Vec<(f64, usize)> = Vec::new();
        for k in 0..stages.len() {
            if k == 0 {
                turning.push((0.0, 1));
                continue;
            }
            // New turning points: zeros of the partial composition.
            let partial = |x: f64| stages[..k].iter().fold(x, |y, s| s.eval(y));
            let mut bounds = vec![-1.0];
            bounds.extend(turning.iter().map(|t| t.0));
            bounds.push(1.0);
            let mut fresh = Vec::new();
            for w in bounds.windows(2) {
                let (ga, gb) = (partial(w[0]), partial(w[1]));
                if ga.signum() != gb.signum() && ga != 0.0 && gb != 0.0 {
                    if let Some(x) = solve_monotone_with(partial, w[0], w[1], 0.0) {
                        fresh.push((x, k + 1));
                    }
                }
            }
            turning.extend(fresh);
            turning.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        let (turning, turning_stage) = turning.into_iter().unzip();
        PolynomialTypeB { stages, turning, turning_stage }
    }

    /// Stage that created each turning point, aligned with `turning_points()`.
    pub fn turning_stages(&self) -> &[usize] {
        &self.turning_stage
    }

    /// Stages other than the last must have a positive critical value.
    pub fn membership_violations(&self) -> Vec<usize> {
        let last = self.stages.len();
        self.stages
            .iter()
            .enumerate()
            .filter(|(i, s)| i + 1 != last && s.critical_value() <= 0.0)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Largest deviation of `q_i(±1)` from `-1` over all stages.
    pub fn boundary_defect(&self) -> f64 {
        self.stages
            .iter()
            .flat_map(|s| [s.eval(-1.0), s.eval(1.0)])
            .map(|v| (v + 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl IntervalMap for PolynomialTypeB {
    fn domain(&self) -> Interval<f64> {
        Interval { lo: -1.0, hi: 1.0 }
    }
    fn eval(&self, x: f64) -> f64 {
        self.stages.iter().fold(x, |y, s| s.eval(y))
    }
    fn turning_points(&self) -> Vec<f64> {
        self.turning.clone()
    }
    fn kind(&self) -> MapKind {
        MapKind::Polynomial
    }
    fn epsilon(&self) -> i8 {
        1
    }
    fn derivative(&self, x: f64) -> f64 {
        let mut y = x;
        let mut dy = 1.0;
        for s in &self.stages {
            dy *= s.derivative(y);
            y = s.eval(y);
        }
        dy
    }
}

/// Outcome of rebuilding a decomposition from a composed map.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Every decomposition consistent with the samples (unique when len 1).
    pub candidates: Vec<Vec<f64>>,
}

const SAMPLE_TOL: f64 = 1e-8;

/// Recovers the stage parameters `a_i` of a composed map from its turning
/// points and maximum, given the stage orders.
///
/// Stage `j` is pinned by the positive zero `r_j` of `q_j`, which is the
/// absolute value of `Q_{j-1}` at some turning point of the composition;
/// each candidate is followed and the survivors are those whose rebuilt
/// composition matches `target` on a sample grid.
pub fn reconstruct_stages(target: &dyn IntervalMap, ells: &[u32]) -> Result<Reconstruction> {
    if ells.is_empty() {
        return Err(Error::invalid("no stage orders given"));
    }
    let turning = target.turning_points();
    let top = turning.iter().map(|&t| target.eval(t)).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    search(target, ells, &turning, top, &mut prefix, &mut out);
    Ok(Reconstruction { candidates: out })
}

fn search(target: &dyn IntervalMap, ells: &[u32], turning: &[f64], top: f64, prefix: &mut Vec<Stage>, out: &mut Vec<Vec<f64>>) {
    let j = prefix.len();
    let ell = ells[j];
    if j + 1 == ells.len() {
        // Last stage: its critical value is the maximum of the map.
        let Some(a) = invert_monotone(|a| Stage::new(ell, a).map(|s| s.critical_value()).ok(), ell, top) else {
            return;
        };
        let Ok(stage) = Stage::new(ell, a) else { return };
        prefix.push(stage);
        let candidate = PolynomialTypeB { stages: prefix.clone(), turning: Vec::new(), turning_stage: Vec::new() };
        let ok = (0..=200).all(|i| {
            let x = -1.0 + 2.0 * i as f64 / 200.0;
            (candidate.eval(x) - target.eval(x)).abs() < SAMPLE_TOL
        });
        if ok && !out.iter().any(|c: &Vec<f64>| c.iter().zip(prefix.iter()).all(|(a, s)| (a - s.a).abs() < 1e-7)) {
            out.push(prefix.iter().map(|s| s.a).collect());
        }
        prefix.pop();
        return;
    }
    let partial = |x: f64| prefix.iter().fold(x, |y, s| s.eval(y));
    let mut radii: Vec<f64> = turning
        .iter()
        .map(|&t| partial(t).abs())
        .filter(|r| *r > 1e-9 && *r < 1.0)
        .collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    for r in radii {
        let Some(a) = invert_monotone(|a| Stage::new(ell, a).ok().and_then(|s| s.positive_root()), ell, r) else {
            continue;
        };
        if let Ok(stage) = Stage::new(ell, a) {
            prefix.push(stage);
            search(target, ells, turning, top, prefix, out);
            prefix.pop();
        }
    }
}

/// Solves `h(a) = y` for `a` in the admissible range of order `ell`,
/// assuming `h` is monotone there.
fn invert_monotone(h: impl Fn(f64) -> Option<f64>, ell: u32, y: f64) -> Option<f64> {
    let a_lo = -(2f64.powf(1.0 / (ell as f64 - 1.0))) + 1e-13;
    let b_min = (1.0 / ell as f64).powf(1.0 / (ell as f64 - 1.0));
    let a_hi = b_min - b_min.powi(ell as i32);
    let (mut lo, mut hi) = (a_lo, a_hi);
    let (h_lo, h_hi) = (h(lo)?, h(hi - 1e-13).or_else(|| h(-1e-13))?);
    if (h_lo - y).signum() == (h_hi - y).signum() {
        // The top end may be undefined for positive roots; shrink it.
        hi = -1e-13;
        let h_hi = h(hi)?;
        if (h_lo - y).signum() == (h_hi - y).signum() {
            return None;
        }
    }
    let increasing = h_lo < y;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = h(mid)?;
        if (v < y) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `x² + c` on its dynamical interval `[-β, β]`, `β = (1 + √(1 - 4c)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticMap {
    pub c: f64,
    beta: f64,
}

impl QuadraticMap {
    pub fn new(c: f64) -> Result<Self> {
        if !(-2.0..=0.25).contains(&c) {
            return Err(Error::invalid(format!("quadratic parameter {c} outside [-2, 1/4]")));
        }
        Ok(QuadraticMap { c, beta: 0.5 * (1.0 + (1.0 - 4.0 * c).sqrt()) })
    }

    /// Fixed point `α = (1 - √(1 - 4c)) / 2`.
    pub fn alpha(&self) -> f64 {
        0.5 * (1.0 - (1.0 - 4.0 * self.c).sqrt())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl IntervalMap for QuadraticMap {
    fn domain(&self) -> Interval<f64> {
        Interval { lo: -self.beta, hi: self.beta }
    }
    fn eval(&self, x: f64) -> f64 {
        x * x + self.c
    }
    fn turning_points(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn kind(&self) -> MapKind {
        MapKind::Quadratic
    }
    fn epsilon(&self) -> i8 {
        -1
    }
    fn derivative(&self, x: f64) -> f64 {
        2.0 * x
    }
}

/// A one-parameter family of unimodal maps with a marked critical point.
pub trait OneParameterFamily: Send + Sync {
    fn param_range(&self) -> (f64, f64);
    fn member(&self, t: f64) -> Result<SharedMap>;
    fn critical_point(&self) -> f64;
    /// Short identifier used in reports.
    fn name(&self) -> String;
}

/// `x² + c` over a sub-range of `[-2, 1/4]`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticFamily {
    pub range: (f64, f64),
}

impl Default for QuadraticFamily {
    fn default() -> Self {
        QuadraticFamily { range: (-2.0, 0.25) }
    }
}

impl OneParameterFamily for QuadraticFamily {
    fn param_range(&self) -> (f64, f64) {
        self.range
    }
    fn member(&self, t: f64) -> Result<SharedMap> {
        Ok(Arc::new(QuadraticMap::new(t)?))
    }
    fn critical_point(&self) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "quadratic".into()
    }
}

/// Type-b polynomials along a line `a(t) = a₀ + t·d` in stage parameters.
#[derive(Debug, Clone)]
pub struct TypeBLine {
    pub ells: Vec<u32>,
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub range: (f64, f64),
}

impl TypeBLine {
    pub fn at(&self, t: f64) -> Result<PolynomialTypeB> {
        let stages: Vec<(u32, f64)> = self
            .ells
            .iter()
            .zip(self.origin.iter().zip(&self.direction))
            .map(|(&ell, (a0, d))| (ell, a0 + t * d))
            .collect();
        PolynomialTypeB::new(&stages)
    }
}

impl OneParameterFamily for TypeBLine {
    fn param_range(&self) -> (f64, f64) {
        self.range
    }
    fn member(&self, t: f64) -> Result<SharedMap> {
        Ok(Arc::new(self.at(t)?))
    }
    fn critical_point(&self) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "type_b".into()
    }
}
