use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Stunted,
    Polynomial,
    Quadratic,
    Renormalized,
    Custom,
}

/// Floating-point view of a piecewise monotone self-map of an interval.
///
/// Turning points are strictly ordered and interior to the domain. Lap `k`
/// is the closed interval between turning points `k-1` and `k` (with the
/// domain endpoints closing the first and last lap).
pub trait IntervalMap: Send + Sync + fmt::Debug {
    fn domain(&self) -> Interval<f64>;
    fn eval(&self, x: f64) -> f64;
    fn turning_points(&self) -> Vec<f64>;
    fn kind(&self) -> MapKind;

    /// +1 if the map increases on the first lap, -1 otherwise.
    fn epsilon(&self) -> i8 {
        let d = self.domain();
        let first = self.turning_points().first().copied().unwrap_or(d.hi);
        let h = (first - d.lo) * 1e-3;
        if self.eval(d.lo + h) >= self.eval(d.lo) {
            1
        } else {
            -1
        }
    }

    /// `f'(x)`; the default is a central difference kept inside the domain.
    fn derivative(&self, x: f64) -> f64 {
        let d = self.domain();
        let h = 1e-7 * d.width();
        let a = (x - h).max(d.lo);
        let b = (x + h).min(d.hi);
        (self.eval(b) - self.eval(a)) / (b - a)
    }

    /// Orientation of lap `k`: alternates starting from `epsilon`.
    fn lap_sign(&self, k: usize) -> i8 {
        if k % 2 == 0 {
            self.epsilon()
        } else {
            -self.epsilon()
        }
    }
}

pub type SharedMap = Arc<dyn IntervalMap>;

impl<M: IntervalMap + ?Sized> IntervalMap for Arc<M> {
    fn domain(&self) -> Interval<f64> {
        (**self).domain()
    }
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn turning_points(&self) -> Vec<f64> {
        (**self).turning_points()
    }
    fn kind(&self) -> MapKind {
        (**self).kind()
    }
    fn epsilon(&self) -> i8 {
        (**self).epsilon()
    }
    fn derivative(&self, x: f64) -> f64 {
        (**self).derivative(x)
    }
}

/// Map given by a closure with explicitly listed turning points.
pub struct FnMap<F> {
    f: F,
    domain: Interval<f64>,
    turning: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnMap<F> {
    pub fn new(domain: Interval<f64>, turning: Vec<f64>, f: F) -> Self {
        FnMap { f, domain, turning }
    }
}

impl<F> fmt::Debug for FnMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMap")
            .field("domain", &self.domain)
            .field("turning", &self.turning)
            .finish()
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> IntervalMap for FnMap<F> {
    fn domain(&self) -> Interval<f64> {
        self.domain.clone()
    }
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn turning_points(&self) -> Vec<f64> {
        self.turning.clone()
    }
    fn kind(&self) -> MapKind {
        MapKind::Custom
    }
}

/// Relative slack allowed when checking that float orbits stay in the domain.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// `f^n(x)` in floating point; fails if the orbit leaves the domain.
pub fn iterate(map: &dyn IntervalMap, x: f64, n: usize) -> Result<f64> {
    let d = map.domain();
    let slack = DOMAIN_SLACK * d.width().max(1.0);
    if !(d.lo - slack..=d.hi + slack).contains(&x) {
        return Err(Error::invalid(format!("point {x} outside domain [{}, {}]", d.lo, d.hi)));
    }
    let mut y = x;
    for k in 0..n {
        y = map.eval(y);
        if !y.is_finite() || y < d.lo - slack || y > d.hi + slack {
            return Err(Error::numerical(format!("orbit escaped the domain at step {}", k + 1)));
        }
        y = y.clamp(d.lo, d.hi);
    }
    Ok(y)
}

/// `f^n(x)` without domain checks, for inner loops over validated maps.
pub fn iterate_unchecked(map: &dyn IntervalMap, x: f64, n: usize) -> f64 {
    let d = map.domain();
    (0..n).fold(x, |y, _| map.eval(y).clamp(d.lo, d.hi))
}

/// `(fⁿ)'(x)` by the chain rule along the orbit.
pub fn iterate_derivative(map: &dyn IntervalMap, x: f64, n: usize) -> f64 {
    let d = map.domain();
    let mut y = x;
    let mut dy = 1.0;
    for _ in 0..n {
        dy *= map.derivative(y);
        y = map.eval(y).clamp(d.lo, d.hi);
    }
    dy
}

/// Index of the lap containing `x` (a point exactly on turning point `i`
/// is assigned lap `i + 1`, its right neighbour).
pub fn lap_index(turning: &[f64], x: f64) -> usize {
    turning.partition_point(|&c| c <= x)
}

/// Solves `map(x) = target` on the monotone stretch `[a, b]` by bisection.
pub fn solve_monotone(map: &dyn IntervalMap, a: f64, b: f64, target: f64) -> Option<f64> {
    solve_monotone_with(|x| map.eval(x), a, b, target)
}

pub fn solve_monotone_with(g: impl Fn(f64) -> f64, a: f64, b: f64, target: f64) -> Option<f64> {
    let (ga, gb) = (g(a) - target, g(b) - target);
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() {
        return None;
    }
    let (mut lo, mut hi) = (a, b);
    let sign_lo = ga.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid) - target;
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Turning points of `f^n`, sorted: the turning points of `f` together with
/// all `f`-preimages of turning points of `f^{n-1}`.
pub fn iterate_turning_points(map: &dyn IntervalMap, n: usize) -> Vec<f64> {
    iterate_turning_points_capped(map, n, usize::MAX).expect("uncapped")
}

/// Like `iterate_turning_points`, giving up with `None` once some
/// intermediate iterate has more than `cap` turning points.
pub fn iterate_turning_points_capped(map: &dyn IntervalMap, n: usize, cap: usize) -> Option<Vec<f64>> {
    let crit = map.turning_points();
    if n == 0 {
        return Some(Vec::new());
    }
    let d = map.domain();
    let mut bounds = Vec::with_capacity(crit.len() + 2);
    bounds.push(d.lo);
    bounds.extend(crit.iter().copied());
    bounds.push(d.hi);
    let mut current = crit.clone();
    for _ in 1..n {
        let mut next = crit.clone();
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (map.eval(a), map.eval(b));
            let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
            for &t in &current {
                if t > lo && t < hi {
                    if let Some(x) = solve_monotone(map, a, b, t) {
                        next.push(x);
                    }
                }
            }
        }
        next.sort_by(|a, b| a.partial_cmp(b).unwrap());
        next.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
        if next.len() > cap {
            return None;
        }
        current = next;
    }
    Some(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> FnMap<impl Fn(f64) -> f64 + Send + Sync> {
        FnMap::new(Interval::new(-1.0, 1.0).unwrap(), vec![0.0], |x| 1.0 - 2.0 * x * x)
    }

    #[test]
    fn iterate_identity_and_orbit() {
        let q = quad();
        assert_eq!(iterate(&q, 0.3, 0).unwrap(), 0.3);
        assert_eq!(iterate(&q, 0.0, 3).unwrap(), -1.0);
        assert!(iterate(&q, 2.0, 1).is_err());
    }

    #[test]
    fn turning_points_of_iterates() {
        let q = quad();
        assert_eq!(iterate_turning_points(&q, 1), vec![0.0]);
        let t2 = iterate_turning_points(&q, 2);
        assert_eq!(t2.len(), 3);
        assert!((t2[0] + 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(iterate_turning_points(&q, 5).len(), 31);
    }

    #[test]
    fn lap_index_right_convention() {
        assert_eq!(lap_index(&[0.0], -0.1), 0);
        assert_eq!(lap_index(&[0.0], 0.0), 1);
        assert_eq!(lap_index(&[-1.0, 1.0], 2.0), 2);
    }
}
