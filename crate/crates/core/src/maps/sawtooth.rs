//! The sawtooth base map and its stunted (plateau-capped) deformations.
//!
//! All arithmetic here is exact. With integer slopes `±λ` and integer turning
//! points, iterating a rational point never grows its denominator beyond the
//! lcm of its own and that of the plateau data, which is what makes plateau
//! orbits decidable.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::interval::Interval;
use super::interval_map::{IntervalMap, MapKind};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// The piecewise-linear `m`-modal map `S₀` with slopes `±λ`, `λ = m + 2`,
/// extremal values `±λ` and turning points `-m+1, -m+3, …, m-1` on `[-e, e]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SawtoothBase {
    pub m: usize,
    pub epsilon: i8,
    pub lambda: i64,
    #[serde(with = "rational")]
    pub e: Rational,
    #[serde(with = "rational::vec")]
    pub turning_points: Vec<Rational>,
}

impl SawtoothBase {
    pub fn new(m: usize, epsilon: i8) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("sawtooth base needs at least one turning point"));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::invalid(format!("epsilon must be +1 or -1, got {epsilon}")));
        }
        let lambda = m as i64 + 2;
        let e = Rational::new(BigInt::from(m as i64 * lambda), BigInt::from(lambda - 1));
        let turning_points = (0..m as i64).map(|i| int(-(m as i64) + 1 + 2 * i)).collect();
        Ok(SawtoothBase { m, epsilon, lambda, e, turning_points })
    }

    pub fn domain(&self) -> Interval<Rational> {
        Interval { lo: -self.e.clone(), hi: self.e.clone() }
    }

    /// Whether turning point `i` (0-based) is a local maximum of `S₀`.
    pub fn is_max(&self, i: usize) -> bool {
        (self.epsilon == 1) == (i % 2 == 0)
    }

    /// +1 on increasing laps, -1 on decreasing ones; lap `k` runs from
    /// turning point `k-1` to turning point `k`.
    pub fn lap_sign(&self, k: usize) -> i8 {
        if k % 2 == 0 {
            self.epsilon
        } else {
            -self.epsilon
        }
    }

    /// Lap containing `x`; a point exactly on a turning point goes right.
    pub fn lap_of(&self, x: &Rational) -> usize {
        self.turning_points.partition_point(|c| c <= x)
    }

    /// Slope and intercept of the affine branch of lap `k`.
    pub fn lap_affine(&self, k: usize) -> (i64, Rational) {
        let pivot = k.max(1) - 1;
        let c = &self.turning_points[pivot];
        let v = if self.is_max(pivot) { self.lambda } else { -self.lambda };
        let slope = self.lambda * self.lap_sign(k) as i64;
        (slope, int(v) - int(slope) * c)
    }

    /// `S₀(x)` for any real `x` (the affine branches extend past `[-e, e]`).
    pub fn eval_any(&self, x: &Rational) -> Rational {
        let (slope, b) = self.lap_affine(self.lap_of(x));
        int(slope) * x + b
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if !self.domain().contains(x) {
            return Err(Error::invalid(format!("{} outside [-e, e]", rational::format(x))));
        }
        Ok(self.eval_any(x))
    }
}

/// A constant stretch of a stunted map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Plateau {
    #[serde(with = "rational")]
    pub lo: Rational,
    #[serde(with = "rational")]
    pub hi: Rational,
    #[serde(with = "rational")]
    pub value: Rational,
}

impl Plateau {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// One monotone or constant stretch of a stunted map, in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    /// Agrees with lap `lap` of `S₀` on `[lo, hi]`.
    Linear { lo: Rational, hi: Rational, lap: usize },
    /// Plateau `index` on `[lo, hi]`.
    Flat { lo: Rational, hi: Rational, index: usize },
}

impl Piece {
    pub fn bounds(&self) -> (&Rational, &Rational) {
        match self {
            Piece::Linear { lo, hi, .. } | Piece::Flat { lo, hi, .. } => (lo, hi),
        }
    }
}

/// Stunted sawtooth map `T_ξ`: `S₀` with the neighbourhood of each turning
/// point `c_i` flattened to the plateau `Z_i` of value `±ξ_i` (sign flipped
/// at minima).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StuntedSawtooth {
    pub base: SawtoothBase,
    #[serde(with = "rational::vec")]
    pub xi: Vec<Rational>,
    pub plateaus: Vec<Plateau>,
    /// Some neighbouring plateaus share an endpoint.
    pub degenerate: bool,
    #[serde(skip)]
    pieces: Vec<Piece>,
}

impl StuntedSawtooth {
    pub fn new(base: SawtoothBase, xi: Vec<Rational>) -> Result<Self> {
        if xi.len() != base.m {
            return Err(Error::invalid(format!("expected {} signed extremal values, got {}", base.m, xi.len())));
        }
        let e = &base.e;
        for (i, x) in xi.iter().enumerate() {
            if x.abs() > *e {
                return Err(Error::invalid(format!(
                    "xi[{}] = {} outside [-e, e] with e = {}",
                    i + 1,
                    rational::format(x),
                    rational::format(e)
                )));
            }
        }
        let mut degenerate = false;
        for i in 0..xi.len().saturating_sub(1) {
            let sum = &xi[i] + &xi[i + 1];
            if sum.is_negative() {
                return Err(Error::invalid(format!(
                    "plateaus {} and {} overlap: xi[{}] < -xi[{}]",
                    i + 1,
                    i + 2,
                    i + 1,
                    i + 2
                )));
            }
            degenerate |= sum.is_zero();
        }
        let lambda = int(base.lambda);
        let plateaus: Vec<Plateau> = xi
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let c = &base.turning_points[i];
                let w = (&lambda - x) / &lambda;
                let value = if base.is_max(i) { x.clone() } else { -x.clone() };
                Plateau { lo: c - &w, hi: c + &w, value }
            })
            .collect();
        let pieces = build_pieces(&base, &plateaus);
        Ok(StuntedSawtooth { base, xi, plateaus, degenerate, pieces })
    }

    pub fn from_parts(m: usize, epsilon: i8, xi: Vec<Rational>) -> Result<Self> {
        StuntedSawtooth::new(SawtoothBase::new(m, epsilon)?, xi)
    }

    pub fn m(&self) -> usize {
        self.base.m
    }

    pub fn domain(&self) -> Interval<Rational> {
        self.base.domain()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Index of the plateau containing `x` (closed), if any.
    pub fn plateau_of(&self, x: &Rational) -> Option<usize> {
        self.plateaus.iter().position(|z| z.contains(x))
    }

    /// `T(x)` for `x` in the domain; callers guarantee the range.
    pub fn eval_unchecked(&self, x: &Rational) -> Rational {
        match self.plateau_of(x) {
            Some(i) => self.plateaus[i].value.clone(),
            None => self.base.eval_any(x),
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if !self.domain().contains(x) {
            return Err(Error::invalid(format!("{} outside [-e, e]", rational::format(x))));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Exact `Tⁿ(x)`.
    pub fn iterate(&self, x: &Rational, n: usize) -> Result<Rational> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// Plateau values, indexed like the turning points.
    pub fn plateau_values(&self) -> Vec<Rational> {
        self.plateaus.iter().map(|z| z.value.clone()).collect()
    }

    /// Sup-distance to another member of the same family.
    pub fn sup_distance(&self, other: &StuntedSawtooth) -> Rational {
        self.xi
            .iter()
            .zip(&other.xi)
            .map(|(a, b)| (a - b).abs())
            .fold(Rational::zero(), |acc, d| if d > acc { d } else { acc })
    }

    /// Strict laps of `T` restricted to `[lo, hi]`, as their image intervals
    /// in left-to-right order.
    pub fn branch_images(&self, lo: &Rational, hi: &Rational) -> Vec<Interval<Rational>> {
        let window = Interval { lo: lo.clone(), hi: hi.clone() };
        self.pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Linear { lo: a, hi: b, .. } => {
                    let part = window.overlap(&Interval { lo: a.clone(), hi: b.clone() })?;
                    Some(Interval::hull(self.base.eval_any(&part.lo), self.base.eval_any(&part.hi)))
                }
                Piece::Flat { .. } => None,
            })
            .collect()
    }
}

fn build_pieces(base: &SawtoothBase, plateaus: &[Plateau]) -> Vec<Piece> {
    let mut pieces = Vec::with_capacity(2 * plateaus.len() + 1);
    let mut cursor = -base.e.clone();
    for (i, z) in plateaus.iter().enumerate() {
        if cursor < z.lo {
            pieces.push(Piece::Linear { lo: cursor.clone(), hi: z.lo.clone(), lap: i });
        }
        pieces.push(Piece::Flat { lo: z.lo.clone(), hi: z.hi.clone(), index: i });
        cursor = z.hi.clone();
    }
    if cursor < base.e {
        pieces.push(Piece::Linear { lo: cursor, hi: base.e.clone(), lap: plateaus.len() });
    }
    pieces
}

impl IntervalMap for StuntedSawtooth {
    fn domain(&self) -> Interval<f64> {
        let e = rational::to_f64(&self.base.e);
        Interval { lo: -e, hi: e }
    }

    fn eval(&self, x: f64) -> f64 {
        for z in &self.plateaus {
            if rational::to_f64(&z.lo) <= x && x <= rational::to_f64(&z.hi) {
                return rational::to_f64(&z.value);
            }
        }
        let k = self
            .base
            .turning_points
            .partition_point(|c| rational::to_f64(c) <= x);
        let (slope, b) = self.base.lap_affine(k);
        slope as f64 * x + rational::to_f64(&b)
    }

    /// Plateau centres stand in for turning points.
    fn turning_points(&self) -> Vec<f64> {
        self.base.turning_points.iter().map(rational::to_f64).collect()
    }

    fn kind(&self) -> MapKind {
        MapKind::Stunted
    }

    fn epsilon(&self) -> i8 {
        self.base.epsilon
    }
}

/// `true` when `x` is one of the two endpoints `±e`.
pub fn is_endpoint(base: &SawtoothBase, x: &Rational) -> bool {
    x.abs() == base.e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn base_constants() {
        let b1 = SawtoothBase::new(1, 1).unwrap();
        assert_eq!((b1.lambda, b1.e.clone()), (3, ratio(3, 2)));
        assert_eq!(b1.turning_points, vec![int(0)]);
        let b2 = SawtoothBase::new(2, 1).unwrap();
        assert_eq!((b2.lambda, b2.e.clone()), (4, ratio(8, 3)));
        assert_eq!(b2.turning_points, vec![int(-1), int(1)]);
        let b3 = SawtoothBase::new(3, -1).unwrap();
        assert_eq!((b3.lambda, b3.e.clone()), (5, ratio(15, 4)));
        assert!(SawtoothBase::new(0, 1).is_err());
        assert!(SawtoothBase::new(2, 0).is_err());
    }

    #[test]
    fn s0_values() {
        let b = SawtoothBase::new(1, 1).unwrap();
        assert_eq!(b.eval(&ratio(-3, 2)).unwrap(), ratio(-3, 2));
        assert_eq!(b.eval(&int(0)).unwrap(), int(3));
        assert_eq!(b.eval(&ratio(1, 2)).unwrap(), ratio(3, 2));
        assert!(b.eval(&int(2)).is_err());
    }

    #[test]
    fn s0_endpoints_and_extrema() {
        for m in 1..=5 {
            for eps in [1, -1] {
                let b = SawtoothBase::new(m, eps).unwrap();
                for x in [-b.e.clone(), b.e.clone()] {
                    let y = b.eval(&x).unwrap();
                    assert!(is_endpoint(&b, &y), "m={m} eps={eps}");
                }
                for (i, c) in b.turning_points.iter().enumerate() {
                    let v = b.eval(c).unwrap();
                    assert_eq!(v, int(if b.is_max(i) { b.lambda } else { -b.lambda }));
                }
                let rises = b.eval_any(&(-b.e.clone() + ratio(1, 100))) > b.eval_any(&-b.e.clone());
                assert_eq!(rises, eps == 1);
            }
        }
    }

    #[test]
    fn plateaus_from_xi() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        assert_eq!(t.plateaus[0], Plateau { lo: ratio(-1, 2), hi: ratio(1, 2), value: ratio(3, 2) });
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(1, 2)]).unwrap();
        assert_eq!((t.plateaus[0].lo.clone(), t.plateaus[0].hi.clone()), (ratio(-5, 6), ratio(5, 6)));
        assert!(t.plateaus[0].contains(&t.plateaus[0].value));
    }

    #[test]
    fn touching_plateaus_accepted() {
        let t = StuntedSawtooth::from_parts(2, 1, vec![int(0), int(0)]).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.plateaus[0].hi, t.plateaus[1].lo);
        assert!(StuntedSawtooth::from_parts(2, 1, vec![ratio(-1, 2), ratio(1, 4)]).is_err());
        assert!(StuntedSawtooth::from_parts(1, 1, vec![int(2)]).is_err());
    }

    #[test]
    fn continuity_at_plateau_edges() {
        let t = StuntedSawtooth::from_parts(3, 1, vec![int(3), int(1), int(2)]).unwrap();
        for z in &t.plateaus {
            assert_eq!(t.base.eval_any(&z.lo), z.value);
            assert_eq!(t.base.eval_any(&z.hi), z.value);
        }
    }

    #[test]
    fn full_trapezoid_orbit() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        assert_eq!(t.iterate(&ratio(3, 2), 2).unwrap(), ratio(-3, 2));
        assert_eq!(t.iterate(&ratio(1, 3), 0).unwrap(), ratio(1, 3));
    }

    #[test]
    fn branch_images_of_full_map() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        let imgs = t.branch_images(&ratio(-3, 2), &ratio(3, 2));
        assert_eq!(imgs.len(), 2);
        assert!(imgs.iter().all(|j| j.lo == ratio(-3, 2) && j.hi == ratio(3, 2)));
    }
}
