//! Lap numbers of iterates.
//!
//! A lap of `fⁿ` is a maximal interval of strict monotonicity; constant
//! stretches (plateaus and their preimages) separate laps and are not
//! counted. Adjacent laps of `fⁿ` always stay separate in `fⁿ⁺¹`, so
//! `ℓ(fⁿ⁺¹) = Σ_L ℓ(f|fⁿ(L))` over the laps `L` of `fⁿ`, which only depends
//! on the multiset of lap images. We propagate that multiset.

use std::collections::HashMap;
use std::hash::Hash;

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::interval_map::IntervalMap;
use crate::maps::{FnMap, Interval, PolynomialTypeB, QuadraticMap, StuntedSawtooth};
use crate::rational::Rational;
use crate::renorm::RenormalizedMap;

/// Lap counts above this are reported as saturated.
pub const DEFAULT_LAP_CAP: u128 = 1_000_000_000;

/// Piecewise monotone dynamics exposing the images of its strict laps.
pub trait LapDynamics {
    type Point: Clone + Eq + Hash + PartialOrd;

    fn lap_domain(&self) -> Interval<Self::Point>;

    /// Images of the strict laps of `f` restricted to `window`, left to right.
    fn branch_images(&self, window: &Interval<Self::Point>) -> Vec<Interval<Self::Point>>;
}

impl LapDynamics for StuntedSawtooth {
    type Point = Rational;

    fn lap_domain(&self) -> Interval<Rational> {
        self.domain()
    }

    fn branch_images(&self, window: &Interval<Rational>) -> Vec<Interval<Rational>> {
        StuntedSawtooth::branch_images(self, &window.lo, &window.hi)
    }
}

/// Relative margin for deciding that a turning point lies inside a window.
const FLOAT_INTERIOR_TOL: f64 = 1e-12;

fn float_branch_images(map: &dyn IntervalMap, window: &Interval<OrderedFloat<f64>>) -> Vec<Interval<OrderedFloat<f64>>> {
    let d = map.domain();
    let tol = FLOAT_INTERIOR_TOL * d.width();
    let (lo, hi) = (window.lo.0, window.hi.0);
    let mut cuts = vec![lo];
    cuts.extend(map.turning_points().into_iter().filter(|&c| c > lo + tol && c < hi - tol));
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| {
            let a = map.eval(w[0]).clamp(d.lo, d.hi);
            let b = map.eval(w[1]).clamp(d.lo, d.hi);
            Interval::hull(OrderedFloat(a), OrderedFloat(b))
        })
        .collect()
}

fn float_domain(map: &dyn IntervalMap) -> Interval<OrderedFloat<f64>> {
    let d = map.domain();
    Interval { lo: OrderedFloat(d.lo), hi: OrderedFloat(d.hi) }
}

impl LapDynamics for dyn IntervalMap {
    type Point = OrderedFloat<f64>;
    fn lap_domain(&self) -> Interval<Self::Point> {
        float_domain(self)
    }
    fn branch_images(&self, window: &Interval<Self::Point>) -> Vec<Interval<Self::Point>> {
        float_branch_images(self, window)
    }
}

macro_rules! float_lap_dynamics {
    ($($ty:ty),*) => {$(
        impl LapDynamics for $ty {
            type Point = OrderedFloat<f64>;
            fn lap_domain(&self) -> Interval<Self::Point> {
                float_domain(self)
            }
            fn branch_images(&self, window: &Interval<Self::Point>) -> Vec<Interval<Self::Point>> {
                float_branch_images(self, window)
            }
        }
    )*};
}

float_lap_dynamics!(PolynomialTypeB, QuadraticMap, RenormalizedMap);

impl<F: Fn(f64) -> f64 + Send + Sync> LapDynamics for FnMap<F> {
    type Point = OrderedFloat<f64>;
    fn lap_domain(&self) -> Interval<Self::Point> {
        float_domain(self)
    }
    fn branch_images(&self, window: &Interval<Self::Point>) -> Vec<Interval<Self::Point>> {
        float_branch_images(self, window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LapCount {
    pub n: usize,
    pub laps: u128,
}

/// `ℓ(fⁿ)` for `n = 1..=n_max`, stopping early once a count exceeds `cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LapSeries {
    pub counts: Vec<LapCount>,
    pub saturated: bool,
}

impl LapSeries {
    /// `(n, ℓ(fⁿ))` lines with a header, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,laps\n");
        for c in &self.counts {
            out.push_str(&format!("{},{}\n", c.n, c.laps));
        }
        out
    }
}

pub fn lap_series<D: LapDynamics + ?Sized>(map: &D, n_max: usize, cap: u128) -> LapSeries {
    let mut states: HashMap<Interval<D::Point>, u128> = HashMap::new();
    states.insert(map.lap_domain(), 1);
    let mut counts = Vec::with_capacity(n_max);
    let mut saturated = false;
    for n in 1..=n_max {
        let mut next: HashMap<Interval<D::Point>, u128> = HashMap::with_capacity(states.len());
        let mut total: u128 = 0;
        for (window, mult) in &states {
            for img in map.branch_images(window) {
                total = total.saturating_add(*mult);
                let slot = next.entry(img).or_insert(0);
                *slot = slot.saturating_add(*mult);
            }
        }
        if total > cap {
            saturated = true;
            break;
        }
        counts.push(LapCount { n, laps: total });
        states = next;
    }
    LapSeries { counts, saturated }
}

pub fn lap_count<D: LapDynamics + ?Sized>(map: &D, n: usize) -> Result<LapCount> {
    if n == 0 {
        return Err(Error::invalid("lap count needs n >= 1"));
    }
    let series = lap_series(map, n, u128::MAX);
    series
        .counts
        .last()
        .copied()
        .filter(|c| c.n == n)
        .ok_or_else(|| Error::budget(format!("lap count of iterate {n} overflowed")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn stunted(xi: &[(i64, i64)]) -> StuntedSawtooth {
        StuntedSawtooth::from_parts(xi.len(), 1, xi.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn first_iterate_has_r_plus_one_laps() {
        assert_eq!(lap_count(&stunted(&[(3, 2)]), 1).unwrap().laps, 2);
        let full2 = stunted(&[(8, 3), (8, 3)]);
        assert_eq!(lap_count(&full2, 1).unwrap().laps, 3);
        let q = QuadraticMap::new(-1.3).unwrap();
        assert_eq!(lap_count(&q, 1).unwrap().laps, 2);
    }

    #[test]
    fn full_trapezoid_doubles() {
        let t = stunted(&[(3, 2)]);
        assert_eq!(lap_count(&t, 2).unwrap().laps, 4);
        let s = lap_series(&t, 20, DEFAULT_LAP_CAP);
        for c in &s.counts {
            assert_eq!(c.laps, 1u128 << c.n);
        }
    }

    #[test]
    fn fixed_plateau_laps_stay_bounded() {
        let s = lap_series(&stunted(&[(1, 2)]), 30, DEFAULT_LAP_CAP);
        let tail: Vec<u128> = s.counts[5..].iter().map(|c| c.laps).collect();
        assert!(tail.windows(2).all(|w| w[0] == w[1]), "{tail:?}");
    }

    #[test]
    fn saturation_flag() {
        let s = lap_series(&stunted(&[(3, 2)]), 40, 1000);
        assert!(s.saturated);
        assert_eq!(s.counts.len(), 9);
        assert!(s.to_csv().starts_with("n,laps\n1,2\n"));
    }

    #[test]
    fn submultiplicative_on_samples() {
        let maps = [stunted(&[(3, 2)]), stunted(&[(5, 4)]), stunted(&[(2, 1), (1, 1)]), stunted(&[(3, 1), (1, 1), (2, 1)])];
        for t in &maps {
            let s = lap_series(t, 12, DEFAULT_LAP_CAP);
            let l = |n: usize| s.counts[n - 1].laps;
            for a in 1..6 {
                for b in 1..6 {
                    assert!(l(a + b) <= l(a) * l(b), "{t:?} a={a} b={b}");
                }
            }
        }
    }
}
