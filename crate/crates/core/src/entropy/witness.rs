//! Certificates of positive entropy: a periodic orbit whose period is not a
//! power of two, or an interval over which some iterate has two full
//! branches (a horseshoe).

use std::collections::VecDeque;

use serde::Serialize;

use super::markov::{MarkovConfig, TransitionMatrix};
use crate::maps::interval_map::IntervalMap;
use crate::maps::{Interval, Piece, PolynomialTypeB, QuadraticMap, StuntedSawtooth};
use crate::periods::{exact_minimal_period, periodic_points, ExactOrbit, FloatOrbit, IteratePieces, Stability, DEFAULT_PIECE_BUDGET};
use crate::rational::{self, int, Rational};
use crate::renorm::RenormalizedMap;

/// `f^k` maps each of two interior-disjoint subintervals of `j` affinely onto
/// a superset of `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Horseshoe {
    #[serde(serialize_with = "rational::interval::serialize")]
    pub j: Interval<Rational>,
    pub k: usize,
    #[serde(serialize_with = "rational::interval::serialize_all")]
    pub branches: [Interval<Rational>; 2],
}

impl Horseshoe {
    pub fn verify(&self, t: &StuntedSawtooth) -> bool {
        let [a, b] = &self.branches;
        if !self.j.covers(a) || !self.j.covers(b) || a.interiors_meet(b) {
            return false;
        }
        self.branches.iter().all(|br| match affine_image(t, br, self.k) {
            Some(img) => img.covers(&self.j),
            None => false,
        })
    }
}

/// Image of `iv` under `T^k` if every intermediate image lies in one linear piece.
fn affine_image(t: &StuntedSawtooth, iv: &Interval<Rational>, k: usize) -> Option<Interval<Rational>> {
    let mut cur = iv.clone();
    for _ in 0..k {
        let inside = t.pieces().iter().any(|p| match p {
            Piece::Linear { lo, hi, .. } => lo <= &cur.lo && &cur.hi <= hi,
            Piece::Flat { .. } => false,
        });
        if !inside {
            return None;
        }
        cur = Interval::hull(t.base.eval_any(&cur.lo), t.base.eval_any(&cur.hi));
    }
    Some(cur)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    ExactPeriodic(ExactOrbit),
    FloatPeriodic(FloatOrbit),
    Horseshoe(Horseshoe),
}

impl Witness {
    /// Period of the orbit, for periodic witnesses.
    pub fn period(&self) -> Option<usize> {
        match self {
            Witness::ExactPeriodic(o) => Some(o.period),
            Witness::FloatPeriodic(o) => Some(o.period),
            Witness::Horseshoe(_) => None,
        }
    }

    /// Re-checks the witness against an exact map.
    pub fn verify_exact(&self, t: &StuntedSawtooth) -> bool {
        match self {
            Witness::ExactPeriodic(o) => !o.period.is_power_of_two() && o.verify(t),
            Witness::Horseshoe(h) => h.verify(t),
            Witness::FloatPeriodic(_) => false,
        }
    }

    pub fn verify_float(&self, map: &dyn IntervalMap) -> bool {
        match self {
            Witness::FloatPeriodic(o) => !o.period.is_power_of_two() && o.verify(map),
            _ => false,
        }
    }
}

/// Maps that can be searched for positive-entropy witnesses.
pub trait WitnessSearch {
    fn find_witness(&self, period_bound: usize) -> Option<Witness>;
}

impl WitnessSearch for StuntedSawtooth {
    /// With a Markov partition, zero entropy is decided on the graph and
    /// rules out any witness. Otherwise the smallest non-power-of-two period
    /// up to the bound comes from the exact pieces of `Tᵖ`, and when those
    /// outgrow the budget a horseshoe is read off the graph.
    fn find_witness(&self, period_bound: usize) -> Option<Witness> {
        let tm = TransitionMatrix::build(self, MarkovConfig::default().orbit_budget).ok();
        if tm.as_ref().is_some_and(|tm| tm.is_zero_entropy()) {
            return None;
        }
        let mut it = IteratePieces::new(self);
        for p in 1..=period_bound {
            if it.advance(DEFAULT_PIECE_BUDGET).is_err() {
                break;
            }
            if p.is_power_of_two() {
                continue;
            }
            let roots = it.fixed_points();
            if let Some(x) = roots.iter().find(|x| exact_minimal_period(self, x, p) == Some(p)) {
                return Some(Witness::ExactPeriodic(exact_orbit(self, x, p)));
            }
        }
        graph_witness(self, tm.as_ref()?, period_bound)
    }
}

pub(crate) fn exact_orbit(t: &StuntedSawtooth, x: &Rational, p: usize) -> ExactOrbit {
    let mut points = Vec::with_capacity(p);
    let mut y = x.clone();
    for _ in 0..p {
        points.push(y.clone());
        y = t.eval_unchecked(&y);
    }
    let start = (0..p).min_by(|&i, &j| points[i].cmp(&points[j])).unwrap_or(0);
    points.rotate_left(start);
    let stability = if points.iter().any(|y| t.plateau_of(y).is_some()) {
        Stability::PlateauAbsorbed
    } else {
        Stability::Repelling
    };
    ExactOrbit { points, period: p, stability }
}

/// Shortest path from `from` to `to` inside `allowed`, as a state list
/// excluding `to`.
fn shortest_path(tm: &TransitionMatrix, allowed: &[bool], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; tm.len()];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![];
            let mut x = to;
            while x != from {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for v in tm.successors(u) {
            if allowed[v] && prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Two distinct cycles through a branching state of a component with
/// spectral radius above one give both a horseshoe and periodic orbits of
/// every length `a·|c₁| + |c₂|`.
fn graph_witness(t: &StuntedSawtooth, tm: &TransitionMatrix, period_bound: usize) -> Option<Witness> {
    for comp in tm.components() {
        let mut allowed = vec![false; tm.len()];
        for &i in &comp {
            allowed[i] = true;
        }
        let branching = comp.iter().copied().find(|&v| tm.successors(v).filter(|&u| allowed[u]).count() >= 2);
        let Some(v) = branching else { continue };
        let succ: Vec<usize> = tm.successors(v).filter(|&u| allowed[u]).take(2).collect();
        let cycle = |u: usize| -> Option<Vec<usize>> {
            let mut c = vec![v];
            if u != v {
                c.extend(shortest_path(tm, &allowed, u, v)?);
            }
            Some(c)
        };
        let (c1, c2) = (cycle(succ[0])?, cycle(succ[1])?);
        for reps in 1..=16 {
            let len = reps * c1.len() + c2.len();
            if len > period_bound {
                break;
            }
            if len.is_power_of_two() {
                continue;
            }
            let mut walk = c1.repeat(reps);
            walk.extend_from_slice(&c2);
            if let Some(x) = walk_fixed_point(t, tm, &walk) {
                if exact_minimal_period(t, &x, len) == Some(len) {
                    return Some(Witness::ExactPeriodic(exact_orbit(t, &x, len)));
                }
            }
        }
        let w1: Vec<usize> = c1.iter().chain(&c2).copied().collect();
        let w2: Vec<usize> = c2.iter().chain(&c1).copied().collect();
        let h = Horseshoe {
            j: tm.states[v].interval(),
            k: w1.len(),
            branches: [cylinder(t, tm, &w1)?, cylinder(t, tm, &w2)?],
        };
        let [a, b] = &h.branches;
        let branches = if a.lo <= b.lo { [a.clone(), b.clone()] } else { [b.clone(), a.clone()] };
        return Some(Witness::Horseshoe(Horseshoe { branches, ..h }));
    }
    None
}

/// Points of `walk[0]` whose orbit follows the closed walk back to `walk[0]`.
pub(crate) fn cylinder(t: &StuntedSawtooth, tm: &TransitionMatrix, walk: &[usize]) -> Option<Interval<Rational>> {
    let mut x = tm.states[walk[0]].interval();
    for &s in walk.iter().rev() {
        let (slope, c) = t.base.lap_affine(tm.states[s].lap);
        let slope = int(slope);
        let pre = Interval::hull((&x.lo - &c) / &slope, (&x.hi - &c) / &slope);
        x = tm.states[s].interval().overlap(&pre)?;
    }
    Some(x)
}

/// Fixed point of the affine composite along a closed walk.
pub(crate) fn walk_fixed_point(t: &StuntedSawtooth, tm: &TransitionMatrix, walk: &[usize]) -> Option<Rational> {
    let (mut s, mut c) = (int(1), int(0));
    for &st in walk {
        let (sl, b) = t.base.lap_affine(tm.states[st].lap);
        let sl = int(sl);
        c = &sl * &c + b;
        s = &sl * &s;
    }
    let x = c / (int(1) - s);
    cylinder(t, tm, walk).filter(|iv| iv.contains(&x)).map(|_| x)
}

fn float_witness(map: &dyn IntervalMap, period_bound: usize) -> Option<Witness> {
    for p in 3..=period_bound {
        if p.is_power_of_two() {
            continue;
        }
        match periodic_points(map, p) {
            Ok(orbits) => {
                if let Some(o) = orbits.into_iter().next() {
                    return Some(Witness::FloatPeriodic(o));
                }
            }
            Err(_) => return None,
        }
    }
    None
}

impl WitnessSearch for dyn IntervalMap {
    fn find_witness(&self, period_bound: usize) -> Option<Witness> {
        float_witness(self, period_bound)
    }
}

macro_rules! float_witness_search {
    ($($ty:ty),*) => {$(
        impl WitnessSearch for $ty {
            fn find_witness(&self, period_bound: usize) -> Option<Witness> {
                float_witness(self, period_bound)
            }
        }
    )*};
}

float_witness_search!(PolynomialTypeB, QuadraticMap, RenormalizedMap);

/// A non-power-of-two periodic orbit with period at most `period_bound`,
/// or a horseshoe; `None` is not a proof of zero entropy.
pub fn positive_entropy_witness<M: WitnessSearch + ?Sized>(map: &M, period_bound: usize) -> Option<Witness> {
    map.find_witness(period_bound.max(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn stunted(xi: &[(i64, i64)]) -> StuntedSawtooth {
        StuntedSawtooth::from_parts(xi.len(), 1, xi.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn trapezoid_has_period_three() {
        let t = stunted(&[(3, 2)]);
        let w = positive_entropy_witness(&t, 64).unwrap();
        assert_eq!(w.period(), Some(3));
        assert!(w.verify_exact(&t));
    }

    #[test]
    fn fixed_plateau_has_none() {
        assert!(positive_entropy_witness(&stunted(&[(1, 2)]), 64).is_none());
    }

    #[test]
    fn graph_horseshoe_verifies() {
        let t = stunted(&[(3, 2)]);
        let tm = TransitionMatrix::build(&t, 100).unwrap();
        let w = graph_witness(&t, &tm, 2).unwrap();
        assert!(matches!(w, Witness::Horseshoe(_)));
        assert!(w.verify_exact(&t));
        let w = graph_witness(&t, &tm, 64).unwrap();
        assert_eq!(w.period(), Some(3));
        assert!(w.verify_exact(&t));
    }

    #[test]
    fn superstable_three_cycle() {
        let q = QuadraticMap::new(-1.754_877_666_246_693).unwrap();
        let w = positive_entropy_witness(&q, 32).unwrap();
        assert_eq!(w.period(), Some(3));
        assert!(w.verify_float(&q));
    }
}
