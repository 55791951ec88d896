//! Exact Markov partitions for stunted maps whose plateau orbits are finite.
//!
//! The partition points are `±e`, the plateau endpoints and the forward
//! orbits of all of these. Every non-plateau state then maps affinely onto a
//! union of states, and the entropy is the log of the spectral radius of the
//! resulting 0/1 matrix.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{EntropyEstimate, EntropyMethod};
use crate::error::{Error, Result};
use crate::maps::{Interval, StuntedSawtooth};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovConfig {
    /// Maximum number of distinct partition points generated by the orbits.
    pub orbit_budget: usize,
    /// Stop power iteration once the Collatz–Wielandt bounds agree this closely.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MarkovConfig {
    fn default() -> Self {
        MarkovConfig { orbit_budget: 100_000, tolerance: 1e-13, max_iterations: 100_000 }
    }
}

/// Forward orbit of a point, split into transient and cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteOrbit {
    #[serde(with = "rational::vec")]
    pub points: Vec<Rational>,
    pub preperiod: usize,
    pub period: usize,
}

impl FiniteOrbit {
    pub fn cycle(&self) -> &[Rational] {
        &self.points[self.preperiod..]
    }
}

/// Orbit of `x` until it repeats, failing after `budget` steps.
pub fn finite_orbit(t: &StuntedSawtooth, x: &Rational, budget: usize) -> Result<FiniteOrbit> {
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut y = x.clone();
    loop {
        if let Some(&i) = seen.get(&y) {
            return Ok(FiniteOrbit { period: points.len() - i, preperiod: i, points });
        }
        if points.len() >= budget {
            return Err(Error::budget(format!(
                "orbit of {} did not close within {budget} steps; not Markov at budget",
                rational::format(x)
            )));
        }
        seen.insert(y.clone(), points.len());
        let next = t.eval_unchecked(&y);
        points.push(std::mem::replace(&mut y, next));
    }
}

/// Orbits of the plateau values, in plateau order.
pub fn plateau_orbits(t: &StuntedSawtooth, budget: usize) -> Result<Vec<FiniteOrbit>> {
    t.plateau_values().iter().map(|v| finite_orbit(t, v, budget)).collect()
}

/// One non-plateau Markov interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovState {
    #[serde(with = "rational")]
    pub lo: Rational,
    #[serde(with = "rational")]
    pub hi: Rational,
    /// Lap of the base map carrying this state.
    pub lap: usize,
}

impl MarkovState {
    pub fn interval(&self) -> Interval<Rational> {
        Interval { lo: self.lo.clone(), hi: self.hi.clone() }
    }
}

/// Transition structure: `matrix[i][j] = 1` iff state `i` maps monotonically
/// over state `j`. Plateau stretches are not states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    /// All partition points, sorted; `T` maps this set into itself.
    #[serde(with = "rational::vec")]
    pub points: Vec<Rational>,
    pub states: Vec<MarkovState>,
    pub matrix: Vec<Vec<u8>>,
}

impl TransitionMatrix {
    /// Builds the partition, or fails if some boundary orbit is not finite
    /// within `budget` points overall.
    pub fn build(t: &StuntedSawtooth, budget: usize) -> Result<Self> {
        let e = t.base.e.clone();
        let mut seeds: Vec<Rational> = vec![-e.clone(), e];
        for z in &t.plateaus {
            seeds.push(z.lo.clone());
            seeds.push(z.hi.clone());
        }
        let mut points: BTreeSet<Rational> = BTreeSet::new();
        let mut stack = seeds;
        while let Some(x) = stack.pop() {
            if !points.insert(x.clone()) {
                continue;
            }
            if points.len() > budget {
                return Err(Error::budget(format!(
                    "more than {budget} partition points; not Markov at budget"
                )));
            }
            stack.push(t.eval_unchecked(&x));
        }
        let points: Vec<Rational> = points.into_iter().collect();
        let mut states = Vec::new();
        let mut first_point = Vec::new();
        for (i, w) in points.windows(2).enumerate() {
            let mid = (&w[0] + &w[1]) / rational::int(2);
            if t.plateau_of(&mid).is_some() {
                continue;
            }
            states.push(MarkovState { lo: w[0].clone(), hi: w[1].clone(), lap: t.base.lap_of(&mid) });
            first_point.push(i);
        }
        // State index by left partition point.
        let mut state_at = vec![None; points.len()];
        for (s, &i) in first_point.iter().enumerate() {
            state_at[i] = Some(s);
        }
        let index = |x: &Rational| points.binary_search(x).expect("image endpoint in partition");
        let matrix = states
            .iter()
            .map(|s| {
                let a = index(&t.base.eval_any(&s.lo));
                let b = index(&t.base.eval_any(&s.hi));
                let (a, b) = (a.min(b), a.max(b));
                let mut row = vec![0u8; states.len()];
                for slot in state_at.iter().take(b).skip(a).flatten() {
                    row[*slot] = 1;
                }
                row
            })
            .collect();
        Ok(TransitionMatrix { points, states, matrix })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.matrix[i].iter().enumerate().filter(|(_, &a)| a == 1).map(|(j, _)| j)
    }

    /// Strongly connected components, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.len()).map(|_| g.add_node(())).collect();
        for i in 0..self.len() {
            for j in self.successors(i) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Every component is trivial or a single cycle, i.e. the entropy is zero.
    pub fn is_zero_entropy(&self) -> bool {
        self.components().iter().all(|comp| {
            let inside = |j: &usize| comp.binary_search(j).is_ok();
            comp.iter().all(|&i| self.successors(i).filter(inside).count() <= 1)
        })
    }

    /// Spectral radius of the restriction to one strongly connected component,
    /// with the width of the final eigenvalue bracket.
    pub fn component_radius(&self, comp: &[usize], config: &MarkovConfig) -> Result<(f64, f64)> {
        let pos: HashMap<usize, usize> = comp.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let adj: Vec<Vec<usize>> = comp
            .iter()
            .map(|&i| self.successors(i).filter_map(|j| pos.get(&j).copied()).collect())
            .collect();
        let edges: usize = adj.iter().map(Vec::len).sum();
        if edges == 0 {
            return Ok((0.0, 0.0));
        }
        // A strongly connected graph with out-degree one everywhere is a cycle.
        if adj.iter().all(|a| a.len() == 1) {
            return Ok((1.0, 0.0));
        }
        spectral_radius(&adj, config)
    }

    /// `log` of the largest component spectral radius.
    pub fn entropy(&self, config: &MarkovConfig) -> Result<EntropyEstimate> {
        let mut rho: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for comp in self.components() {
            let (r, res) = self.component_radius(&comp, config)?;
            if r > rho {
                rho = r;
                residual = res;
            }
        }
        let value = if rho > 1.0 { rho.ln() } else { 0.0 };
        Ok(EntropyEstimate {
            value,
            method: EntropyMethod::MarkovExact,
            n_used: self.len(),
            residual: if rho > 1.0 { residual / rho } else { 0.0 },
            saturated: false,
        })
    }
}

/// Power iteration on `A + I` (primitive for an irreducible `A`), stopped
/// when the Collatz–Wielandt bounds `min/max (Bv)_i / v_i` close up.
fn spectral_radius(adj: &[Vec<usize>], config: &MarkovConfig) -> Result<(f64, f64)> {
    let n = adj.len();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..config.max_iterations {
        let mut w = v.clone();
        for (i, row) in adj.iter().enumerate() {
            for &j in row {
                w[i] += v[j];
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let norm: f64 = w.iter().sum();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if hi - lo <= config.tolerance * hi {
            return Ok((0.5 * (lo + hi) - 1.0, hi - lo));
        }
    }
    Err(Error::numerical("power iteration did not converge"))
}

/// Exact entropy of a stunted map with finite plateau orbits.
pub fn entropy_markov(t: &StuntedSawtooth, config: MarkovConfig) -> Result<EntropyEstimate> {
    TransitionMatrix::build(t, config.orbit_budget)?.entropy(&config)
}
