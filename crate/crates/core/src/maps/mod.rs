//! Map families: the sawtooth base, stunted sawtooth maps, polynomials of
//! type b and the quadratic family, plus the float view shared by all.

pub mod descriptor;
pub mod interval;
pub mod interval_map;
pub mod polynomial;
pub mod sawtooth;

pub use descriptor::{BuiltMap, MapDescriptor};
pub use interval::Interval;
pub use interval_map::{iterate, iterate_derivative, iterate_turning_points, FnMap, IntervalMap, MapKind, SharedMap};
pub use polynomial::{OneParameterFamily, PolynomialTypeB, QuadraticFamily, QuadraticMap, Stage, TypeBLine};
pub use sawtooth::{Piece, Plateau, SawtoothBase, StuntedSawtooth};

use serde::Serialize;

/// Distinct critical values `v₁ < … < v_s` and, for each turning point (or
/// plateau) in order, the index of its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValues<T> {
    pub values: Vec<T>,
    pub assignment: Vec<usize>,
}

impl<T: PartialOrd + Clone> CriticalValues<T> {
    /// Groups raw values with `same` as the equality predicate.
    pub fn from_raw(raw: &[T], same: impl Fn(&T, &T) -> bool) -> Self {
        let mut values: Vec<T> = Vec::new();
        let mut sorted = raw.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("comparable critical values"));
        for v in sorted {
            if values.last().map_or(true, |last| !same(last, &v)) {
                values.push(v);
            }
        }
        let assignment = raw
            .iter()
            .map(|v| values.iter().position(|u| same(u, v)).expect("value present"))
            .collect();
        CriticalValues { values, assignment }
    }
}

/// Plateau values of a stunted map, exactly.
pub fn stunted_critical_values(t: &StuntedSawtooth) -> CriticalValues<crate::rational::Rational> {
    CriticalValues::from_raw(&t.plateau_values(), |a, b| a == b)
}

/// Relative tolerance for merging float critical values.
pub const VALUE_MERGE_TOL: f64 = 1e-9;

/// Critical values of a float map, merging values closer than `VALUE_MERGE_TOL`.
pub fn float_critical_values(map: &dyn IntervalMap) -> CriticalValues<f64> {
    let raw: Vec<f64> = map.turning_points().iter().map(|&c| map.eval(c)).collect();
    CriticalValues::from_raw(&raw, |a, b| (a - b).abs() <= VALUE_MERGE_TOL * (1.0 + a.abs()))
}
