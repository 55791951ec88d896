//! Itineraries, kneading invariants, shapes and the signed order on symbol
//! sequences.
//!
//! Laps are numbered `0..=m` left to right. A point sitting in a plateau (or
//! exactly on a turning point of a smooth map) reads the address symbol
//! `C_i`, and the orbit continues from the corresponding critical value.
//! Kneading sequences are right limits at each turning point or plateau.

mod psi;

pub use psi::{psi, simplest_rational_between, PsiResult, DEFAULT_PSI_DEPTH, DEFAULT_PSI_TOLERANCE};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::maps::interval_map::{lap_index, IntervalMap};
use crate::maps::{float_critical_values, stunted_critical_values, CriticalValues, StuntedSawtooth};
use crate::rational::Rational;

/// Distance below which a float orbit is considered to hit a turning point.
pub const ADDRESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Lap `I_k`, `0 ≤ k ≤ m`.
    Lap(usize),
    /// Turning point or plateau `C_i`, `1 ≤ i ≤ m`.
    Address(usize),
}

impl Symbol {
    /// Position in the left-to-right order `I₀ < C₁ < I₁ < … < C_m < I_m`.
    fn rank(self) -> usize {
        match self {
            Symbol::Lap(k) => 2 * k,
            Symbol::Address(i) => 2 * i - 1,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Lap(k) => write!(f, "{k}"),
            Symbol::Address(i) => write!(f, "C{i}"),
        }
    }
}

/// A finite symbol sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Itinerary {
    pub symbols: Vec<Symbol>,
}

impl Itinerary {
    pub fn depth(&self) -> usize {
        self.symbols.len()
    }

    pub fn truncate(&self, depth: usize) -> Itinerary {
        Itinerary { symbols: self.symbols.iter().take(depth).copied().collect() }
    }

    /// True when any lap index needs more than one digit.
    fn needs_separator(&self) -> bool {
        self.symbols.iter().any(|s| matches!(*s, Symbol::Lap(k) if k > 9) || matches!(*s, Symbol::Address(i) if i > 9))
    }
}

impl fmt::Display for Itinerary {
    /// Compact form `"110C1"` when all indices are single digits, otherwise
    /// space separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.needs_separator() { " " } else { "" };
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl FromStr for Itinerary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad itinerary {s:?}"));
        let mut symbols = Vec::new();
        if s.contains(char::is_whitespace) {
            for tok in s.split_whitespace() {
                let sym = match tok.strip_prefix('C') {
                    Some(rest) => Symbol::Address(rest.parse().map_err(|_| bad())?),
                    None => Symbol::Lap(tok.parse().map_err(|_| bad())?),
                };
                symbols.push(sym);
            }
        } else {
            let mut chars = s.chars().peekable();
            while let Some(ch) = chars.next() {
                let sym = if ch == 'C' {
                    let d = chars.next().and_then(|d| d.to_digit(10)).ok_or_else(bad)?;
                    Symbol::Address(d as usize)
                } else {
                    Symbol::Lap(ch.to_digit(10).ok_or_else(bad)? as usize)
                };
                symbols.push(sym);
            }
        }
        if symbols.iter().any(|s| matches!(s, Symbol::Address(0))) {
            return Err(bad());
        }
        Ok(Itinerary { symbols })
    }
}

impl Serialize for Itinerary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Itinerary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ν = (ν₁, …, ν_m)`, serialized as a JSON array of itinerary strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KneadingInvariant {
    pub nu: Vec<Itinerary>,
}

impl KneadingInvariant {
    pub fn depth(&self) -> usize {
        self.nu.first().map_or(0, Itinerary::depth)
    }
}

/// Exact itinerary of `x` under a stunted map.
pub fn itinerary_stunted(t: &StuntedSawtooth, x: &Rational, depth: usize) -> Result<Itinerary> {
    if depth == 0 {
        return Err(Error::invalid("itinerary depth must be at least 1"));
    }
    if !t.domain().contains(x) {
        return Err(Error::invalid("point outside the domain"));
    }
    let mut y = x.clone();
    let mut symbols = Vec::with_capacity(depth);
    for _ in 0..depth {
        symbols.push(stunted_symbol(t, &y));
        y = t.eval_unchecked(&y);
    }
    Ok(Itinerary { symbols })
}

fn stunted_symbol(t: &StuntedSawtooth, y: &Rational) -> Symbol {
    match t.plateau_of(y) {
        Some(i) => Symbol::Address(i + 1),
        None => Symbol::Lap(t.base.lap_of(y)),
    }
}

/// Kneading invariant of a stunted map: for each plateau, the itinerary of
/// points just to the right of it.
pub fn kneading_stunted(t: &StuntedSawtooth, depth: usize) -> Result<KneadingInvariant> {
    if depth == 0 {
        return Err(Error::invalid("kneading depth must be at least 1"));
    }
    let nu = (0..t.m()).map(|j| kneading_sequence_stunted(t, j, depth)).collect();
    Ok(KneadingInvariant { nu })
}

fn kneading_sequence_stunted(t: &StuntedSawtooth, j: usize, depth: usize) -> Itinerary {
    let base = &t.base;
    let first_lap = j + 1;
    let mut symbols = vec![Symbol::Lap(first_lap)];
    let mut v = t.plateaus[j].value.clone();
    // Side from which the orbit of the right neighbourhood approaches `v`.
    let mut side = Some(base.lap_sign(first_lap));
    while symbols.len() < depth {
        match side {
            Some(s) => {
                let hit = t.plateaus.iter().position(|z| {
                    (z.lo < v && v < z.hi) || (v == z.lo && s > 0) || (v == z.hi && s < 0)
                });
                if let Some(k) = hit {
                    symbols.push(Symbol::Address(k + 1));
                    v = t.plateaus[k].value.clone();
                    side = None;
                } else {
                    let lap = base.lap_of(&v);
                    symbols.push(Symbol::Lap(lap));
                    side = Some(s * base.lap_sign(lap));
                    v = base.eval_any(&v);
                }
            }
            None => {
                symbols.push(stunted_symbol(t, &v));
                v = t.eval_unchecked(&v);
            }
        }
    }
    Itinerary { symbols }
}

fn near_turning(turning: &[f64], y: f64, scale: f64) -> Option<usize> {
    turning.iter().position(|&c| (y - c).abs() <= ADDRESS_TOL * scale)
}

/// Float itinerary; orbits within `ADDRESS_TOL` of a turning point read its
/// address and continue from the exact turning point.
pub fn itinerary_float(map: &dyn IntervalMap, x: f64, depth: usize) -> Result<Itinerary> {
    if depth == 0 {
        return Err(Error::invalid("itinerary depth must be at least 1"));
    }
    let d = map.domain();
    if !d.contains(&x) {
        return Err(Error::invalid(format!("point {x} outside the domain")));
    }
    let turning = map.turning_points();
    let scale = d.width();
    let mut y = x;
    let mut symbols = Vec::with_capacity(depth);
    for _ in 0..depth {
        match near_turning(&turning, y, scale) {
            Some(k) => {
                symbols.push(Symbol::Address(k + 1));
                y = turning[k];
            }
            None => symbols.push(Symbol::Lap(lap_index(&turning, y))),
        }
        y = map.eval(y).clamp(d.lo, d.hi);
    }
    Ok(Itinerary { symbols })
}

/// Right-limit kneading invariant of a float map.
pub fn kneading_float(map: &dyn IntervalMap, depth: usize) -> Result<KneadingInvariant> {
    if depth == 0 {
        return Err(Error::invalid("kneading depth must be at least 1"));
    }
    let turning = map.turning_points();
    let d = map.domain();
    let scale = d.width();
    let nu = turning
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let mut symbols = vec![Symbol::Lap(j + 1)];
            let mut side = map.lap_sign(j + 1);
            let mut v = map.eval(c).clamp(d.lo, d.hi);
            while symbols.len() < depth {
                let lap = match near_turning(&turning, v, scale) {
                    Some(k) => {
                        v = turning[k];
                        if side > 0 {
                            k + 1
                        } else {
                            k
                        }
                    }
                    None => lap_index(&turning, v),
                };
                symbols.push(Symbol::Lap(lap));
                side *= map.lap_sign(lap);
                v = map.eval(v).clamp(d.lo, d.hi);
            }
            Itinerary { symbols }
        })
        .collect();
    Ok(KneadingInvariant { nu })
}

/// Order pattern of the critical values: pairs `(i, j_i)` with `v_{j_i}` the
/// value at turning point (or plateau) `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub pairs: Vec<(usize, usize)>,
    pub value_count: usize,
}

impl Shape {
    pub fn from_critical_values<T>(cv: &CriticalValues<T>) -> Shape {
        Shape {
            pairs: cv.assignment.iter().enumerate().map(|(i, &j)| (i + 1, j + 1)).collect(),
            value_count: cv.values.len(),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(i, j)| format!("({i},{j})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn shape_stunted(t: &StuntedSawtooth) -> Shape {
    Shape::from_critical_values(&stunted_critical_values(t))
}

pub fn shape_float(map: &dyn IntervalMap) -> Shape {
    Shape::from_critical_values(&float_critical_values(map))
}

/// Compares two itineraries in the order of the points carrying them, for a
/// map whose first lap has orientation `epsilon`. Equal prefixes (or a
/// shared address symbol) compare equal.
pub fn signed_compare(a: &Itinerary, b: &Itinerary, epsilon: i8) -> Ordering {
    let mut sign = 1i8;
    for (x, y) in a.symbols.iter().zip(&b.symbols) {
        if x == y {
            match x {
                Symbol::Address(_) => return Ordering::Equal,
                Symbol::Lap(k) => {
                    let lap_sign = if k % 2 == 0 { epsilon } else { -epsilon };
                    sign *= lap_sign;
                }
            }
            continue;
        }
        let ord = x.rank().cmp(&y.rank());
        return if sign > 0 { ord } else { ord.reverse() };
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{FnMap, Interval, PolynomialTypeB};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn full() -> StuntedSawtooth {
        StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap()
    }

    fn fixed_plateau() -> StuntedSawtooth {
        StuntedSawtooth::from_parts(1, 1, vec![ratio(1, 2)]).unwrap()
    }

    fn it(s: &str) -> Itinerary {
        s.parse().unwrap()
    }

    #[test]
    fn point_itineraries() {
        assert_eq!(itinerary_stunted(&full(), &ratio(3, 2), 4).unwrap(), it("1000"));
        assert_eq!(itinerary_stunted(&fixed_plateau(), &int(0), 3).unwrap(), it("C1C1C1"));
        assert_eq!(itinerary_stunted(&full(), &ratio(-3, 2), 5).unwrap(), it("00000"));
        assert!(itinerary_stunted(&full(), &int(0), 0).is_err());
    }

    #[test]
    fn kneading_of_full_and_fixed_plateau() {
        let k = kneading_stunted(&full(), 6).unwrap();
        // Right of the plateau: lap 1, then the value 3/2 approached from
        // below (lap 1 again), then the fixed endpoint -3/2.
        assert_eq!(k.nu, vec![it("110000")]);
        let k = kneading_stunted(&fixed_plateau(), 4).unwrap();
        assert_eq!(k.nu, vec![it("1C1C1C1")]);
        let k = kneading_stunted(&StuntedSawtooth::from_parts(3, 1, vec![int(3), int(1), int(2)]).unwrap(), 1).unwrap();
        assert_eq!(k.nu, vec![it("1"), it("2"), it("3")]);
    }

    #[test]
    fn float_kneading_matches_full_stunted() {
        let q = PolynomialTypeB::new(&[(2, -2.0)]).unwrap();
        let kq = kneading_float(&q, 32).unwrap();
        let kt = kneading_stunted(&full(), 32).unwrap();
        assert_eq!(kq, kt);
    }

    #[test]
    fn float_itinerary_addresses() {
        let f = FnMap::new(Interval::new(-1.0, 1.0).unwrap(), vec![0.0], |x: f64| 1.0 - 2.0 * x * x);
        assert_eq!(itinerary_float(&f, 0.0, 4).unwrap(), it("C1100"));
    }

    #[test]
    fn shapes() {
        let t = StuntedSawtooth::from_parts(3, 1, vec![int(3), int(1), int(2)]).unwrap();
        assert_eq!(shape_stunted(&t).to_string(), "{(1,3),(2,1),(3,2)}");
        assert_eq!(shape_stunted(&full()).to_string(), "{(1,1)}");
        let q = PolynomialTypeB::new(&[(2, -1.0)]).unwrap();
        assert_eq!(shape_float(&q).to_string(), "{(1,1)}");
    }

    #[test]
    fn signed_order_examples() {
        assert_eq!(signed_compare(&it("00"), &it("10"), 1), Ordering::Less);
        assert_eq!(signed_compare(&it("11"), &it("10"), 1), Ordering::Less);
        assert_eq!(signed_compare(&it("101"), &it("101"), 1), Ordering::Equal);
        assert_eq!(signed_compare(&it("0C1"), &it("01"), 1), Ordering::Less);
    }

    #[test]
    fn itinerary_text_round_trip() {
        for s in ["0110C1", "C2C2", "1"] {
            assert_eq!(it(s).to_string(), s);
        }
        let wide = Itinerary { symbols: vec![Symbol::Lap(10), Symbol::Address(11)] };
        assert_eq!(wide.to_string(), "10 C11");
        assert_eq!(wide.to_string().parse::<Itinerary>().unwrap(), wide);
        assert!("C0".parse::<Itinerary>().is_err());
        assert!("x".parse::<Itinerary>().is_err());
    }

    proptest! {
        // Distinct itineraries of exact points order like the points.
        #[test]
        fn signed_order_matches_real_order(
            a in -1000i64..1000, b in -1000i64..1000,
            m in 1usize..4, eps in prop::bool::ANY,
        ) {
            prop_assume!(a != b);
            let eps = if eps { 1 } else { -1 };
            let base = crate::maps::SawtoothBase::new(m, eps).unwrap();
            let e = base.e.clone();
            let xi = vec![e.clone(); m];
            let t = StuntedSawtooth::new(base, xi).unwrap();
            let x = &e * ratio(a, 1000);
            let y = &e * ratio(b, 1000);
            let ix = itinerary_stunted(&t, &x, 24).unwrap();
            let iy = itinerary_stunted(&t, &y, 24).unwrap();
            let ord = signed_compare(&ix, &iy, eps);
            if ord != Ordering::Equal {
                prop_assert_eq!(ord, x.cmp(&y));
            }
        }
    }
}
