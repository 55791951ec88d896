//! Exact rationals used by the piecewise-linear maps.
//!
//! Values are `num_rational::BigRational`, always kept in lowest terms with a
//! positive denominator. On the wire they travel as `"p/q"` strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::invalid(format!("bad rational numerator in {s:?}")))?;
    let den = BigInt::from_str(den).map_err(|_| Error::invalid(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Nearest rational with denominator `2^bits`, used to seed exact searches from floats.
pub fn from_f64_dyadic(x: f64, bits: u32) -> Rational {
    let scale = 2f64.powi(bits as i32);
    let n = (x * scale).round();
    Rational::new(BigInt::from(n as i128), BigInt::one() << bits)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(serde::de::Error::custom)
}

/// Serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod vec {
    use super::*;
    use serde::Serialize;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for rational intervals as `{"lo": "p/q", "hi": "p/q"}`.
pub mod interval {
    use super::*;
    use crate::maps::Interval;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Wire {
        lo: String,
        hi: String,
    }

    fn wire(iv: &Interval<Rational>) -> Wire {
        Wire { lo: format(&iv.lo), hi: format(&iv.hi) }
    }

    pub fn serialize<S: Serializer>(iv: &Interval<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        wire(iv).serialize(s)
    }

    /// Same, for a list or array of intervals.
    pub fn serialize_all<S: Serializer, V: AsRef<[Interval<Rational>]>>(
        v: &V,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().iter().map(wire).collect::<Vec<_>>().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(format(&ratio(-6, 4)), "-3/2");
        assert_eq!(format(&int(7)), "7");
        assert!(parse("1/0").is_err());
        assert!(parse("x/2").is_err());
    }

    #[test]
    fn dyadic_seed() {
        assert_eq!(from_f64_dyadic(0.75, 4), ratio(3, 4));
    }
}
