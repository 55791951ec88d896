use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{kneading_float, Symbol};
use crate::error::{Error, Result};
use crate::maps::interval_map::IntervalMap;
use crate::maps::{Interval, SawtoothBase, StuntedSawtooth};
use crate::rational::{self, int, Rational};

pub const DEFAULT_PSI_DEPTH: usize = 64;
/// Largest acceptable width of the cylinder pinning a plateau endpoint.
pub const DEFAULT_PSI_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct PsiResult {
    pub map: StuntedSawtooth,
    /// Right plateau endpoints `s_i`.
    #[serde(with = "rational::vec")]
    pub endpoints: Vec<Rational>,
    /// Width of the depth-`D` cylinder each `s_i` was read from.
    pub widths: Vec<f64>,
}

/// Projects a multimodal map onto the stunted sawtooth family with the same
/// kneading invariant.
///
/// For each turning point, the right-limit kneading sequence is pulled back
/// through the inverse branches of `S₀` into a nested cylinder inside lap
/// `i`. The plateau endpoint is the simplest rational in that cylinder, so
/// endpoints that are rational with small denominators come out exactly.
pub fn psi(map: &dyn IntervalMap, depth: usize, tolerance: f64) -> Result<PsiResult> {
    let m = map.turning_points().len();
    if m == 0 {
        return Err(Error::precondition("map has no turning points"));
    }
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let base = SawtoothBase::new(m, map.epsilon())?;
    let kneading = kneading_float(map, depth)?;
    let mut endpoints = Vec::with_capacity(m);
    let mut widths = Vec::with_capacity(m);
    let mut xi = Vec::with_capacity(m);
    for (j, nu) in kneading.nu.iter().enumerate() {
        let laps: Vec<usize> = nu
            .symbols
            .iter()
            .map(|s| match s {
                Symbol::Lap(k) => Ok(*k),
                Symbol::Address(_) => Err(Error::precondition(format!("kneading sequence {} hits a turning point", j + 1))),
            })
            .collect::<Result<_>>()?;
        let cyl = cylinder(&base, &laps).ok_or_else(|| {
            Error::precondition(format!("kneading sequence {} is not realized by the sawtooth base", j + 1))
        })?;
        let width = rational::to_f64(&(&cyl.hi - &cyl.lo));
        if width > tolerance {
            return Err(Error::precondition(format!(
                "depth {depth} leaves plateau endpoint {} undetermined: cylinder width {width:e}",
                j + 1
            )));
        }
        let s = if cyl.lo == cyl.hi { cyl.lo.clone() } else { simplest_rational_between(&cyl.lo, &cyl.hi) };
        let value = base.eval_any(&s);
        xi.push(if base.is_max(j) { value } else { -value });
        endpoints.push(s);
        widths.push(width);
    }
    let map = StuntedSawtooth::new(base, xi)?;
    Ok(PsiResult { map, endpoints, widths })
}

fn lap_bounds(base: &SawtoothBase, k: usize) -> Interval<Rational> {
    let c = &base.turning_points;
    let lo = if k == 0 { -base.e.clone() } else { c[k - 1].clone() };
    let hi = if k == base.m { base.e.clone() } else { c[k].clone() };
    Interval { lo, hi }
}

/// Closed set of points of `[-e, e]` whose first `laps.len()` symbols under
/// `S₀` are `laps`.
fn cylinder(base: &SawtoothBase, laps: &[usize]) -> Option<Interval<Rational>> {
    let (&last, rest) = laps.split_last()?;
    let mut cyl = lap_bounds(base, last);
    for &k in rest.iter().rev() {
        let (slope, b) = base.lap_affine(k);
        let pre = Interval::hull((&cyl.lo - &b) / int(slope), (&cyl.hi - &b) / int(slope));
        let bounds = lap_bounds(base, k);
        let lo = if pre.lo > bounds.lo { pre.lo } else { bounds.lo };
        let hi = if pre.hi < bounds.hi { pre.hi } else { bounds.hi };
        if lo > hi {
            return None;
        }
        cyl = Interval { lo, hi };
    }
    Some(cyl)
}

/// Rational with the smallest denominator in `[lo, hi]` (Stern–Brocot descent).
pub fn simplest_rational_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &(fl.clone() + Rational::one()) <= hi {
        return fl + Rational::one();
    }
    // Same integer part: recurse on reciprocals of the fractional parts.
    let frac_lo = lo - &fl;
    let frac_hi = hi - &fl;
    let inner = simplest_rational_between(&frac_hi.recip(), &frac_lo.recip());
    fl + inner.recip()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{entropy_lap, entropy_markov};
    use crate::maps::PolynomialTypeB;
    use crate::rational::ratio;
    use crate::symbolic::{kneading_stunted, shape_float, shape_stunted};

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_rational_between(&ratio(1, 3), &ratio(2, 3)), ratio(1, 2));
        assert_eq!(simplest_rational_between(&ratio(3, 4), &ratio(3, 4)), ratio(3, 4));
        assert_eq!(simplest_rational_between(&ratio(-7, 10), &ratio(-6, 10)), ratio(-2, 3));
        assert_eq!(simplest_rational_between(&ratio(5, 2), &ratio(7, 2)), int(3));
        let s = simplest_rational_between(&ratio(749_999, 1_000_000), &ratio(750_001, 1_000_000));
        assert_eq!(s, ratio(3, 4));
    }

    #[test]
    fn full_quadratic_projects_to_full_trapezoid() {
        let q = PolynomialTypeB::new(&[(2, -2.0)]).unwrap();
        let r = psi(&q, DEFAULT_PSI_DEPTH, DEFAULT_PSI_TOLERANCE).unwrap();
        assert_eq!(r.endpoints, vec![ratio(1, 2)]);
        assert_eq!(r.map.xi, vec![ratio(3, 2)]);
        assert_eq!(kneading_stunted(&r.map, 32).unwrap(), kneading_float(&q, 32).unwrap());
        assert_eq!(shape_stunted(&r.map), shape_float(&q));
        let hq = entropy_lap(&q, 16).unwrap().value;
        let ht = entropy_markov(&r.map, Default::default()).unwrap().value;
        assert!((hq - ht).abs() <= 5e-3);
    }

    #[test]
    fn attracting_fixed_point_projects_to_fixed_plateau() {
        // Critical value lands in the right lap and converges to a fixed point there.
        let q = PolynomialTypeB::new(&[(2, -0.5)]).unwrap();
        let r = psi(&q, DEFAULT_PSI_DEPTH, DEFAULT_PSI_TOLERANCE).unwrap();
        assert_eq!(r.endpoints, vec![ratio(3, 4)]);
        let z = &r.map.plateaus[0];
        assert!(z.contains(&z.value));
        assert_eq!(entropy_markov(&r.map, Default::default()).unwrap().value, 0.0);
        // Laps grow linearly here, so the finite-window slope is only small, not zero.
        assert!(entropy_lap(&q, 64).unwrap().value < 0.05);
    }

    #[test]
    fn shallow_depth_reports_width() {
        let q = PolynomialTypeB::new(&[(2, -2.0)]).unwrap();
        let err = psi(&q, 3, 1e-12).unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
    }
}
