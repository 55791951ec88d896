use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: PartialOrd + Clone> Interval<T> {
    pub fn new(lo: T, hi: T) -> Option<Self> {
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Interval spanned by two points in either order.
    pub fn hull(a: T, b: T) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interior(&self, x: &T) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn covers(&self, other: &Interval<T>) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection with positive length, if any.
    pub fn overlap(&self, other: &Interval<T>) -> Option<Interval<T>> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        Interval::new(lo, hi)
    }

    /// Interiors intersect.
    pub fn interiors_meet(&self, other: &Interval<T>) -> bool {
        self.overlap(other).is_some()
    }
}

impl Interval<f64> {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}
