//! Open intervals of the extended real line.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An open interval `(lo, hi)` with `lo < hi`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::try_new(lo, hi).ok_or_else(|| {
            Error::DegenerateDomain(format!("({lo}, {hi}) is not a nonempty open interval"))
        })
    }

    /// `None` when the endpoints do not describe a nonempty interval.
    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    /// Interval spanned by two endpoints given in either order.
    pub(crate) fn spanned(a: f64, b: f64) -> Option<Self> {
        Self::try_new(a.min(b), a.max(b))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Strict membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// A closed, bounded window strictly inside the interval, used to place
    /// random samples and probe points.
    ///
    /// Bounded intervals lose 1% of their width at each end. A half-line
    /// `(lo, inf)` becomes `[lo + s/100, lo + 10 s]` with `s = max(1, |lo|)`,
    /// mirrored for `(-inf, hi)`; the whole line becomes `[-5, 5]`.
    pub fn sampling_window(&self) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let w = self.hi - self.lo;
                (self.lo + 0.01 * w, self.hi - 0.01 * w)
            }
            (true, false) => {
                let s = self.lo.abs().max(1.0);
                (self.lo + 0.01 * s, self.lo + 10.0 * s)
            }
            (false, true) => {
                let s = self.hi.abs().max(1.0);
                (self.hi - 10.0 * s, self.hi - 0.01 * s)
            }
            (false, false) => (-5.0, 5.0),
        }
    }

    /// A point guaranteed to be inside the interval.
    pub fn interior_point(&self) -> f64 {
        let (a, b) = self.sampling_window();
        0.5 * (a + b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

// Serialized as `[lo, hi]` with `null` standing for an infinite endpoint.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let end = |x: f64| if x.is_finite() { Some(x) } else { None };
        (end(self.lo), end(self.hi)).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(Option<f64>, Option<f64>)>::deserialize(deserializer)?;
        let lo = lo.unwrap_or(f64::NEG_INFINITY);
        let hi = hi.unwrap_or(f64::INFINITY);
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
