//! Outward-rounded interval arithmetic.
//!
//! [`Interval`] is always non-empty. Operations that can produce the empty
//! set (intersection) return `Option`, so `None` is the distinguished empty
//! value and `lo <= hi` holds for every constructed interval.

mod boxes;
mod elementary;
mod matrix;
pub(crate) mod round;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use boxes::IntervalBox;
pub use matrix::{IntervalMatrix, RealMatrix};

use round::*;

/// A closed interval `[lo, hi]` of extended reals.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Scalar summaries of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub wid: f64,
    pub mid: f64,
    pub mag: f64,
    pub mig: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Enclosure of π. `std::f64::consts::PI` is below π.
    pub const PI: Interval = Interval {
        lo: std::f64::consts::PI,
        hi: 3.1415926535897936,
    };

    /// Enclosure of π/2.
    pub const HALF_PI: Interval = Interval {
        lo: std::f64::consts::FRAC_PI_2,
        hi: 1.5707963267948968,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(Error::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval needs a finite value, got {x}");
        Interval { lo: x, hi: x }
    }

    /// Skips validation; callers guarantee `lo <= hi`.
    #[inline]
    pub(crate) const fn raw(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Upper bound of `hi - lo`.
    pub fn wid(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// A point of the interval close to its center.
    pub fn mid(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let m = 0.5 * self.lo + 0.5 * self.hi;
                m.clamp(self.lo, self.hi)
            }
            (false, false) => 0.0,
            (true, false) => f64::MAX.max(self.lo),
            (false, true) => (-f64::MAX).min(self.hi),
        }
    }

    /// Upper bound of the radius `max(hi - mid, mid - lo)`.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    /// Magnitude `max(|lo|, |hi|)`.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude: `min(|lo|, |hi|)` when `0 ∉ self`, else 0.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            wid: self.wid(),
            mid: self.mid(),
            mag: self.mag(),
            mig: self.mig(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊆ int(other)`, strict on both sides.
    pub fn is_interior_subset(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Largest distance between corresponding endpoints.
    pub fn endpoint_distance(&self, other: &Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    /// Interval around the midpoint scaled by `factor` (outward rounded).
    pub fn scale_about(&self, center: f64, factor: f64) -> Interval {
        let off = *self - Interval::point(center);
        Interval::point(center) + off * Interval::point(factor)
    }

    pub fn recip(&self) -> Result<Interval> {
        Interval::ONE.checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::DivisionByZeroInterval);
        }
        let (a, b) = (self, rhs);
        let cands_lo = [
            div_down(a.lo, b.lo),
            div_down(a.lo, b.hi),
            div_down(a.hi, b.lo),
            div_down(a.hi, b.hi),
        ];
        let cands_hi = [
            div_up(a.lo, b.lo),
            div_up(a.lo, b.hi),
            div_up(a.hi, b.lo),
            div_up(a.hi, b.hi),
        ];
        Ok(Interval {
            lo: cands_lo.into_iter().fold(f64::INFINITY, f64::min),
            hi: cands_hi.into_iter().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    pub fn sqr(&self) -> Interval {
        self.powi(2).expect("non-negative powers are total")
    }

    /// Integer power with the tight even-power enclosure.
    pub fn powi(&self, n: i32) -> Result<Interval> {
        if n == 0 {
            return Ok(Interval::ONE);
        }
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let n = n as u32;
        if n.is_multiple_of(2) {
            let lo = pow_down(self.mig(), n);
            let hi = pow_up(self.mag(), n);
            Ok(Interval { lo, hi })
        } else {
            let lo = if self.lo >= 0.0 {
                pow_down(self.lo, n)
            } else {
                -pow_up(-self.lo, n)
            };
            let hi = if self.hi >= 0.0 {
                pow_up(self.hi, n)
            } else {
                -pow_down(-self.hi, n)
            };
            Ok(Interval { lo, hi })
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(x: Interval) -> Self {
        [x.lo, x.hi]
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: sub_down(self.lo, rhs.hi),
            hi: sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        // Sign-case split keeps the common cases to two products.
        if a.lo >= 0.0 && b.lo >= 0.0 {
            return Interval {
                lo: mul_down(a.lo, b.lo),
                hi: mul_up(a.hi, b.hi),
            };
        }
        if a.hi <= 0.0 && b.hi <= 0.0 {
            return Interval {
                lo: mul_down(a.hi, b.hi),
                hi: mul_up(a.lo, b.lo),
            };
        }
        let lo = [
            mul_down(a.lo, b.lo),
            mul_down(a.lo, b.hi),
            mul_down(a.hi, b.lo),
            mul_down(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        let hi = [
            mul_up(a.lo, b.lo),
            mul_up(a.lo, b.hi),
            mul_up(a.hi, b.lo),
            mul_up(a.hi, b.hi),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + x)
    }
}
