//! Enclosures of elementary functions.
//!
//! Monotone pieces are evaluated at the endpoints with libm and widened by
//! [`LIBM_ULPS`]. Interior extrema of the periodic functions are located
//! with interval arithmetic against the π enclosure, so a critical point is
//! included whenever it may lie in the argument.

use super::round::{step_down, step_up, LIBM_ULPS};
use super::Interval;
use crate::error::{Error, Result};

fn down(x: f64) -> f64 {
    step_down(x, LIBM_ULPS)
}

fn up(x: f64) -> f64 {
    step_up(x, LIBM_ULPS)
}

fn domain_err(func: &'static str, x: &Interval) -> Error {
    Error::Domain {
        func,
        lo: x.lo(),
        hi: x.hi(),
    }
}

/// Integers `k` that may satisfy `(x - offset) / π = k` for some `x` in `x`.
fn candidate_multiples(x: &Interval, offset: Interval) -> Option<(i64, i64)> {
    let t = (*x - offset)
        .checked_div(&Interval::PI)
        .expect("π enclosure excludes zero");
    let kmin = t.lo().ceil();
    let kmax = t.hi().floor();
    (kmin <= kmax).then_some((kmin as i64, kmax as i64))
}

/// `TAU` rounds to the float just below 2π.
const TWO_PI_LO: f64 = std::f64::consts::TAU;

impl Interval {
    pub fn sin(&self) -> Interval {
        if !self.lo().is_finite() || !self.hi().is_finite() || self.wid() >= TWO_PI_LO {
            return Interval::raw(-1.0, 1.0);
        }
        if self.is_degenerate() && self.lo() == 0.0 {
            return Interval::ZERO;
        }
        let a = self.lo().sin();
        let b = self.hi().sin();
        let mut lo = down(a.min(b));
        let mut hi = up(a.max(b));
        // sin has extrema at π/2 + kπ: maxima for even k, minima for odd k.
        if let Some((kmin, kmax)) = candidate_multiples(self, Interval::HALF_PI) {
            for k in kmin..=kmax {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval::raw(lo.max(-1.0), hi.min(1.0))
    }

    pub fn cos(&self) -> Interval {
        if !self.lo().is_finite() || !self.hi().is_finite() || self.wid() >= TWO_PI_LO {
            return Interval::raw(-1.0, 1.0);
        }
        if self.is_degenerate() && self.lo() == 0.0 {
            return Interval::ONE;
        }
        let a = self.lo().cos();
        let b = self.hi().cos();
        let mut lo = down(a.min(b));
        let mut hi = up(a.max(b));
        // cos has extrema at kπ.
        if let Some((kmin, kmax)) = candidate_multiples(self, Interval::ZERO) {
            for k in kmin..=kmax {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval::raw(lo.max(-1.0), hi.min(1.0))
    }

    pub fn tan(&self) -> Result<Interval> {
        if !self.lo().is_finite() || !self.hi().is_finite() {
            return Err(domain_err("tan", self));
        }
        if candidate_multiples(self, Interval::HALF_PI).is_some() {
            return Err(domain_err("tan", self));
        }
        if self.is_degenerate() && self.lo() == 0.0 {
            return Ok(Interval::ZERO);
        }
        Ok(Interval::raw(down(self.lo().tan()), up(self.hi().tan())))
    }

    pub fn exp(&self) -> Interval {
        if self.is_degenerate() && self.lo() == 0.0 {
            return Interval::ONE;
        }
        let lo = down(self.lo().exp()).max(0.0);
        let hi = up(self.hi().exp());
        Interval::raw(lo, hi)
    }

    pub fn ln(&self) -> Result<Interval> {
        if self.lo() <= 0.0 {
            return Err(domain_err("log", self));
        }
        if self.is_degenerate() && self.lo() == 1.0 {
            return Ok(Interval::ZERO);
        }
        Ok(Interval::raw(down(self.lo().ln()), up(self.hi().ln())))
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo() < 0.0 {
            return Err(domain_err("sqrt", self));
        }
        Ok(Interval::raw(
            super::round::sqrt_down(self.lo()).max(0.0),
            super::round::sqrt_up(self.hi()),
        ))
    }

    pub fn asin(&self) -> Result<Interval> {
        if self.lo() < -1.0 || self.hi() > 1.0 {
            return Err(domain_err("asin", self));
        }
        if self.is_degenerate() && self.lo() == 0.0 {
            return Ok(Interval::ZERO);
        }
        let bound = Interval::HALF_PI.hi();
        Ok(Interval::raw(
            down(self.lo().asin()).max(-bound),
            up(self.hi().asin()).min(bound),
        ))
    }

    pub fn acos(&self) -> Result<Interval> {
        if self.lo() < -1.0 || self.hi() > 1.0 {
            return Err(domain_err("acos", self));
        }
        Ok(Interval::raw(
            down(self.hi().acos()).max(0.0),
            up(self.lo().acos()).min(Interval::PI.hi()),
        ))
    }

    pub fn atan(&self) -> Interval {
        if self.is_degenerate() && self.lo() == 0.0 {
            return Interval::ZERO;
        }
        let bound = Interval::HALF_PI.hi();
        Interval::raw(
            down(self.lo().atan()).max(-bound),
            up(self.hi().atan()).min(bound),
        )
    }

    /// Two-argument arctangent `atan2(y, x)` with `self` as `y`.
    ///
    /// The argument box must exclude the origin. A box straddling the
    /// negative x-axis crosses the branch cut and gets `[-π, π]`.
    pub fn atan2(&self, x: &Interval) -> Result<Interval> {
        let y = self;
        if y.contains_zero() && x.contains_zero() {
            return Err(Error::Domain {
                func: "atan2",
                lo: f64::NAN,
                hi: f64::NAN,
            });
        }
        let pi_hi = Interval::PI.hi();
        if x.lo() < 0.0 && y.lo() < 0.0 && y.hi() >= 0.0 {
            return Ok(Interval::raw(-pi_hi, pi_hi));
        }
        // No critical points off the origin and each edge is monotone, so
        // the extremes sit at the corners.
        let corners = [
            y.lo().atan2(x.lo()),
            y.lo().atan2(x.hi()),
            y.hi().atan2(x.lo()),
            y.hi().atan2(x.hi()),
        ];
        let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval::raw(down(lo).max(-pi_hi), up(hi).min(pi_hi)))
    }
}
