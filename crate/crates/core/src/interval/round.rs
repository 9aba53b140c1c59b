//! Directed rounding on top of round-to-nearest hardware arithmetic.
//!
//! Each primitive computes the nearest result, recovers the exact rounding
//! error with an error-free transformation (TwoSum, FMA residual) and steps
//! one ulp outward only when the nearest result is on the wrong side of the
//! exact value. Exact results therefore stay exact. Near the underflow range
//! the residual is not exact any more, so the bound is stepped outward
//! unconditionally there.

/// Below this magnitude FMA residuals may be inexact.
const TINY: f64 = 1e-290;

/// Number of ulps libm results are widened by. glibc's double precision
/// `sin`, `cos`, `exp`, `log`, `atan`, ... are accurate to within one ulp.
pub(crate) const LIBM_ULPS: u32 = 2;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return f64::NEG_INFINITY;
    }
    if s.is_infinite() {
        if a.is_finite() && b.is_finite() && s > 0.0 {
            return f64::MAX;
        }
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return f64::INFINITY;
    }
    if s.is_infinite() {
        if a.is_finite() && b.is_finite() && s < 0.0 {
            return -f64::MAX;
        }
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Sign of `exact - p` for `p = fl(a * b)`, or `None` if it cannot be
/// recovered exactly.
#[inline]
fn mul_residual_sign(a: f64, b: f64, p: f64) -> Option<f64> {
    if p.abs() < TINY {
        return None;
    }
    Some(a.mul_add(b, -p))
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    // 0 * inf = 0 for interval endpoints.
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() && p > 0.0 {
            return f64::MAX;
        }
        return p;
    }
    match mul_residual_sign(a, b, p) {
        Some(r) if r >= 0.0 => p,
        _ => p.next_down(),
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() && p < 0.0 {
            return -f64::MAX;
        }
        return p;
    }
    match mul_residual_sign(a, b, p) {
        Some(r) if r <= 0.0 => p,
        _ => p.next_up(),
    }
}

/// Sign of `a / b - q` for `q = fl(a / b)`; `None` when not exactly known.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if q.abs() < TINY || a.abs() < TINY || !b.is_finite() {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(if b > 0.0 { r } else { -r })
}

#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if a.is_finite() && b.is_infinite() {
        return 0.0;
    }
    let q = a / b;
    if q.is_infinite() {
        if a.is_finite() && q > 0.0 {
            return f64::MAX;
        }
        return q;
    }
    match div_residual_sign(a, b, q) {
        Some(r) if r >= 0.0 => q,
        _ => q.next_down(),
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if a.is_finite() && b.is_infinite() {
        return 0.0;
    }
    let q = a / b;
    if q.is_infinite() {
        if a.is_finite() && q < 0.0 {
            return -f64::MAX;
        }
        return q;
    }
    match div_residual_sign(a, b, q) {
        Some(r) if r <= 0.0 => q,
        _ => q.next_up(),
    }
}

#[inline]
pub(crate) fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() || s == 0.0 {
        return s;
    }
    if x < TINY {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, x) >= 0.0 {
        s
    } else {
        s.next_down()
    }
}

#[inline]
pub(crate) fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_up();
    }
    if (-s).mul_add(s, x) <= 0.0 {
        s
    } else {
        s.next_up()
    }
}

#[inline]
pub(crate) fn step_down(mut x: f64, ulps: u32) -> f64 {
    if x.is_infinite() {
        return x;
    }
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

#[inline]
pub(crate) fn step_up(mut x: f64, ulps: u32) -> f64 {
    if x.is_infinite() {
        return x;
    }
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

/// Lower bound of `a^n` for `a >= 0`.
pub(crate) fn pow_down(a: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc = mul_down(acc, a);
    }
    acc
}

/// Upper bound of `a^n` for `a >= 0`.
pub(crate) fn pow_up(a: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc = mul_up(acc, a);
    }
    acc
}
