//! Number types the expression evaluator is generic over.

use crate::error::{Error, Result};
use crate::interval::Interval;

use super::Func;

/// Arithmetic needed to evaluate an expression tree.
///
/// Partial operations return an error outside their domain instead of NaN.
pub trait Numeric: Clone + Sized {
    /// A literal or named constant. `enclosure` contains the exact value and
    /// `nearest` is its round-to-nearest double. `nvars` is the number of
    /// input variables, used by derivative-carrying types.
    fn lit(enclosure: Interval, nearest: f64, nvars: usize) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn powi(&self, n: i32) -> Result<Self>;
    fn unary(&self, f: Func) -> Result<Self>;
    /// `atan2(self, x)`.
    fn atan2(&self, x: &Self) -> Result<Self>;

    fn int(k: i32, nvars: usize) -> Self {
        Self::lit(Interval::point(k as f64), k as f64, nvars)
    }
}

fn real_domain(func: &'static str, x: f64) -> Error {
    Error::Domain { func, lo: x, hi: x }
}

impl Numeric for f64 {
    fn lit(_: Interval, nearest: f64, _: usize) -> Self {
        nearest
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::DivisionByZeroInterval);
        }
        Ok(self / rhs)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 && *self == 0.0 {
            return Err(Error::DivisionByZeroInterval);
        }
        Ok(f64::powi(*self, n))
    }

    fn unary(&self, f: Func) -> Result<Self> {
        let x = *self;
        Ok(match f {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos() == 0.0 {
                    return Err(real_domain("tan", x));
                }
                x.tan()
            }
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(real_domain("log", x));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(real_domain("sqrt", x));
                }
                x.sqrt()
            }
            Func::Asin => {
                if x.abs() > 1.0 {
                    return Err(real_domain("asin", x));
                }
                x.asin()
            }
            Func::Acos => {
                if x.abs() > 1.0 {
                    return Err(real_domain("acos", x));
                }
                x.acos()
            }
            Func::Atan => x.atan(),
        })
    }

    fn atan2(&self, x: &Self) -> Result<Self> {
        if *self == 0.0 && *x == 0.0 {
            return Err(real_domain("atan2", 0.0));
        }
        Ok(f64::atan2(*self, *x))
    }
}

impl Numeric for Interval {
    fn lit(enclosure: Interval, _: f64, _: usize) -> Self {
        enclosure
    }

    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }

    fn neg(&self) -> Self {
        -*self
    }

    fn powi(&self, n: i32) -> Result<Self> {
        Interval::powi(self, n)
    }

    fn unary(&self, f: Func) -> Result<Self> {
        match f {
            Func::Sin => Ok(self.sin()),
            Func::Cos => Ok(self.cos()),
            Func::Tan => self.tan(),
            Func::Exp => Ok(self.exp()),
            Func::Log => self.ln(),
            Func::Sqrt => Interval::sqrt(self),
            Func::Asin => self.asin(),
            Func::Acos => self.acos(),
            Func::Atan => Ok(self.atan()),
        }
    }

    fn atan2(&self, x: &Self) -> Result<Self> {
        Interval::atan2(self, x)
    }
}

/// Value with its gradient with respect to the input variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub grad: Vec<T>,
}

impl<T: Numeric> Dual<T> {
    /// The `index`-th of `nvars` independent variables at `value`.
    pub fn variable(value: T, index: usize, nvars: usize) -> Self {
        let grad = (0..nvars)
            .map(|k| T::int(i32::from(k == index), 0))
            .collect();
        Dual { value, grad }
    }

    fn map_grad(&self, scale: &T) -> Vec<T> {
        self.grad.iter().map(|d| d.mul(scale)).collect()
    }

    fn chain(&self, value: T, derivative: T) -> Self {
        Dual {
            value,
            grad: self.map_grad(&derivative),
        }
    }
}

impl<T: Numeric> Numeric for Dual<T> {
    fn lit(enclosure: Interval, nearest: f64, nvars: usize) -> Self {
        Dual {
            value: T::lit(enclosure, nearest, 0),
            grad: vec![T::int(0, 0); nvars],
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        Dual {
            value: self.value.add(&rhs.value),
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Dual {
            value: self.value.sub(&rhs.value),
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        Dual {
            value: self.value.mul(&rhs.value),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| a.mul(&rhs.value).add(&self.value.mul(b)))
                .collect(),
        }
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        let q = self.value.div(&rhs.value)?;
        let grad = self
            .grad
            .iter()
            .zip(&rhs.grad)
            .map(|(a, b)| a.sub(&q.mul(b)).div(&rhs.value))
            .collect::<Result<_>>()?;
        Ok(Dual { value: q, grad })
    }

    fn neg(&self) -> Self {
        Dual {
            value: self.value.neg(),
            grad: self.grad.iter().map(Numeric::neg).collect(),
        }
    }

    fn powi(&self, n: i32) -> Result<Self> {
        if n == 0 {
            return Ok(Self::int(1, self.grad.len()));
        }
        let value = self.value.powi(n)?;
        let derivative = T::int(n, 0).mul(&self.value.powi(n - 1)?);
        Ok(self.chain(value, derivative))
    }

    fn unary(&self, f: Func) -> Result<Self> {
        let x = &self.value;
        let value = x.unary(f)?;
        let one = T::int(1, 0);
        let derivative = match f {
            Func::Sin => x.unary(Func::Cos)?,
            Func::Cos => x.unary(Func::Sin)?.neg(),
            Func::Tan => one.add(&value.powi(2)?),
            Func::Exp => value.clone(),
            Func::Log => one.div(x)?,
            Func::Sqrt => one.div(&T::int(2, 0).mul(&value))?,
            Func::Asin => one.div(&one.sub(&x.powi(2)?).unary(Func::Sqrt)?)?,
            Func::Acos => one.div(&one.sub(&x.powi(2)?).unary(Func::Sqrt)?)?.neg(),
            Func::Atan => one.div(&one.add(&x.powi(2)?))?,
        };
        Ok(self.chain(value, derivative))
    }

    fn atan2(&self, x: &Self) -> Result<Self> {
        let y = self;
        let value = y.value.atan2(&x.value)?;
        let r2 = x.value.powi(2)?.add(&y.value.powi(2)?);
        let grad = y
            .grad
            .iter()
            .zip(&x.grad)
            .map(|(dy, dx)| x.value.mul(dy).sub(&y.value.mul(dx)).div(&r2))
            .collect::<Result<_>>()?;
        Ok(Dual { value, grad })
    }
}
