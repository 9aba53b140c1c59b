//! Vector-valued functions given as text.
//!
//! A [`FunctionModel`] is evaluated through the generic [`Numeric`] trait,
//! which gives real evaluation (`f64`), the natural interval extension
//! ([`Interval`]) and forward-mode Jacobians ([`Dual`]) from one tree walk.

mod numeric;
mod parse;

use std::fmt;

use crate::error::{shape_err, Error, Result};
use crate::interval::{Interval, IntervalBox, IntervalMatrix, RealMatrix};

pub use numeric::{Dual, Numeric};
pub use parse::{ParseError, ParseErrorKind};

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "asin" => Func::Asin,
            "acos" => Func::Acos,
            "atan" => Func::Atan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// A decimal literal with its source text and a rigorous enclosure.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    text: String,
    nearest: f64,
    enclosure: Interval,
}

impl Literal {
    /// Parses a decimal such as `-1.25e3`. The enclosure is a point when the
    /// decimal is exactly representable and one ulp either side otherwise.
    pub fn parse(text: &str) -> Option<Literal> {
        let nearest: f64 = text.parse().ok()?;
        if !nearest.is_finite() {
            return None;
        }
        let enclosure = if decimal_is_exact(text) {
            Interval::point(nearest)
        } else {
            Interval::new(nearest.next_down(), nearest.next_up()).ok()?
        };
        Some(Literal {
            text: text.to_string(),
            nearest,
            enclosure,
        })
    }

    pub fn value(&self) -> f64 {
        self.nearest
    }

    pub fn enclosure(&self) -> Interval {
        self.enclosure
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// The value as an `i32` when the literal is an exact integer.
    pub fn integer(&self) -> Option<i32> {
        let v = self.nearest;
        (self.enclosure.is_degenerate() && v.fract() == 0.0 && v.abs() <= i32::MAX as f64)
            .then_some(v as i32)
    }
}

/// Whether the decimal `text` denotes a double exactly, decided with integer
/// arithmetic on `mantissa * 10^exp`.
fn decimal_is_exact(text: &str) -> bool {
    let t = text.trim_start_matches(['-', '+']);
    let (body, exp_part) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], &t[i + 1..]),
        None => (t, "0"),
    };
    let Ok(mut exp) = exp_part.parse::<i64>() else {
        return false;
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    exp -= frac_part.len() as i64;
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    if digits.is_empty() {
        return true;
    }
    let Ok(mut mantissa) = digits.parse::<u128>() else {
        return false;
    };
    const LIMIT: u128 = 1 << 53;
    if exp >= 0 {
        for _ in 0..exp {
            mantissa = match mantissa.checked_mul(10) {
                Some(m) if m <= LIMIT => m,
                _ => return false,
            };
        }
        return mantissa <= LIMIT;
    }
    // mantissa / (2^k 5^k) is dyadic iff 5^k divides the mantissa.
    let k = -exp;
    if k > 1000 {
        return false;
    }
    for _ in 0..k {
        if mantissa % 5 != 0 {
            return false;
        }
        mantissa /= 5;
    }
    mantissa <= LIMIT && k <= 1022
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Num(Literal),
    Pi,
    Param(String, Literal),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    /// `atan2(y, x)`.
    Atan2(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval<T: Numeric>(&self, vars: &[T]) -> Result<T> {
        let nvars = vars.len();
        Ok(match self {
            Expr::Var(i) => vars[*i].clone(),
            Expr::Num(lit) | Expr::Param(_, lit) => T::lit(lit.enclosure, lit.nearest, nvars),
            Expr::Pi => T::lit(Interval::PI, std::f64::consts::PI, nvars),
            Expr::Neg(a) => a.eval(vars)?.neg(),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b)?,
                }
            }
            Expr::Pow(a, n) => a.eval(vars)?.powi(*n)?,
            Expr::Call(f, a) => a.eval(vars)?.unary(*f)?,
            Expr::Atan2(y, x) => y.eval(vars)?.atan2(&x.eval(vars)?)?,
        })
    }

    fn write(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "{}", names[*i]),
            Expr::Num(lit) => write!(f, "{}", lit.text),
            Expr::Pi => write!(f, "pi"),
            Expr::Param(name, _) => write!(f, "{name}"),
            Expr::Neg(a) => {
                write!(f, "(-")?;
                a.write(names, f)?;
                write!(f, ")")
            }
            Expr::Binary(op, a, b) => {
                write!(f, "(")?;
                a.write(names, f)?;
                write!(f, " {} ", op.symbol())?;
                b.write(names, f)?;
                write!(f, ")")
            }
            Expr::Pow(a, n) => {
                write!(f, "(")?;
                a.write(names, f)?;
                write!(f, "^{n})")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(names, f)?;
                write!(f, ")")
            }
            Expr::Atan2(y, x) => {
                write!(f, "atan2(")?;
                y.write(names, f)?;
                write!(f, ", ")?;
                x.write(names, f)?;
                write!(f, ")")
            }
        }
    }
}

/// A parsed function `f: R^m -> R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<Expr>,
    params: Vec<(String, Literal)>,
}

impl FunctionModel {
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_params(text, &[])
    }

    /// Parses `text` with parameter overrides given as `(name, decimal)`.
    pub fn parse_with_params(text: &str, params: &[(String, String)]) -> Result<Self> {
        let overrides = params
            .iter()
            .map(|(name, value)| {
                Literal::parse(value.trim())
                    .map(|lit| (name.clone(), lit))
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("parameter `{name}` has a malformed value `{value}`"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = parse::parse(text, &overrides)?;
        Ok(FunctionModel {
            name: p.name,
            inputs: p.inputs,
            outputs: p.outputs,
            params: p.params,
        })
    }

    pub fn input_names(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Expr] {
        &self.outputs
    }

    pub fn params(&self) -> &[(String, Literal)] {
        &self.params
    }

    /// Input dimension `m`.
    pub fn dim_in(&self) -> usize {
        self.inputs.len()
    }

    /// Output dimension `n`.
    pub fn dim_out(&self) -> usize {
        self.outputs.len()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim_in() {
            return Err(shape_err(
                format!("{} inputs", self.dim_in()),
                format!("{found} inputs"),
            ));
        }
        Ok(())
    }

    /// Evaluates every output over arbitrary numbers.
    pub fn eval<T: Numeric>(&self, vars: &[T]) -> Result<Vec<T>> {
        self.check_dim(vars.len())?;
        self.outputs.iter().map(|e| e.eval(vars)).collect()
    }

    pub fn eval_real(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval(x)
    }

    /// Natural interval extension over `x`.
    pub fn eval_natural(&self, x: &IntervalBox) -> Result<IntervalBox> {
        self.eval(x.components()).map(IntervalBox::new)
    }

    /// Enclosure of `f(x)` at a real point.
    pub fn eval_point(&self, x: &[f64]) -> Result<IntervalBox> {
        self.eval_natural(&IntervalBox::point(x))
    }

    /// `n x m` interval matrix enclosing `f'(x)` for every `x` in the box.
    pub fn jacobian_interval(&self, x: &IntervalBox) -> Result<IntervalMatrix> {
        let m = x.dim();
        self.check_dim(m)?;
        let vars: Vec<Dual<Interval>> = x
            .iter()
            .enumerate()
            .map(|(i, c)| Dual::variable(*c, i, m))
            .collect();
        let out = self.eval(&vars)?;
        Ok(IntervalMatrix::from_fn(out.len(), m, |i, j| out[i].grad[j]))
    }

    /// Floating-point Jacobian at a point.
    pub fn jacobian_point(&self, x: &[f64]) -> Result<RealMatrix> {
        let m = x.len();
        self.check_dim(m)?;
        let vars: Vec<Dual<f64>> = x
            .iter()
            .enumerate()
            .map(|(i, &c)| Dual::variable(c, i, m))
            .collect();
        let out = self.eval(&vars)?;
        Ok(RealMatrix::from_fn(out.len(), m, |i, j| out[i].grad[j]))
    }

    /// `natural ∩ (F(mid) + J(sub)·(sub − mid))`, where `natural` is the
    /// natural extension over the initial domain.
    ///
    /// Pass the precomputed `natural` enclosure of the initial domain to avoid
    /// re-evaluating it for every sub-box.
    pub fn mean_value_enclosure(&self, natural: &IntervalBox, sub: &IntervalBox) -> Result<IntervalBox> {
        let centered = self.centered_form(sub)?;
        natural.intersect(&centered)?.ok_or_else(|| {
            Error::SoundnessViolation(format!(
                "natural extension {natural:?} and centered form {centered:?} are disjoint"
            ))
        })
    }

    /// Centered form `F([mid]) + J(x)·(x − mid)`.
    pub fn centered_form(&self, x: &IntervalBox) -> Result<IntervalBox> {
        let mid = x.midpoint();
        let f_mid = self.eval_point(&mid)?;
        let jac = self.jacobian_interval(x)?;
        let spread = jac.matvec(&x.sub_point(&mid))?;
        f_mid.add(&spread)
    }
}

impl fmt::Display for FunctionModel {
    /// Fully parenthesised source that parses back to the same model.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, lit) in &self.params {
            writeln!(f, "param {name} = {}", lit.text)?;
        }
        write!(f, "{}({}) = (", self.name, self.inputs.join(", "))?;
        for (i, e) in self.outputs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            e.write(&self.inputs, f)?;
        }
        write!(f, ")")
    }
}
