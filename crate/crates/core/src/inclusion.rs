//! Certified inner inclusion tests.
//!
//! For a box `Y` in the co-domain, the tests try to prove `Y ⊆ f(X)` with a
//! preconditioned Gauss-Seidel operator
//!
//! ```text
//! H = ũ₁ + diag(J₁)⁻¹ (b − offdiag(J₁)(u₁ − ũ₁) − J₂(u₂ − ũ₂))
//! ```
//!
//! where `b = C(Y − f(ũ))`. If `H ⊆ int(u₁)` for a candidate `u = (u₁, u₂)`
//! contained in `X`, every point of `Y` has a preimage in `u`. The candidate
//! starts at the given sub-box and is inflated around its midpoint while the
//! operator keeps contracting.

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::expr::FunctionModel;
use crate::interval::{Interval, IntervalBox, IntervalMatrix, RealMatrix};

/// Inflation factor, progress ratio and step cap of the inflation loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationParams {
    pub tau: f64,
    pub mu: f64,
    pub max_steps: usize,
}

impl Default for InflationParams {
    fn default() -> Self {
        InflationParams {
            tau: 1.01,
            mu: 0.9,
            max_steps: 64,
        }
    }
}

impl InflationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0) || !(self.mu > 0.0 && self.mu < 1.0) || self.max_steps == 0 {
            return Err(Error::InvalidParams(format!(
                "need tau > 1, 0 < mu < 1 and max_steps >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Output rows and input columns of a regular square block of the Jacobian.
/// `cols[k]` is the diagonal partner of `rows[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Projection {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Projection { rows, cols }
    }

    /// Identity pairing of the first `r` rows and columns.
    pub fn identity(r: usize) -> Self {
        Projection {
            rows: (0..r).collect(),
            cols: (0..r).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Checks the projection against a function with `n` outputs and `m`
    /// inputs.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let distinct = |v: &[usize], bound: usize| {
            let mut seen = vec![false; bound];
            v.iter().all(|&i| i < bound && !std::mem::replace(&mut seen[i], true))
        };
        let r = self.rows.len();
        if r == 0 || r != self.cols.len() || r > n.min(m) {
            return Err(Error::RankProfileMismatch(format!(
                "{} rows and {} columns for a {n}x{m} Jacobian",
                r,
                self.cols.len()
            )));
        }
        if !distinct(&self.rows, n) || !distinct(&self.cols, m) {
            return Err(Error::RankProfileMismatch(format!(
                "rows {:?} / columns {:?} out of range or repeated",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Input columns outside the block, ascending.
    pub fn remaining_cols(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|c| !self.cols.contains(c)).collect()
    }
}

/// A box split into the block variables `u1` and the remaining `u2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBox {
    pub u1: IntervalBox,
    pub u2: IntervalBox,
}

impl SplitBox {
    /// Splits `x` into the components `cols` and the rest.
    pub fn split(x: &IntervalBox, cols: &[usize], rest: &[usize]) -> Self {
        SplitBox {
            u1: x.select(cols),
            u2: x.select(rest),
        }
    }

    pub fn r(&self) -> usize {
        self.u1.dim()
    }

    pub fn concat(&self) -> IntervalBox {
        self.u1.concat(&self.u2)
    }
}

/// Jacobian rows of the block outputs, split by [`SplitBox`] columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitJacobian {
    pub j1: IntervalMatrix,
    pub j2: IntervalMatrix,
}

impl SplitJacobian {
    /// Splits an `r x m` matrix whose first `r` columns form the block.
    pub fn from_permuted(j: &IntervalMatrix) -> Self {
        let r = j.rows();
        let rows: Vec<usize> = (0..r).collect();
        let left: Vec<usize> = (0..r).collect();
        let right: Vec<usize> = (r..j.cols()).collect();
        SplitJacobian {
            j1: j.submatrix(&rows, &left),
            j2: j.submatrix(&rows, &right),
        }
    }
}

/// Square-case operator. `rhs` is `Y − f(x̃)`, already translated.
pub fn h_operator(
    j: &IntervalMatrix,
    x_tilde: &[f64],
    x: &IntervalBox,
    rhs: &IntervalBox,
) -> Result<IntervalBox> {
    let r = j.rows();
    let sj = SplitJacobian {
        j1: j.clone(),
        j2: IntervalMatrix::zeros(r, 0),
    };
    let empty = IntervalBox::new(Vec::new());
    h_operator_rect(
        &sj,
        &SplitBox {
            u1: IntervalBox::point(x_tilde),
            u2: empty.clone(),
        },
        &SplitBox {
            u1: x.clone(),
            u2: empty,
        },
        rhs,
    )
}

/// Rectangular-case operator. `rhs` is `Y₁ − f_{1:r}(ũ)`, already
/// translated. `u_tilde` is normally degenerate; wider boxes are handled
/// soundly.
pub fn h_operator_rect(
    sj: &SplitJacobian,
    u_tilde: &SplitBox,
    u: &SplitBox,
    rhs: &IntervalBox,
) -> Result<IntervalBox> {
    let r = u.r();
    if sj.j1.rows() != r || sj.j1.cols() != r || rhs.dim() != r || u_tilde.r() != r {
        return Err(shape_err(
            format!("{r}x{r} block with {r}-dimensional data"),
            format!(
                "{}x{} block, rhs of dimension {}",
                sj.j1.rows(),
                sj.j1.cols(),
                rhs.dim()
            ),
        ));
    }
    if sj.j2.rows() != r || sj.j2.cols() != u.u2.dim() || u_tilde.u2.dim() != u.u2.dim() {
        return Err(shape_err(
            format!("{r}x{} off-block", u.u2.dim()),
            format!("{}x{}", sj.j2.rows(), sj.j2.cols()),
        ));
    }
    let (diag, off) = sj.j1.diag_offdiag()?;
    let coupling = off.matvec(&u.u1.sub(&u_tilde.u1)?)?;
    let rest = sj.j2.matvec(&u.u2.sub(&u_tilde.u2)?)?;
    let t = rhs.sub(&coupling)?.sub(&rest)?;
    u_tilde.u1.add(&diag.diag_inv_apply(&t)?)
}

/// Preconditioner for an `r x m` midpoint Jacobian whose leading `r x r`
/// block is the selected one.
///
/// The matrix is completed with the last `m − r` rows of the identity and
/// inverted. The first `r` columns of that inverse are the block inverse
/// stacked on zeros, so the returned `r x r` matrix is the block inverse.
pub fn precondition(j_mid: &RealMatrix) -> Result<RealMatrix> {
    let (r, m) = (j_mid.rows(), j_mid.cols());
    if r > m || r == 0 {
        return Err(shape_err("r x m matrix with 1 <= r <= m", format!("{r}x{m}")));
    }
    let completed = RealMatrix::from_fn(m, m, |i, j| {
        if i < r {
            j_mid.get(i, j)
        } else if i == j {
            1.0
        } else {
            0.0
        }
    });
    let inv = completed.inverse()?;
    let top: Vec<usize> = (0..r).collect();
    Ok(inv.submatrix(&top, &top))
}

/// Why a test did not certify. Never a proof that `Y ⊄ f(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inconclusive {
    SingularDiagonal,
    PreconditionFailure,
    EscapeDomain,
    NoProgress,
    /// An enclosure could not be evaluated on the candidate, e.g. a
    /// derivative of `sqrt` at zero.
    EvaluationError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Inconclusive(Inconclusive),
}

/// Outcome of one inclusion test with the inflation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub verdict: Verdict,
    /// Distances between consecutive candidates.
    pub distances: Vec<f64>,
    /// Candidate domain box on success, in the original coordinates.
    pub witness: Option<IntervalBox>,
}

impl TestReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    fn inconclusive(reason: Inconclusive, distances: Vec<f64>) -> Self {
        TestReport {
            verdict: Verdict::Inconclusive(reason),
            distances,
            witness: None,
        }
    }
}

/// Square test: tries to prove `Y ⊆ f(X)` starting from `x_sub ⊆ X`.
pub fn inner_test_square(
    f: &FunctionModel,
    x: &IntervalBox,
    x_sub: &IntervalBox,
    y: &IntervalBox,
    params: &InflationParams,
) -> Result<TestReport> {
    if f.dim_in() != f.dim_out() {
        return Err(shape_err(
            "square function",
            format!("{} outputs and {} inputs", f.dim_out(), f.dim_in()),
        ));
    }
    inner_test_rect(f, x, x_sub, y, &Projection::identity(f.dim_in()), params)
}

/// Rectangular test: tries to prove `Y[rows] ⊆ f_rows(X)`. `y` is the full
/// `n`-dimensional co-domain box.
pub fn inner_test_rect(
    f: &FunctionModel,
    x: &IntervalBox,
    x_sub: &IntervalBox,
    y: &IntervalBox,
    projection: &Projection,
    params: &InflationParams,
) -> Result<TestReport> {
    let (n, m) = (f.dim_out(), f.dim_in());
    projection.validate(n, m)?;
    params.validate()?;
    if x.dim() != m || x_sub.dim() != m || y.dim() != n {
        return Err(shape_err(
            format!("domain boxes of dimension {m} and a co-domain box of dimension {n}"),
            format!("{}, {} and {}", x.dim(), x_sub.dim(), y.dim()),
        ));
    }
    let rows = &projection.rows;
    let cols = &projection.cols;
    let rest = projection.remaining_cols(m);
    let perm: Vec<usize> = cols.iter().chain(&rest).copied().collect();

    let x_tilde = x_sub.midpoint();
    let Ok(j_point) = f.jacobian_point(&x_tilde) else {
        return Ok(TestReport::inconclusive(Inconclusive::EvaluationError, vec![]));
    };
    let c = match precondition(&j_point.submatrix(rows, &perm)) {
        Ok(c) => c,
        Err(_) => return Ok(TestReport::inconclusive(Inconclusive::PreconditionFailure, vec![])),
    };
    let Ok(f_tilde) = f.eval_point(&x_tilde) else {
        return Ok(TestReport::inconclusive(Inconclusive::EvaluationError, vec![]));
    };
    let b = IntervalMatrix::from_real(&c).matvec(&y.select(rows).sub(&f_tilde.select(rows))?)?;

    let tilde_box = IntervalBox::point(&x_tilde);
    let u_tilde = SplitBox::split(&tilde_box, cols, &rest);
    let x_block = x.select(cols);
    let tilde_block: Vec<f64> = cols.iter().map(|&k| x_tilde[k]).collect();
    let mut u = SplitBox::split(x_sub, cols, &rest);

    let mut distances = Vec::new();
    let (mut d_prev, mut d) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..params.max_steps {
        if !(d <= params.mu * d_prev) {
            return Ok(TestReport::inconclusive(Inconclusive::NoProgress, distances));
        }
        if !u.u1.is_subset(&x_block)? {
            return Ok(TestReport::inconclusive(Inconclusive::EscapeDomain, distances));
        }
        if !u.u1.contains_point(&tilde_block) {
            return Ok(TestReport::inconclusive(Inconclusive::NoProgress, distances));
        }
        let full = unpermute(&u.concat(), &perm);
        let Ok(jac) = f.jacobian_interval(&full) else {
            return Ok(TestReport::inconclusive(Inconclusive::EvaluationError, distances));
        };
        let jac = jac.submatrix(rows, &perm).left_mul_real(&c)?;
        let sj = SplitJacobian::from_permuted(&jac);
        let h = match h_operator_rect(&sj, &u_tilde, &u, &b) {
            Ok(h) => h,
            Err(Error::SingularDiagonal { .. }) => {
                return Ok(TestReport::inconclusive(Inconclusive::SingularDiagonal, distances))
            }
            Err(e) => return Err(e),
        };
        if h.subset_of_interior(&u.u1)? {
            return Ok(TestReport {
                verdict: Verdict::Certified,
                distances,
                witness: Some(full),
            });
        }
        let inflated = h.sub(&u_tilde.u1)?.scale(params.tau).add(&u_tilde.u1)?;
        d_prev = d;
        d = u.u1.distance(&inflated)?;
        distances.push(d);
        u.u1 = inflated;
    }
    Ok(TestReport::inconclusive(Inconclusive::NoProgress, distances))
}

/// Inverse of `x.select(perm)`.
fn unpermute(x: &IntervalBox, perm: &[usize]) -> IntervalBox {
    let mut out = vec![Interval::ZERO; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        out[p] = x[k];
    }
    IntervalBox::new(out)
}
