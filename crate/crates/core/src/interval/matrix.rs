use serde::{Deserialize, Serialize};

use super::round::{add_up, mul_up};
use super::{Interval, IntervalBox};
use crate::error::{shape_err, Error, Result};

/// Dense row-major interval matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<Interval>,
}

impl TryFrom<MatrixDoc> for IntervalMatrix {
    type Error = Error;

    fn try_from(doc: MatrixDoc) -> Result<Self> {
        IntervalMatrix::new(doc.rows, doc.cols, doc.entries)
    }
}

impl From<IntervalMatrix> for MatrixDoc {
    fn from(m: IntervalMatrix) -> Self {
        MatrixDoc {
            rows: m.rows,
            cols: m.cols,
            entries: m.data,
        }
    }
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(
                format!("{} entries for a {rows}x{cols} matrix", rows * cols),
                data.len(),
            ));
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntervalMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Interval::ONE } else { Interval::ZERO })
    }

    /// Degenerate matrix with the given real entries.
    pub fn from_real(m: &RealMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| Interval::point(m.get(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Interval] {
        &self.data
    }

    pub fn transpose(&self) -> IntervalMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Sub-matrix `(self[rows[p], cols[q]])_{p,q}`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntervalMatrix {
        Self::from_fn(rows.len(), cols.len(), |p, q| self.get(rows[p], cols[q]))
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(shape_err(
                "square matrix",
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        Ok(())
    }

    /// Splits a square matrix into its diagonal and off-diagonal parts.
    pub fn diag_offdiag(&self) -> Result<(IntervalMatrix, IntervalMatrix)> {
        self.require_square()?;
        let n = self.rows;
        let diag = Self::from_fn(n, n, |i, j| if i == j { self.get(i, j) } else { Interval::ZERO });
        let off = Self::from_fn(n, n, |i, j| if i == j { Interval::ZERO } else { self.get(i, j) });
        Ok((diag, off))
    }

    pub fn matvec(&self, v: &IntervalBox) -> Result<IntervalBox> {
        if v.dim() != self.cols {
            return Err(shape_err(
                format!("vector of dimension {}", self.cols),
                v.dim(),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<Interval>()
            })
            .collect())
    }

    /// `v_i / D_ii` for a diagonal matrix `D`.
    pub fn diag_inv_apply(&self, v: &IntervalBox) -> Result<IntervalBox> {
        self.require_square()?;
        if v.dim() != self.rows {
            return Err(shape_err(
                format!("vector of dimension {}", self.rows),
                v.dim(),
            ));
        }
        (0..self.rows)
            .map(|i| {
                let d = self.get(i, i);
                if d.contains_zero() {
                    return Err(Error::SingularDiagonal { index: i });
                }
                v[i].checked_div(&d)
            })
            .collect::<Result<Vec<_>>>()
            .map(IntervalBox::new)
    }

    /// `C · self` for a real matrix `C`, outward rounded.
    pub fn left_mul_real(&self, c: &RealMatrix) -> Result<IntervalMatrix> {
        if c.cols() != self.rows {
            return Err(shape_err(
                format!("left factor with {} columns", self.rows),
                c.cols(),
            ));
        }
        Ok(Self::from_fn(c.rows(), self.cols, |i, j| {
            (0..self.rows)
                .map(|k| Interval::point(c.get(i, k)) * self.get(k, j))
                .sum()
        }))
    }

    pub fn midpoint(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mid())
    }

    /// Radius matrix `Δ` with `self ⊆ mid ± Δ`.
    pub fn radius(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).rad())
    }

    /// Upper bound of the sum of all entry magnitudes.
    pub fn magnitude_sum(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| add_up(acc, x.mag()))
    }
}

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Relative pivot threshold of [`RealMatrix::inverse`].
pub const SINGULARITY_TOLERANCE: f64 = 1e-12;

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(
                format!("{} entries for a {rows}x{cols} matrix", rows * cols),
                data.len(),
            ));
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(shape_err("rows of equal length", "ragged rows"));
        }
        Ok(RealMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RealMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> RealMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RealMatrix {
        Self::from_fn(rows.len(), cols.len(), |p, q| self.get(rows[p], cols[q]))
    }

    pub fn abs(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.abs()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(shape_err(
                format!("right factor with {} rows", self.cols),
                rhs.rows,
            ));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }

    /// Upper bound of `self · rhs` for entrywise non-negative factors.
    pub fn matmul_up_nonneg(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(shape_err(
                format!("right factor with {} rows", self.cols),
                rhs.rows,
            ));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(0.0, |acc, k| add_up(acc, mul_up(self.get(i, k), rhs.get(k, j))))
        }))
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Gauss-Jordan inverse with partial pivoting.
    ///
    /// Fails when a pivot falls below `1e-12 * max|entry|`.
    pub fn inverse(&self) -> Result<RealMatrix> {
        if self.rows != self.cols {
            return Err(shape_err(
                "square matrix",
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let n = self.rows;
        let tolerance = SINGULARITY_TOLERANCE * self.max_abs();
        let mut a = self.clone();
        let mut inv = RealMatrix::identity(n);
        for col in 0..n {
            let (pivot_row, pivot) = (col..n)
                .map(|r| (r, a.get(r, col)))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .expect("non-empty pivot range");
            if !(pivot.abs() > tolerance) {
                return Err(Error::NumericallySingular {
                    pivot: pivot.abs(),
                    tolerance,
                });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - factor * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}
