//! Regularity tests and rank-profile extraction for interval matrices.
//!
//! An interval matrix is regular when every real matrix it contains is
//! nonsingular. Three sufficient tests are provided: strict diagonal
//! dominance, the H-matrix test with a fixed scaling, and a spectral-radius
//! test after preconditioning by the inverse midpoint. Extraction searches a
//! large square sub-matrix passing one of them, either through a 0-1 linear
//! program or by random sampling.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binlp::{BinaryLinearProgram, BlpStatus};
use crate::error::{shape_err, Error, Result};
use crate::inclusion::Projection;
use crate::interval::round::{add_down, add_up, div_up, mul_down, mul_up};
use crate::interval::{Interval, IntervalMatrix, RealMatrix};

/// Slack approximating strict inequalities in the LP formulations.
pub const LP_SLACK: f64 = 1e-2;
/// Random draws per candidate size in [`extract_random`].
pub const DEFAULT_MAX_ITER: usize = 500;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;

/// Comparison matrix: mignitudes on the diagonal, negated magnitudes off it.
pub fn comparison_matrix(a: &IntervalMatrix) -> Result<RealMatrix> {
    if !a.is_square() {
        return Err(shape_err("square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    Ok(RealMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let x = a.get(i, j);
        if i == j {
            x.mig()
        } else {
            -x.mag()
        }
    }))
}

/// Strict diagonal dominance by rows: `⟨a_ii⟩ > Σ_{j≠i} |a_ij|` for all `i`.
/// Non-square matrices are not dominant.
pub fn is_sdd(a: &IntervalMatrix) -> bool {
    let ones = vec![1.0; a.rows()];
    a.is_square() && scaled_dominance(a, &ones)
}

/// `⟨A⟩u > 0` componentwise, with rounding against the claim.
pub fn is_h_matrix(a: &IntervalMatrix, u: &[f64]) -> Result<bool> {
    if !a.is_square() || u.len() != a.rows() {
        return Err(shape_err(
            format!("square matrix and scaling of dimension {}", a.rows()),
            format!("{}x{} with {} scalings", a.rows(), a.cols(), u.len()),
        ));
    }
    if u.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidScaling);
    }
    Ok(scaled_dominance(a, u))
}

fn scaled_dominance(a: &IntervalMatrix, u: &[f64]) -> bool {
    let n = a.rows();
    (0..n).all(|i| {
        let diag = mul_down(a.get(i, i).mig(), u[i]);
        let off = (0..n)
            .filter(|&j| j != i)
            .fold(0.0, |acc, j| add_up(acc, mul_up(a.get(i, j).mag(), u[j])));
        diag > off
    })
}

/// Certified upper bound of the Perron root of a non-negative matrix.
///
/// Power iteration from the all-ones vector supplies a positive vector `v`;
/// `max_i (Mv)_i / v_i` then bounds the spectral radius from above. The
/// maximum row sum is used when it is smaller.
pub fn spectral_radius_nonneg(mat: &RealMatrix) -> Result<f64> {
    let n = mat.rows();
    if n != mat.cols() {
        return Err(shape_err("square matrix", format!("{}x{}", n, mat.cols())));
    }
    if mat.data().iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput(
            "spectral radius needs finite non-negative entries".into(),
        ));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let row_sum_bound = max_row_sum_up(mat);
    if row_sum_bound == 0.0 {
        return Ok(0.0);
    }

    let mut v = vec![1.0; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        let w = mat.matvec(&v);
        let norm = w.iter().fold(0.0f64, |a, &b| a.max(b));
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let shift = next
            .iter()
            .zip(&v)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        v = next;
        let converged = (norm - lambda).abs() <= POWER_TOLERANCE * norm && shift <= POWER_TOLERANCE;
        lambda = norm;
        if converged {
            break;
        }
    }

    // Collatz-Wielandt bound with a strictly positive vector.
    let floor = f64::MIN_POSITIVE.max(1e-200);
    let v: Vec<f64> = v.iter().map(|&x| x.max(floor)).collect();
    let mut cw: f64 = 0.0;
    for i in 0..n {
        let mv = (0..n).fold(0.0, |acc, j| add_up(acc, mul_up(mat.get(i, j), v[j])));
        cw = cw.max(div_up(mv, v[i]));
    }
    Ok(cw.min(row_sum_bound))
}

fn max_row_sum_up(mat: &RealMatrix) -> f64 {
    (0..mat.rows())
        .map(|i| (0..mat.cols()).fold(0.0, |acc, j| add_up(acc, mat.get(i, j))))
        .fold(0.0, f64::max)
}

fn min_row_sum_down(mat: &RealMatrix) -> f64 {
    (0..mat.rows())
        .map(|i| (0..mat.cols()).fold(0.0, |acc, j| add_down(acc, mat.get(i, j))))
        .fold(f64::INFINITY, f64::min)
}

/// Outcome of [`rohn_test`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RohnOutcome {
    pub regular: bool,
    /// Upper bound of the spectral radius, `None` for a singular midpoint.
    pub radius_bound: Option<f64>,
}

/// Spectral-radius regularity test.
///
/// With `R` the floating-point inverse of `mid(A)`, `G = |I − R·A|` is
/// bounded entrywise with interval arithmetic. `ρ(G) < 1` implies that `R·A`
/// and hence `A` is regular. For an exact inverse `G = |mid(A)⁻¹|·Δ`.
pub fn rohn_test(a: &IntervalMatrix) -> RohnOutcome {
    let not_certified = RohnOutcome {
        regular: false,
        radius_bound: None,
    };
    if !a.is_square() || a.rows() == 0 {
        return not_certified;
    }
    let Ok(r) = a.midpoint().inverse() else {
        return not_certified;
    };
    if r.data().iter().any(|x| !x.is_finite()) {
        return not_certified;
    }
    let Ok(ra) = a.left_mul_real(&r) else {
        return not_certified;
    };
    let n = a.rows();
    let g = RealMatrix::from_fn(n, n, |i, j| {
        let e = if i == j { Interval::ONE } else { Interval::ZERO };
        (e - ra.get(i, j)).mag()
    });
    let verdict = |bound: f64| RohnOutcome {
        regular: bound < 1.0,
        radius_bound: Some(bound),
    };
    let max_sum = max_row_sum_up(&g);
    if max_sum < 1.0 {
        return verdict(max_sum);
    }
    // ρ(G) is at least the smallest row sum.
    if min_row_sum_down(&g) >= 1.0 {
        return verdict(max_sum);
    }
    match spectral_radius_nonneg(&g) {
        Ok(rho) => verdict(rho),
        Err(_) => not_certified,
    }
}

pub fn is_regular_rohn(a: &IntervalMatrix) -> bool {
    rohn_test(a).regular
}

/// Extraction strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Sdd,
    Hmatrix,
    Random,
    #[default]
    BestOf,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Sdd,
        Strategy::Hmatrix,
        Strategy::Random,
        Strategy::BestOf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sdd => "sdd",
            Strategy::Hmatrix => "hmatrix",
            Strategy::Random => "random",
            Strategy::BestOf => "best-of",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown strategy `{s}`")))
    }
}

/// Regularity test that certified a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sdd,
    Hmatrix,
    RohnRandom,
}

/// Which way the selected block is dominant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    /// Column-wise, i.e. the transposed block passes the row test.
    Columns,
    Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    None,
    Sdd { dominance: Dominance },
    Hmatrix { dominance: Dominance, scaling: Vec<f64> },
    Rohn { radius_bound: f64, draws: usize },
}

/// A certified-regular square block of an interval matrix. `cols[k]` is the
/// diagonal partner of `rows[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub rank: usize,
    pub method: Method,
    pub certificate: Certificate,
}

impl RankProfile {
    fn empty(method: Method) -> Self {
        RankProfile {
            rows: Vec::new(),
            cols: Vec::new(),
            rank: 0,
            method,
            certificate: Certificate::None,
        }
    }

    /// The selected block with `cols[k]` on the diagonal of row `k`.
    pub fn submatrix(&self, a: &IntervalMatrix) -> IntervalMatrix {
        a.submatrix(&self.rows, &self.cols)
    }

    pub fn projection(&self) -> Projection {
        Projection::new(self.rows.clone(), self.cols.clone())
    }

    /// Re-runs the recorded regularity test on `a`.
    pub fn verify(&self, a: &IntervalMatrix) -> bool {
        if self.rank == 0 {
            return true;
        }
        let b = self.submatrix(a);
        match &self.certificate {
            Certificate::None => false,
            Certificate::Sdd { dominance } => match dominance {
                Dominance::Columns => is_sdd(&b.transpose()),
                Dominance::Rows => is_sdd(&b),
            },
            Certificate::Hmatrix { dominance, scaling } => {
                let b = match dominance {
                    Dominance::Columns => b.transpose(),
                    Dominance::Rows => b,
                };
                is_h_matrix(&b, scaling).unwrap_or(false)
            }
            Certificate::Rohn { .. } => is_regular_rohn(&b),
        }
    }
}

fn magnitude_total(a: &IntervalMatrix) -> f64 {
    a.magnitude_sum()
}

/// 0-1 program selecting cells `x_ij` (variable `i*m + j`) with at most one
/// per row and column, such that every selected cell strictly dominates the
/// other selected rows' entries in its column:
///
/// `Σ_{i≠k} Σ_j |a_il| x_ij + (M − ⟨a_kl⟩ + μ) x_kl <= M`.
pub fn build_sdd_blp(a: &IntervalMatrix, big_m: f64, mu: f64) -> Result<BinaryLinearProgram> {
    build_dominance_blp(a, big_m, |_, _| 1.0, mu)
}

/// Like [`build_sdd_blp`] with every selected cell's row scaled by the
/// inverse of its mignitude. Zero-mignitude cells are never selected.
pub fn build_hmatrix_blp(a: &IntervalMatrix, big_m: f64, mu: f64) -> Result<BinaryLinearProgram> {
    build_dominance_blp(
        a,
        big_m,
        |i, j| {
            let g = a.get(i, j).mig();
            if g > 0.0 {
                1.0 / g
            } else {
                0.0
            }
        },
        mu,
    )
}

/// `scale(i, j)` weights the column entries of a selected cell's row; zero
/// marks a cell that may not be selected.
fn build_dominance_blp(
    a: &IntervalMatrix,
    big_m: f64,
    scale: impl Fn(usize, usize) -> f64,
    mu: f64,
) -> Result<BinaryLinearProgram> {
    if !(mu > 0.0) || !big_m.is_finite() {
        return Err(Error::InvalidParams(format!(
            "need mu > 0 and finite M, got mu = {mu}, M = {big_m}"
        )));
    }
    let (n, m) = (a.rows(), a.cols());
    let var = |i: usize, j: usize| i * m + j;
    let mut p = BinaryLinearProgram::new(vec![1.0; n * m])?.with_grid(n, m);
    for j in 0..m {
        let mut c = vec![0.0; n * m];
        for i in 0..n {
            c[var(i, j)] = 1.0;
        }
        p.add_constraint(c, 1.0)?;
    }
    for i in 0..n {
        let mut c = vec![0.0; n * m];
        for j in 0..m {
            c[var(i, j)] = 1.0;
        }
        p.add_constraint(c, 1.0)?;
    }
    for k in 0..n {
        for l in 0..m {
            let mut c = vec![0.0; n * m];
            let s = scale(k, l);
            let g = a.get(k, l).mig();
            if s == 0.0 || g == 0.0 {
                c[var(k, l)] = 1.0;
                p.add_constraint(c, 0.0)?;
                continue;
            }
            for i in (0..n).filter(|&i| i != k) {
                let mag = a.get(i, l).mag();
                for j in 0..m {
                    c[var(i, j)] = mag * scale(i, j);
                }
            }
            c[var(k, l)] = big_m - g * s + mu;
            p.add_constraint(c, big_m)?;
        }
    }
    Ok(p)
}

/// Solves an extraction program and returns the selected cells row-major.
fn selected_cells(p: &BinaryLinearProgram, m: usize) -> Vec<(usize, usize)> {
    let s = p.solve();
    if s.status != BlpStatus::Optimal {
        return Vec::new();
    }
    s.assignment
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| (v / m, v % m))
        .collect()
}

fn profile_from_cells(mut cells: Vec<(usize, usize)>, method: Method, certificate: Certificate) -> RankProfile {
    cells.sort_unstable();
    RankProfile {
        rank: cells.len(),
        rows: cells.iter().map(|c| c.0).collect(),
        cols: cells.iter().map(|c| c.1).collect(),
        method,
        certificate,
    }
}

/// Extraction through the dominance program on `A` and `Aᵀ`.
fn extract_by_lp(a: &IntervalMatrix, hmatrix: bool) -> Result<RankProfile> {
    let method = if hmatrix { Method::Hmatrix } else { Method::Sdd };
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(RankProfile::empty(method));
    }
    let build = |mat: &IntervalMatrix| -> Result<BinaryLinearProgram> {
        if hmatrix {
            build_hmatrix_blp(mat, hmatrix_big_m(mat), LP_SLACK)
        } else {
            build_sdd_blp(mat, magnitude_total(mat), LP_SLACK)
        }
    };
    let direct = selected_cells(&build(a)?, a.cols());
    let at = a.transpose();
    let transposed = selected_cells(&build(&at)?, at.cols());

    let (cells, dominance) = if transposed.len() > direct.len() {
        (
            transposed.into_iter().map(|(i, j)| (j, i)).collect(),
            Dominance::Rows,
        )
    } else {
        (direct, Dominance::Columns)
    };
    if cells.is_empty() {
        return Ok(RankProfile::empty(method));
    }
    let mut profile = profile_from_cells(cells, method, Certificate::None);
    profile.certificate = if hmatrix {
        let b = profile.submatrix(a);
        Certificate::Hmatrix {
            dominance,
            scaling: (0..profile.rank).map(|k| 1.0 / b.get(k, k).mig()).collect(),
        }
    } else {
        Certificate::Sdd { dominance }
    };
    if !profile.verify(a) {
        return Err(Error::InternalCertification(format!(
            "{method:?} selection rows {:?} cols {:?} fails the regularity check",
            profile.rows, profile.cols
        )));
    }
    Ok(profile)
}

fn hmatrix_big_m(a: &IntervalMatrix) -> f64 {
    let (n, m) = (a.rows(), a.cols());
    let worst = (0..m)
        .map(|l| {
            (0..n)
                .map(|i| {
                    (0..m)
                        .filter(|&j| a.get(i, j).mig() > 0.0)
                        .map(|j| a.get(i, l).mag() / a.get(i, j).mig())
                        .fold(0.0, f64::max)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    magnitude_total(a).max(worst) + 1.0
}

/// Largest block found by the strict-diagonal-dominance program.
pub fn extract_sdd(a: &IntervalMatrix) -> Result<RankProfile> {
    extract_by_lp(a, false)
}

/// Largest block found by the H-matrix program with the scaling fixed to the
/// inverse mignitudes of the selected cells.
pub fn extract_hmatrix(a: &IntervalMatrix) -> Result<RankProfile> {
    extract_by_lp(a, true)
}

/// Random search from the largest size down: for each size `k`, up to
/// `max_iter` random row sets, column sets and pairings are tested with
/// [`rohn_test`]. A square matrix that is regular as a whole is returned at
/// full rank directly.
pub fn extract_random(a: &IntervalMatrix, max_iter: usize, seed: u64) -> RankProfile {
    let (n, m) = (a.rows(), a.cols());
    if a.is_square() && n > 0 {
        let out = rohn_test(a);
        if out.regular {
            return RankProfile {
                rows: (0..n).collect(),
                cols: (0..n).collect(),
                rank: n,
                method: Method::RohnRandom,
                certificate: Certificate::Rohn {
                    radius_bound: out.radius_bound.unwrap_or(0.0),
                    draws: 0,
                },
            };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = 0;
    for k in (1..=n.min(m)).rev() {
        for _ in 0..max_iter {
            draws += 1;
            let mut rows = sample(&mut rng, n, k).into_vec();
            rows.sort_unstable();
            let mut cols = sample(&mut rng, m, k).into_vec();
            cols.shuffle(&mut rng);
            let out = rohn_test(&a.submatrix(&rows, &cols));
            if out.regular {
                return RankProfile {
                    rows,
                    cols,
                    rank: k,
                    method: Method::RohnRandom,
                    certificate: Certificate::Rohn {
                        radius_bound: out.radius_bound.unwrap_or(0.0),
                        draws,
                    },
                };
            }
        }
    }
    RankProfile::empty(Method::RohnRandom)
}

/// Options of [`rank_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankOptions {
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        }
    }
}

/// Dispatches to an extractor. `BestOf` keeps the highest rank, preferring
/// SDD, then H-matrix, then random extraction on ties.
pub fn rank_profile(a: &IntervalMatrix, strategy: Strategy, opts: &RankOptions) -> Result<RankProfile> {
    match strategy {
        Strategy::Sdd => extract_sdd(a),
        Strategy::Hmatrix => extract_hmatrix(a),
        Strategy::Random => Ok(extract_random(a, opts.max_iter, opts.seed)),
        Strategy::BestOf => {
            let mut best = extract_sdd(a)?;
            for candidate in [extract_hmatrix(a)?, extract_random(a, opts.max_iter, opts.seed)] {
                if candidate.rank > best.rank {
                    best = candidate;
                }
            }
            Ok(best)
        }
    }
}
