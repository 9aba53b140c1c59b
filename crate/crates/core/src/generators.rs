//! Random test matrices with a known lower bound on their rank.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, RealMatrix};

fn check_rank(size: usize, r: usize) -> Result<()> {
    if r == 0 || r > size {
        return Err(Error::InvalidParams(format!(
            "rank must lie in 1..={size}, got {r}"
        )));
    }
    Ok(())
}

/// `m×m` interval matrix with entries `[a, a+1]`, `a` uniform in `[0, 9]`,
/// in which `r` cells in distinct rows and columns are raised above the
/// magnitude sum of their column. The boosted cells form a column-wise
/// strictly dominant `r×r` block.
pub fn gen_embedded_dominant(m: usize, r: usize, seed: u64) -> Result<IntervalMatrix> {
    check_rank(m, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo: Vec<f64> = (0..m * m).map(|_| rng.gen_range(0.0..=9.0)).collect();
    let rows = sample(&mut rng, m, r).into_vec();
    let mut cols = sample(&mut rng, m, r).into_vec();
    cols.shuffle(&mut rng);
    for (&i, &j) in rows.iter().zip(&cols) {
        let column_sum: f64 = (0..m).map(|k| lo[k * m + j] + 1.0).sum();
        lo[i * m + j] = 1.0 + column_sum;
    }
    IntervalMatrix::new(
        m,
        m,
        lo.into_iter()
            .map(|a| Interval::new(a, a + 1.0))
            .collect::<Result<_>>()?,
    )
}

/// Real `n×n` matrix of rank `r`.
///
/// The leading `r×r` block is upper triangular with diagonal entries of
/// modulus in `[1, 2]` and other entries in `[-1, 1]`; rows below it are
/// zero. The remaining `n−r` columns are random combinations of the first
/// `r`, with coefficients in `[-1, 1]`. Finally `n+1` Givens rotations with
/// angles in `[0, π]` act on random coordinate pairs from the left.
pub fn gen_rotated_rank(n: usize, r: usize, seed: u64) -> Result<RealMatrix> {
    check_rank(n, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut j = RealMatrix::zeros(n, n);
    for row in 0..r {
        for col in row..r {
            let v = if row == col {
                let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                s * rng.gen_range(1.0..=2.0)
            } else {
                rng.gen_range(-1.0..=1.0)
            };
            j.set(row, col, v);
        }
    }
    for col in r..n {
        let coeffs: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        for row in 0..n {
            let v = (0..r).map(|c| coeffs[c] * j.get(row, c)).sum();
            j.set(row, col, v);
        }
    }
    if n >= 2 {
        for _ in 0..=n {
            let pair = sample(&mut rng, n, 2).into_vec();
            let (k, l) = (pair[0], pair[1]);
            let theta = rng.gen_range(0.0..=std::f64::consts::PI);
            let (s, c) = theta.sin_cos();
            for col in 0..n {
                let (a, b) = (j.get(k, col), j.get(l, col));
                j.set(k, col, c * a - s * b);
                j.set(l, col, s * a + c * b);
            }
        }
    }
    Ok(j)
}

/// Entrywise `[a − δ, a + δ]`, rounded outward.
pub fn thicken(a: &RealMatrix, delta: f64) -> Result<IntervalMatrix> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "thickening must be finite and non-negative, got {delta}"
        )));
    }
    let d = Interval::new(-delta, delta)?;
    Ok(IntervalMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        Interval::point(a.get(i, j)) + d
    }))
}
