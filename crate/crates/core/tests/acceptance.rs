//! Acceptance suite. Prints one line per criterion.
//!
//! Runs with a custom harness so the lines always reach the terminal. A
//! criterion listed in [`KNOWN_RED`] fails without failing the run, unless
//! `--ignored` or `--include-ignored` is passed. Any other failure, including
//! a soundness violation inside a known red criterion, fails the run.
//! Numeric arguments select criteria, e.g. `cargo test --test acceptance -- 3 7`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use inner_range::binlp::{BinaryLinearProgram, BlpStatus};
use inner_range::experiment::{run_rank_bench, Family, Preset, RankBenchSpec};
use inner_range::generators::{gen_embedded_dominant, gen_rotated_rank, thicken};
use inner_range::inclusion::{inner_test_rect, inner_test_square, InflationParams, Projection};
use inner_range::rank::{
    build_sdd_blp, extract_random, extract_sdd, is_h_matrix, is_sdd, rank_profile, RankOptions, Strategy,
    DEFAULT_MAX_ITER, LP_SLACK,
};
use inner_range::{Execution, FunctionModel, Interval, IntervalBox, IntervalMatrix};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose target is not reached by the implemented algorithm; see
/// the README for the analysis.
const KNOWN_RED: &[u32] = &[3];

struct Outcome {
    pass: bool,
    /// Failure that must fail the run even for a known red criterion.
    blocking: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            blocking: !pass,
            detail,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bounds(b: &IntervalBox) -> Vec<(f64, f64)> {
    b.iter().map(|c| (c.lo(), c.hi())).collect()
}

/// Area of the union of axis-aligned rectangles, by a sweep over x-slabs.
fn union_area(boxes: &[IntervalBox]) -> f64 {
    let rects: Vec<Vec<(f64, f64)>> = boxes.iter().map(bounds).collect();
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r[0].0, r[0].1]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut ys: Vec<(f64, f64)> = rects
            .iter()
            .filter(|r| r[0].0 <= a && r[0].1 >= b)
            .map(|r| r[1])
            .collect();
        ys.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut covered = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for (lo, hi) in ys {
            current = match current {
                Some((cl, ch)) if lo <= ch => Some((cl, ch.max(hi))),
                Some((cl, ch)) => {
                    covered += ch - cl;
                    Some((lo, hi))
                }
                None => Some((lo, hi)),
            };
        }
        if let Some((cl, ch)) = current {
            covered += ch - cl;
        }
        area += covered * (b - a);
    }
    area
}

fn random_point(b: &IntervalBox, rng: &mut ChaCha8Rng) -> Vec<f64> {
    b.iter()
        .map(|c| if c.wid() > 0.0 { rng.gen_range(c.lo()..=c.hi()) } else { c.lo() })
        .collect()
}

// ---------------------------------------------------------------- 1

fn linear() -> Outcome {
    let mut problem = Preset::Linear.problem(&[]).unwrap();
    problem.config.epsilon = 1e-2;
    let start = Instant::now();
    let result = problem.run().unwrap();
    let secs = start.elapsed().as_secs_f64();
    // A⁻¹ = ½[[1, −1], [1, 1]]; the diamond is convex, so corners suffice.
    let in_domain = |y: &[f64]| {
        let x1 = (y[0] - y[1]) / 2.0;
        let x2 = (y[0] + y[1]) / 2.0;
        (-2.0..=2.0).contains(&x1) && (-2.0..=2.0).contains(&x2)
    };
    let failures = result
        .inside
        .iter()
        .filter(|b| !b.corners().iter().all(|y| in_domain(y)))
        .count();
    let area = union_area(&result.inside);
    let ratio = area / 32.0;
    Outcome::new(
        failures == 0 && ratio >= 0.85 && secs < 10.0,
        format!(
            "{} inside boxes, {failures} oracle failures, union area {area:.3} = {:.1}% of 32, {secs:.2}s",
            result.inside.len(),
            100.0 * ratio
        ),
    )
}

// ---------------------------------------------------------------- 2

/// Whether a box lies in the image of the sphere patch: the annular sector
/// `cos v ∈ [cos v_hi, cos v_lo]`, `atan2(y₂, y₁) ∈ [u_lo − 2π, u_hi − 2π]`.
fn in_sphere_patch_image(b: &IntervalBox, domain: &IntervalBox) -> bool {
    let (u, v) = (domain.components()[0], domain.components()[1]);
    let (rho_lo, rho_hi) = (v.hi().cos(), v.lo().cos());
    let (th_lo, th_hi) = (u.lo() - 2.0 * PI, u.hi() - 2.0 * PI);
    let corners = b.corners();
    // The wedge is convex, so corners bound the angle; the outer disk is
    // convex too. The inner radius needs the nearest point of the box.
    let wedge = corners.iter().all(|y| (th_lo..=th_hi).contains(&y[1].atan2(y[0])));
    let outer = corners.iter().all(|y| y[0].hypot(y[1]) <= rho_hi);
    let near: Vec<f64> = b.iter().map(|c| 0.0f64.clamp(c.lo(), c.hi())).collect();
    let inner = near[0].hypot(near[1]) >= rho_lo;
    wedge && outer && inner
}

fn immersion() -> Outcome {
    let mut problem = Preset::Immersion.problem(&[]).unwrap();
    let mut areas = Vec::new();
    let mut counts = Vec::new();
    let mut failures = 0;
    let start = Instant::now();
    for eps in [0.1, 0.06, 0.02] {
        problem.config.epsilon = eps;
        let result = problem.run().unwrap();
        failures += result
            .inside
            .iter()
            .filter(|b| !in_sphere_patch_image(b, &problem.domain))
            .count();
        areas.push(union_area(&result.inside));
        counts.push(result.inside.len());
    }
    let secs = start.elapsed().as_secs_f64();
    let increasing = areas.windows(2).all(|w| w[1] > w[0]);
    Outcome::new(
        failures == 0 && increasing && secs < 60.0,
        format!(
            "inside boxes {counts:?}, union areas [{:.4}, {:.4}, {:.4}], {failures} oracle failures, {secs:.2}s",
            areas[0], areas[1], areas[2]
        ),
    )
}

// ---------------------------------------------------------------- 3

/// Solves `m x = rhs` for a small dense system; `None` when singular.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))?;
        if m[p][k].abs() < 1e-300 {
            return None;
        }
        m.swap(k, p);
        rhs.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (rhs[k] - s) / m[k][k];
    }
    Some(x)
}

/// Minimum-norm solution of `J s = −r` using only the columns in `free`.
fn min_norm_step(j: &inner_range::RealMatrix, r: &[f64], free: &[bool]) -> Option<Vec<f64>> {
    let (n, m) = (j.rows(), j.cols());
    let jjt: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..m).filter(|&k| free[k]).map(|k| j.get(a, k) * j.get(b, k)).sum())
                .collect()
        })
        .collect();
    let w = solve_dense(jjt, r.to_vec())?;
    Some(
        (0..m)
            .map(|k| if free[k] { -(0..n).map(|a| j.get(a, k) * w[a]).sum::<f64>() } else { 0.0 })
            .collect(),
    )
}

/// Multi-start damped Gauss-Newton search for `x ∈ domain` with
/// `f(x) = target`. Steps are minimum-norm; variables on a bound that the
/// step would push outward are frozen and the step is recomputed.
fn has_preimage(f: &FunctionModel, domain: &IntervalBox, target: &[f64], rng: &mut ChaCha8Rng) -> bool {
    let residual = |x: &[f64]| -> f64 {
        f.eval_real(x)
            .map(|y| y.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .unwrap_or(f64::INFINITY)
    };
    let clamp = |x: Vec<f64>| -> Vec<f64> {
        x.iter()
            .zip(domain.iter())
            .map(|(v, c)| v.clamp(c.lo(), c.hi()))
            .collect()
    };
    for _ in 0..50 {
        let mut x = random_point(domain, rng);
        let mut res = residual(&x);
        for _ in 0..100 {
            if res < 1e-9 {
                return true;
            }
            let y = f.eval_real(&x).unwrap();
            let r: Vec<f64> = y.iter().zip(target).map(|(a, b)| a - b).collect();
            let j = f.jacobian_point(&x).unwrap();
            let mut free = vec![true; x.len()];
            let mut step = None;
            for _ in 0..=x.len() {
                let Some(s) = min_norm_step(&j, &r, &free) else { break };
                let blocked: Vec<usize> = (0..x.len())
                    .filter(|&k| {
                        let c = domain.components()[k];
                        free[k] && ((x[k] <= c.lo() && s[k] < 0.0) || (x[k] >= c.hi() && s[k] > 0.0))
                    })
                    .collect();
                step = Some(s);
                if blocked.is_empty() {
                    break;
                }
                blocked.iter().for_each(|&k| free[k] = false);
            }
            let Some(step) = step else { break };
            let mut t = 1.0;
            let mut moved = false;
            while t > 1e-10 {
                let cand = clamp(x.iter().zip(&step).map(|(a, s)| a + t * s).collect());
                let cres = residual(&cand);
                if cres < res {
                    x = cand;
                    res = cres;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if res < 1e-9 {
            return true;
        }
    }
    false
}

/// Corners and 20 random points of every inside box; returns the number of
/// points without a preimage.
fn submersion_oracle(f: &FunctionModel, domain: &IntervalBox, inside: &[IntervalBox]) -> usize {
    Execution::Parallel
        .map_range(inside.len(), |i| {
            let mut rng = rng(1000 + i as u64);
            let b = &inside[i];
            let mut points = b.corners();
            points.extend((0..20).map(|_| random_point(b, &mut rng)));
            points
                .iter()
                .filter(|y| !has_preimage(f, domain, y, &mut rng))
                .count()
        })
        .into_iter()
        .sum()
}

fn submersion() -> Outcome {
    let params = [("r".to_string(), "1".to_string())];
    let mut problem = Preset::Submersion.problem(&params).unwrap();
    problem.config.epsilon = 0.5;
    let result = problem.run().unwrap();
    let failures = submersion_oracle(&problem.function, &problem.domain, &result.inside);
    // The oracle would be vacuous without inside boxes, so it also runs on
    // the first resolution that produces some.
    problem.config.epsilon = 0.3;
    let finer = problem.run().unwrap();
    let finer_failures = submersion_oracle(&problem.function, &problem.domain, &finer.inside);
    Outcome {
        pass: !result.inside.is_empty() && failures == 0,
        blocking: failures > 0 || finer_failures > 0,
        detail: format!(
            "eps=0.5: {} inside, {} boundary, {failures} oracle failures; \
             eps=0.3: {} inside, {finer_failures} oracle failures over {} points",
            result.inside.len(),
            result.boundary.len(),
            finer.inside.len(),
            24 * finer.inside.len()
        ),
    }
}

// ---------------------------------------------------------------- 4

/// Sign of a determinant. Floating-point elimination decides clear cases;
/// near-singular ones are settled in exact rational arithmetic.
fn det_sign(m: &[f64], r: usize) -> i32 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for k in 0..r {
        let p = (k..r).max_by(|&x, &y| a[x * r + k].abs().total_cmp(&a[y * r + k].abs())).unwrap();
        if p != k {
            for j in 0..r {
                a.swap(k * r + j, p * r + j);
            }
            det = -det;
        }
        let piv = a[k * r + k];
        det *= piv;
        if piv == 0.0 {
            break;
        }
        for i in k + 1..r {
            let f = a[i * r + k] / piv;
            for j in k..r {
                a[i * r + j] -= f * a[k * r + j];
            }
        }
    }
    let hadamard: f64 = (0..r)
        .map(|i| (0..r).map(|j| m[i * r + j].powi(2)).sum::<f64>().sqrt())
        .product();
    if det.abs() > 1e-8 * hadamard {
        return if det > 0.0 { 1 } else { -1 };
    }
    exact_det_sign(m, r)
}

fn exact_det_sign(m: &[f64], r: usize) -> i32 {
    let mut a: Vec<BigRational> = m.iter().map(|&v| BigRational::from_float(v).unwrap()).collect();
    let mut sign = 1;
    for k in 0..r {
        let Some(p) = (k..r).find(|&i| !a[i * r + k].is_zero()) else {
            return 0;
        };
        if p != k {
            for j in 0..r {
                a.swap(k * r + j, p * r + j);
            }
            sign = -sign;
        }
        let piv = a[k * r + k].clone();
        if piv.is_negative() {
            sign = -sign;
        }
        for i in k + 1..r {
            let f = &a[i * r + k] / &piv;
            for j in k..r {
                let t = &f * &a[k * r + j];
                a[i * r + j] -= t;
            }
        }
    }
    sign
}

/// Every endpoint matrix has a non-zero determinant of one common sign.
/// The determinant is multilinear in the entries, so this is equivalent to
/// regularity.
fn vertex_regular(b: &IntervalMatrix) -> bool {
    let r = b.rows();
    let base: Vec<f64> = b.entries().iter().map(|e| e.lo()).collect();
    let free: Vec<usize> = (0..r * r).filter(|&k| b.entries()[k].wid() > 0.0).collect();
    let mut sign = 0;
    let mut m = base.clone();
    for mask in 0u64..(1 << free.len()) {
        for (bit, &k) in free.iter().enumerate() {
            m[k] = if mask >> bit & 1 == 1 { b.entries()[k].hi() } else { base[k] };
        }
        let s = det_sign(&m, r);
        if s == 0 || (sign != 0 && s != sign) {
            return false;
        }
        sign = s;
    }
    true
}

fn random_interval_matrix(rng: &mut ChaCha8Rng) -> IntervalMatrix {
    let rows = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=4);
    let side = rng.gen_range(1..=4);
    let seed = rng.gen();
    match rng.gen_range(0..4) {
        0 => IntervalMatrix::from_fn(rows, cols, |_, _| {
            let c = rng.gen_range(-3.0..=3.0);
            let rad = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..=1.5) };
            Interval::new(c - rad, c + rad).unwrap()
        }),
        1 => gen_embedded_dominant(side, rng.gen_range(1..=side), seed).unwrap(),
        2 => {
            let delta = [0.0, 0.05, 0.25, 0.5][rng.gen_range(0..4)];
            thicken(&gen_rotated_rank(side, rng.gen_range(1..=side), seed).unwrap(), delta).unwrap()
        }
        _ => IntervalMatrix::from_fn(rows, cols, |i, j| {
            if i != j && rng.gen_bool(0.5) {
                return Interval::ZERO;
            }
            let c = rng.gen_range(-2.0..=2.0) + if i == j { 4.0 } else { 0.0 };
            let rad = rng.gen_range(0.0..=1.0);
            Interval::new(c - rad, c + rad).unwrap()
        }),
    }
}

fn rank_soundness() -> Outcome {
    let mut gen = rng(4);
    let matrices: Vec<IntervalMatrix> = (0..500).map(|_| random_interval_matrix(&mut gen)).collect();
    let per_matrix = Execution::Parallel.map_range(matrices.len(), |i| {
        let a = &matrices[i];
        let opts = RankOptions {
            seed: i as u64,
            ..RankOptions::default()
        };
        let mut checked = 0;
        let mut violations = 0;
        for strategy in Strategy::ALL {
            let profile = rank_profile(a, strategy, &opts).unwrap();
            if profile.rank > 0 {
                checked += 1;
                if !vertex_regular(&profile.submatrix(a)) {
                    violations += 1;
                }
            }
        }
        (checked, violations)
    });
    let checked: usize = per_matrix.iter().map(|p| p.0).sum();
    let violations: usize = per_matrix.iter().map(|p| p.1).sum();
    Outcome::new(
        violations == 0 && checked > 0,
        format!("500 matrices, {checked} certified profiles checked, {violations} violations"),
    )
}

// ---------------------------------------------------------------- 5

fn embedded_recovery() -> Outcome {
    let mut misses = 0;
    let mut lines = Vec::new();
    for r in 2..=8 {
        let ranks = Execution::Parallel.map_range(200, |t| {
            let a = gen_embedded_dominant(8, r, t as u64).unwrap();
            extract_sdd(&a).unwrap().rank
        });
        let miss = ranks.iter().filter(|&&k| k < r).count();
        misses += miss;
        lines.push(format!("r={r}: min {}", ranks.iter().min().unwrap()));
    }
    Outcome::new(
        misses == 0,
        format!("{misses} of 1400 trials below r ({})", lines.join(", ")),
    )
}

// ---------------------------------------------------------------- 6

fn method_ordering() -> Outcome {
    let family = Family::Rotated { delta: 0.25 };
    let mut all_ge = true;
    let mut some_gt = false;
    let mut lines = Vec::new();
    for r in 2..=8 {
        let pairs = Execution::Parallel.map_range(200, |t| {
            let a = family.generate(8, r, t as u64).unwrap();
            (
                extract_sdd(&a).unwrap().rank,
                extract_random(&a, DEFAULT_MAX_ITER, t as u64).rank,
            )
        });
        // Equal trial counts, so comparing sums compares means exactly.
        let sdd: usize = pairs.iter().map(|p| p.0).sum();
        let random: usize = pairs.iter().map(|p| p.1).sum();
        all_ge &= random >= sdd;
        some_gt |= random > sdd;
        lines.push(format!("r={r} {:.3}/{:.3}", sdd as f64 / 200.0, random as f64 / 200.0));
    }
    Outcome::new(
        all_ge && some_gt,
        format!("mean rank sdd/random: {}", lines.join(", ")),
    )
}

// ---------------------------------------------------------------- 7

fn random_coefficient(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(-5i32..=5) as f64
    } else {
        rng.gen_range(-5.0..=5.0)
    }
}

fn random_blp(rng: &mut ChaCha8Rng, i: usize) -> BinaryLinearProgram {
    if i.is_multiple_of(5) {
        // Extraction-shaped instance.
        let rows = rng.gen_range(1..=3);
        let cols = rng.gen_range(1..=12 / rows).min(4);
        let a = IntervalMatrix::from_fn(rows, cols, |_, _| {
            let c = rng.gen_range(-4.0..=4.0);
            let rad = rng.gen_range(0.0..=1.0);
            Interval::new(c - rad, c + rad).unwrap()
        });
        return build_sdd_blp(&a, a.magnitude_sum() + 1.0, LP_SLACK).unwrap();
    }
    let n = rng.gen_range(1..=12);
    let mut p = BinaryLinearProgram::new((0..n).map(|_| random_coefficient(rng)).collect()).unwrap();
    for _ in 0..rng.gen_range(0..=8) {
        let coeffs = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { random_coefficient(rng) })
            .collect();
        p.add_constraint(coeffs, rng.gen_range(-3.0..=8.0)).unwrap();
    }
    p
}

/// Best objective over all feasible assignments, with the solver's
/// feasibility tolerance.
fn enumerate(p: &BinaryLinearProgram) -> Option<f64> {
    let n = p.num_vars();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|k| (mask >> k & 1) as f64).collect();
        let feasible = p
            .constraints()
            .iter()
            .all(|c| c.coeffs.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= c.rhs + 1e-9);
        if feasible {
            let v: f64 = p.objective().iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

fn blp_exactness() -> Outcome {
    let mut gen = rng(7);
    let problems: Vec<BinaryLinearProgram> = (0..500).map(|i| random_blp(&mut gen, i)).collect();
    let verdicts = Execution::Parallel.map(&problems, |p| {
        let sol = p.solve();
        let agrees = match (enumerate(p), sol.status) {
            (None, BlpStatus::Infeasible) => true,
            (Some(best), BlpStatus::Optimal) => {
                (sol.objective_value - best).abs() <= 1e-9 * best.abs().max(1.0)
                    && p.is_feasible(&sol.assignment)
                    && (p.value(&sol.assignment) - sol.objective_value).abs() <= 1e-9 * best.abs().max(1.0)
            }
            _ => false,
        };
        (agrees, sol.status == BlpStatus::Infeasible)
    });
    let mismatches = verdicts.iter().filter(|v| !v.0).count();
    let infeasible = verdicts.iter().filter(|v| v.1).count();
    Outcome::new(
        mismatches == 0,
        format!("500 instances ({infeasible} infeasible), {mismatches} mismatches"),
    )
}

// ---------------------------------------------------------------- 8

fn random_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    let a = rng.gen_range(lo..=hi);
    let w = match rng.gen_range(0..4) {
        0 => 0.0,
        1 => rng.gen_range(0.0..=1e-8),
        2 => rng.gen_range(0.0..=1.0),
        _ => rng.gen_range(0.0..=hi - lo),
    };
    Interval::new(a, (a + w).min(hi).max(a)).unwrap()
}

fn sample(x: &Interval, rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..6) {
        0 => x.lo(),
        1 => x.hi(),
        _ if x.wid() == 0.0 => x.lo(),
        _ => rng.gen_range(x.lo()..=x.hi()),
    }
}

/// One elementary-operation containment check; `None` if the operation is
/// undefined on the drawn intervals.
fn elementary_check(op: usize, rng: &mut ChaCha8Rng) -> Option<bool> {
    let (x, y) = match op {
        7 | 10 => (random_interval(rng, 1e-3, 10.0), Interval::ZERO),
        13 | 14 => (random_interval(rng, -1.0, 1.0), Interval::ZERO),
        12 => {
            let c = rng.gen_range(-3i32..=3) as f64 * PI;
            (random_interval(rng, c - 1.4, c + 1.4), Interval::ZERO)
        }
        _ => (random_interval(rng, -10.0, 10.0), random_interval(rng, -10.0, 10.0)),
    };
    let (a, b) = (sample(&x, rng), sample(&y, rng));
    let (enclosure, value) = match op {
        0 => (x + y, a + b),
        1 => (x - y, a - b),
        2 => (x * y, a * b),
        3 => (x.checked_div(&y).ok()?, a / b),
        4 => (x.sqr(), a * a),
        5 => (x.powi(3).ok()?, a * a * a),
        6 => (x.powi(-2).ok()?, 1.0 / (a * a)),
        7 => (x.sqrt().ok()?, a.sqrt()),
        8 => (x.exp(), a.exp()),
        9 => (x.sin(), a.sin()),
        10 => (x.ln().ok()?, a.ln()),
        11 => (x.cos(), a.cos()),
        12 => (x.tan().ok()?, a.tan()),
        13 => (x.asin().ok()?, a.asin()),
        14 => (x.acos().ok()?, a.acos()),
        15 => (x.atan(), a.atan()),
        _ => (x.atan2(&y).ok()?, a.atan2(b)),
    };
    Some(enclosure.contains(value))
}

/// Random expression over `x` and `y` that is defined on all of ℝ².
fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "x".into(),
            1 => "y".into(),
            _ => format!("({:.3})", rng.gen_range(-3.0..=3.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    let b = random_expr(rng, depth - 1);
    match rng.gen_range(0..10) {
        0 => format!("({a} + {b})"),
        1 => format!("({a} - {b})"),
        2 => format!("({a} * {b})"),
        3 => format!("({a} / (2 + cos({b})))"),
        4 => format!("({a})^2"),
        5 => format!("sin({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("atan({a})"),
        8 => format!("sqrt(1 + ({a})^2)"),
        _ => format!("log(2 + cos({a}))"),
    }
}

fn jacobian_mismatches(preset: Preset, rng: &mut ChaCha8Rng) -> usize {
    let f = FunctionModel::parse(preset.function_text()).unwrap();
    let domain = preset.domain();
    let mut bad = 0;
    for _ in 0..100 {
        let p = random_point(&domain, rng);
        let j = f.jacobian_interval(&IntervalBox::point(&p)).unwrap();
        for col in 0..f.dim_in() {
            let h = 1e-6 * p[col].abs().max(1.0);
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[col] += h;
            minus[col] -= h;
            let fp = f.eval_real(&plus).unwrap();
            let fm = f.eval_real(&minus).unwrap();
            for row in 0..f.dim_out() {
                let fd = (fp[row] - fm[row]) / (plus[col] - minus[col]);
                let e = j.get(row, col);
                let gap = (e.lo() - fd).max(fd - e.hi()).max(0.0);
                if gap > 1e-5 * e.mag().max(1.0) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

fn interval_soundness() -> Outcome {
    const ELEMENTARY: usize = 60_000;
    const TREES: usize = 2_000;
    const POINTS: usize = 20;
    let mut gen = rng(8);
    let mut violations = 0;
    let mut checks = 0;
    while checks < ELEMENTARY {
        let op = gen.gen_range(0..17);
        if let Some(ok) = elementary_check(op, &mut gen) {
            checks += 1;
            violations += usize::from(!ok);
        }
    }
    let mut trees = 0;
    while trees < TREES {
        let text = format!("f(x, y) = ({})", random_expr(&mut gen, 4));
        let f = FunctionModel::parse(&text).unwrap();
        let b = IntervalBox::new(vec![random_interval(&mut gen, -2.0, 2.0), random_interval(&mut gen, -2.0, 2.0)]);
        let Ok(enclosure) = f.eval_natural(&b) else { continue };
        if !enclosure.components()[0].lo().is_finite() || !enclosure.components()[0].hi().is_finite() {
            continue;
        }
        trees += 1;
        for _ in 0..POINTS {
            let p: Vec<f64> = b.iter().map(|c| sample(c, &mut gen)).collect();
            checks += 1;
            let v = f.eval_real(&p).unwrap()[0];
            violations += usize::from(!enclosure.components()[0].contains(v));
        }
    }
    let jac: Vec<(Preset, usize)> = Preset::ALL
        .into_iter()
        .map(|p| (p, jacobian_mismatches(p, &mut gen)))
        .collect();
    let jac_bad: usize = jac.iter().map(|j| j.1).sum();
    Outcome::new(
        violations == 0 && checks >= 100_000 && jac_bad == 0,
        format!(
            "{checks} containment checks, {violations} violations; Jacobian vs finite differences: {}",
            jac.iter()
                .map(|(p, b)| format!("{} {b} misses", p.name()))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

// ---------------------------------------------------------------- 9

fn literal(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> String {
    format!("({:.4})", rng.gen_range(lo..=hi))
}

/// Random square function: a linear part plus sine and square couplings.
fn random_square_function(rng: &mut ChaCha8Rng, d: usize) -> FunctionModel {
    let names = ["x1", "x2", "x3"];
    let outputs: Vec<String> = (0..d)
        .map(|i| {
            let mut terms: Vec<String> = (0..d)
                .map(|j| {
                    let c = if i == j { literal(rng, 1.0, 3.0) } else { literal(rng, -1.0, 1.0) };
                    format!("{c}*{}", names[j])
                })
                .collect();
            terms.push(format!("{}*sin({})", literal(rng, -1.0, 1.0), names[(i + 1) % d]));
            terms.push(format!("{}*{}^2", literal(rng, -0.5, 0.5), names[i]));
            terms.join(" + ")
        })
        .collect();
    let text = format!("f({}) = ({})", names[..d].join(", "), outputs.join(", "));
    FunctionModel::parse(&text).unwrap()
}

fn reduction_identity() -> Outcome {
    let mut gen = rng(9);
    let params = InflationParams::default();
    let mut disagreements = 0;
    let mut certified = 0;
    for _ in 0..200 {
        let d = gen.gen_range(1..=3);
        let f = random_square_function(&mut gen, d);
        let x = IntervalBox::new(
            (0..d)
                .map(|_| {
                    let c = gen.gen_range(-1.0..=1.0);
                    let r = gen.gen_range(0.1..=1.0);
                    Interval::new(c - r, c + r).unwrap()
                })
                .collect(),
        );
        let x_sub = IntervalBox::new(
            x.iter()
                .map(|c| {
                    let w = c.wid() * gen.gen_range(0.05..=0.5);
                    let a = gen.gen_range(c.lo()..=c.hi() - w);
                    Interval::new(a, a + w).unwrap()
                })
                .collect(),
        );
        let centre = f.eval_real(&x_sub.midpoint()).unwrap();
        let y = IntervalBox::new(
            centre
                .iter()
                .map(|&c| {
                    let c = c + gen.gen_range(-0.1..=0.1);
                    let r = gen.gen_range(0.0..=0.4);
                    Interval::new(c - r, c + r).unwrap()
                })
                .collect(),
        );
        let square = inner_test_square(&f, &x, &x_sub, &y, &params).unwrap();
        let rect = inner_test_rect(&f, &x, &x_sub, &y, &Projection::identity(d), &params).unwrap();
        disagreements += usize::from(square.certified() != rect.certified());
        certified += usize::from(square.certified());
    }
    let mut h_disagreements = 0;
    let mut sdd_count = 0;
    for _ in 0..1000 {
        let n = gen.gen_range(1..=5);
        // Small integers make exact ties between diagonal and row sums common.
        let a = IntervalMatrix::from_fn(n, n, |i, j| {
            let lo = gen.gen_range(-3i32..=3) as f64 + if i == j { gen.gen_range(0i32..=6) as f64 } else { 0.0 };
            let hi = lo + gen.gen_range(0i32..=2) as f64;
            Interval::new(lo, hi).unwrap()
        });
        let sdd = is_sdd(&a);
        sdd_count += usize::from(sdd);
        h_disagreements += usize::from(is_h_matrix(&a, &vec![1.0; n]).unwrap() != sdd);
    }
    Outcome::new(
        disagreements == 0 && h_disagreements == 0 && certified > 0 && certified < 200,
        format!(
            "rect vs square: {disagreements} of 200 disagree ({certified} certified); \
             h-matrix(ones) vs sdd: {h_disagreements} of 1000 disagree ({sdd_count} sdd)"
        ),
    )
}

// ---------------------------------------------------------------- 10

fn determinism() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut mismatches = Vec::new();
    for family in [Family::EmbeddedDominant, Family::Rotated { delta: 0.25 }] {
        let mut spec = RankBenchSpec {
            family,
            size: 6,
            ranks: (2..=6).collect(),
            trials: 24,
            seed: 11,
            ..RankBenchSpec::default()
        };
        let first = pool.install(|| run_rank_bench(&spec).unwrap().to_json());
        let second = pool.install(|| run_rank_bench(&spec).unwrap().to_json());
        spec.execution = Execution::Sequential;
        let sequential = run_rank_bench(&spec).unwrap().to_json();
        if first != second || first != sequential {
            mismatches.push(format!("bench {family:?}"));
        }
    }
    let coarse = [(Preset::Linear, 0.1), (Preset::Curve, 0.05), (Preset::Immersion, 0.06), (Preset::Submersion, 0.5)];
    for (preset, eps) in coarse {
        for strategy in [Strategy::BestOf, Strategy::Random] {
            let mut problem = preset.problem(&[]).unwrap();
            problem.config.epsilon = eps;
            problem.config.strategy = strategy;
            problem.config.seed = 5;
            let first = pool.install(|| problem.run().unwrap().to_json());
            let second = pool.install(|| problem.run().unwrap().to_json());
            problem.config.execution = Execution::Sequential;
            let sequential = problem.run().unwrap().to_json();
            if first != second || first != sequential {
                mismatches.push(format!("pave {} {}", preset.name(), strategy.name()));
            }
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "2 bench families and 8 pave runs on a 4-thread pool vs repeat vs sequential; mismatches: {:?}",
            mismatches
        ),
    )
}

// ----------------------------------------------------------------

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (1, "linear paving", linear),
    (2, "immersion paving", immersion),
    (3, "submersion paving", submersion),
    (4, "rank extraction soundness", rank_soundness),
    (5, "embedded-dominant recovery", embedded_recovery),
    (6, "random vs sdd ordering", method_ordering),
    (7, "0-1 LP exactness", blp_exactness),
    (8, "interval and Jacobian soundness", interval_soundness),
    (9, "reduction identities", reduction_identity),
    (10, "determinism", determinism),
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let strict = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let selected: Vec<u32> = args.iter().filter_map(|a| a.parse().ok()).collect();
    if args.iter().any(|a| a == "--list") {
        for (n, name, _) in CRITERIA {
            println!("criterion_{n}: test  ({name})");
        }
        return ExitCode::SUCCESS;
    }
    let mut failed = false;
    let mut passed = 0;
    let mut ran = 0;
    for (n, name, check) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check();
        let known_red = KNOWN_RED.contains(&n);
        let status = match (outcome.pass, known_red) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {n:>2} {name}: {status}  {}  [{:.1}s]",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        passed += usize::from(outcome.pass);
        failed |= outcome.blocking || (!outcome.pass && (strict || !known_red));
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
