//! Branch-and-certify paving of the range of a function.
//!
//! Domain boxes are processed widest first. Each box gets a mean-value
//! enclosure of its image; when the inclusion test proves the projected
//! enclosure lies in the range over the initial domain it is reported as
//! inside. Failing boxes are bisected until they are narrower than `epsilon`,
//! after which their enclosure is reported as boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::expr::FunctionModel;
use crate::inclusion::{inner_test_rect, inner_test_square, InflationParams, Projection};
use crate::interval::{Interval, IntervalBox};
use crate::par::Execution;
use crate::rank::{rank_profile, RankOptions, Strategy};

/// How the output rows and input columns of the inclusion test are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    /// One profile for the whole run, from the Jacobian over the initial
    /// domain or from [`PaverConfig::projection`].
    #[default]
    Global,
    /// Certifies the given output rows; the input columns are re-extracted
    /// from the Jacobian of each box. Boxes where the rows do not reach full
    /// rank are never inside.
    PerBox { rows: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaverConfig {
    pub epsilon: f64,
    pub inflation: InflationParams,
    pub strategy: Strategy,
    /// Explicit profile used instead of extraction in global mode.
    pub projection: Option<Projection>,
    pub mode: ProfileMode,
    pub max_boxes: usize,
    /// Seed of the random extraction strategy.
    pub seed: u64,
    pub execution: Execution,
}

impl Default for PaverConfig {
    fn default() -> Self {
        PaverConfig {
            epsilon: 1e-2,
            inflation: InflationParams::default(),
            strategy: Strategy::BestOf,
            projection: None,
            mode: ProfileMode::Global,
            max_boxes: 1_000_000,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl PaverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.max_boxes == 0 {
            return Err(Error::InvalidParams("max_boxes must be at least 1".into()));
        }
        self.inflation.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaverStats {
    pub boxes_processed: usize,
    pub tests_passed: usize,
    pub bisected: usize,
    /// Boxes narrower than epsilon whose image could not be enclosed.
    pub discarded: usize,
    pub truncated: bool,
}

/// Inside and boundary boxes in the co-domain, restricted to `rows` and
/// sorted lexicographically by bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaverResult {
    /// Output components of the reported boxes, ascending.
    pub rows: Vec<usize>,
    pub inside: Vec<IntervalBox>,
    pub boundary: Vec<IntervalBox>,
    pub stats: PaverStats,
    /// Excluded from serialization so that reports are reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PaverResult {
    /// Sum of the inside volumes; overlaps are counted repeatedly.
    pub fn inside_volume(&self) -> f64 {
        self.inside.iter().map(IntervalBox::volume).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("paver results always serialize")
    }
}

struct Queued {
    width: f64,
    seq: u64,
    domain: IntervalBox,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    /// Wider first, then first-in first-out.
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .total_cmp(&other.width)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

enum Outcome {
    Inside(IntervalBox),
    Boundary(IntervalBox),
    Bisect(IntervalBox, IntervalBox),
    Discarded,
}

struct Context<'a> {
    f: &'a FunctionModel,
    domain: &'a IntervalBox,
    natural: IntervalBox,
    cfg: &'a PaverConfig,
    /// Fixed profile in global mode.
    projection: Option<Projection>,
    out_rows: Vec<usize>,
    opts: RankOptions,
}

impl Context<'_> {
    fn process(&self, x: &IntervalBox) -> Result<Outcome> {
        let fallback = |x: &IntervalBox| -> Result<Outcome> {
            if x.width() >= self.cfg.epsilon {
                let (a, b) = x.bisect()?;
                Ok(Outcome::Bisect(a, b))
            } else {
                Ok(Outcome::Discarded)
            }
        };
        let y = match self.f.mean_value_enclosure(&self.natural, x) {
            Ok(y) => y,
            Err(Error::Domain { .. }) | Err(Error::DivisionByZeroInterval) => return fallback(x),
            Err(e) => return Err(e),
        };
        let certified = match self.box_projection(x) {
            Some(p) => {
                let (n, m) = (self.f.dim_out(), self.f.dim_in());
                let report = if n == m && p.rank() == n && p == Projection::identity(n) {
                    inner_test_square(self.f, self.domain, x, &y, &self.cfg.inflation)?
                } else {
                    inner_test_rect(self.f, self.domain, x, &y, &p, &self.cfg.inflation)?
                };
                report.certified()
            }
            None => false,
        };
        let projected = y.select(&self.out_rows);
        if certified {
            Ok(Outcome::Inside(projected))
        } else if x.width() >= self.cfg.epsilon {
            let (a, b) = x.bisect()?;
            Ok(Outcome::Bisect(a, b))
        } else {
            Ok(Outcome::Boundary(projected))
        }
    }

    fn box_projection(&self, x: &IntervalBox) -> Option<Projection> {
        if let Some(p) = &self.projection {
            return Some(p.clone());
        }
        let ProfileMode::PerBox { rows } = &self.cfg.mode else {
            return None;
        };
        let jac = self.f.jacobian_interval(x).ok()?;
        let all: Vec<usize> = (0..jac.cols()).collect();
        let profile = rank_profile(&jac.submatrix(rows, &all), self.cfg.strategy, &self.opts).ok()?;
        (profile.rank == rows.len()).then(|| {
            Projection::new(
                profile.rows.iter().map(|&k| rows[k]).collect(),
                profile.cols.clone(),
            )
        })
    }
}

/// Paves the range of `f` over `domain`.
pub fn pave(f: &FunctionModel, domain: &IntervalBox, cfg: &PaverConfig) -> Result<PaverResult> {
    let start = Instant::now();
    cfg.validate()?;
    let (n, m) = (f.dim_out(), f.dim_in());
    if domain.dim() != m {
        return Err(shape_err(
            format!("domain box of dimension {m}"),
            format!("dimension {}", domain.dim()),
        ));
    }
    let natural = f.eval_natural(domain)?;
    let opts = RankOptions {
        seed: cfg.seed,
        ..RankOptions::default()
    };

    let (projection, out_rows) = match &cfg.mode {
        ProfileMode::Global => {
            let p = match &cfg.projection {
                Some(p) => p.clone(),
                None => {
                    let profile = rank_profile(&f.jacobian_interval(domain)?, cfg.strategy, &opts)?;
                    if profile.rank == 0 {
                        return Err(Error::ProfileUnavailable);
                    }
                    profile.projection()
                }
            };
            p.validate(n, m)?;
            let mut rows = p.rows.clone();
            rows.sort_unstable();
            (Some(p), rows)
        }
        ProfileMode::PerBox { rows } => {
            Projection::new(rows.clone(), (0..rows.len()).collect()).validate(n, m)?;
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            (None, sorted)
        }
    };

    let ctx = Context {
        f,
        domain,
        natural,
        cfg,
        projection,
        out_rows: out_rows.clone(),
        opts,
    };

    let mut stats = PaverStats::default();
    let mut inside = Vec::new();
    let mut boundary = Vec::new();
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Queued>, b: IntervalBox| {
        queue.push(Queued {
            width: b.width(),
            seq,
            domain: b,
        });
        seq += 1;
    };
    push(&mut queue, domain.clone());

    // Boxes of equal width are independent and would be popped consecutively
    // by a sequential run, so each batch preserves the sequential order.
    while let Some(top) = queue.pop() {
        let budget = cfg.max_boxes - stats.boxes_processed;
        let mut batch = vec![top.domain];
        while batch.len() < budget && queue.peek().is_some_and(|q| q.width == top.width) {
            batch.push(queue.pop().expect("peeked").domain);
        }
        let outcomes = cfg.execution.map(&batch, |x| ctx.process(x));
        stats.boxes_processed += batch.len();
        for outcome in outcomes {
            match outcome? {
                Outcome::Inside(y) => {
                    stats.tests_passed += 1;
                    inside.push(y);
                }
                Outcome::Boundary(y) => boundary.push(y),
                Outcome::Bisect(a, b) => {
                    stats.bisected += 1;
                    push(&mut queue, a);
                    push(&mut queue, b);
                }
                Outcome::Discarded => stats.discarded += 1,
            }
        }
        if stats.boxes_processed >= cfg.max_boxes && !queue.is_empty() {
            stats.truncated = true;
            break;
        }
    }

    sort_boxes(&mut inside);
    sort_boxes(&mut boundary);
    Ok(PaverResult {
        rows: out_rows,
        inside,
        boundary,
        stats,
        wall_time: start.elapsed(),
    })
}

fn cmp_boxes(a: &IntervalBox, b: &IntervalBox) -> Ordering {
    let key = |x: &Interval| (x.lo(), x.hi());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let (p, q) = (key(x), key(y));
            p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1))
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.dim().cmp(&b.dim()))
}

fn sort_boxes(boxes: &mut [IntervalBox]) {
    boxes.sort_by(cmp_boxes);
}
