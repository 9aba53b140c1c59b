//! Ready-made paving problems, the rank-extraction benchmark and report
//! export.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::FunctionModel;
use crate::generators::{gen_embedded_dominant, gen_rotated_rank, thicken};
use crate::inclusion::Projection;
use crate::interval::{IntervalBox, IntervalMatrix};
use crate::par::Execution;
use crate::paver::{pave, PaverConfig, PaverResult, ProfileMode};
use crate::rank::{extract_hmatrix, extract_random, extract_sdd, RankProfile, DEFAULT_MAX_ITER};

use std::f64::consts::PI;

/// Built-in paving problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `(x + y, −x + y)` over `[−2, 2]²`.
    Linear,
    /// The curve `(sin 2x, sin x, x/2)` over `[0, π]`.
    Curve,
    /// Sphere patch `(cos u cos v, sin u cos v, sin v)`, first two outputs.
    Immersion,
    /// Torus-like map `ℝ³ → ℝ²` with a free radius parameter `r`.
    Submersion,
}

/// Margin keeping the immersion away from the poles and the seam.
pub const IMMERSION_MARGIN: f64 = 0.01;
/// Margin keeping the submersion angles below a full turn.
pub const SUBMERSION_MARGIN: f64 = 1e-3;

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Linear,
        Preset::Curve,
        Preset::Immersion,
        Preset::Submersion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Linear => "linear-4.1",
            Preset::Curve => "curve-ex1",
            Preset::Immersion => "immersion-5.1",
            Preset::Submersion => "submersion-5.2",
        }
    }

    pub fn function_text(self) -> &'static str {
        match self {
            Preset::Linear => "f(x1, x2) = (x1 + x2, -x1 + x2)",
            Preset::Curve => "f(x) = (sin(2*x), sin(x), x/2)",
            Preset::Immersion => "f(u, v) = (cos(u)*cos(v), sin(u)*cos(v), sin(v))",
            Preset::Submersion => {
                "param r = 1\nf(x, y, z) = ((x + r*cos(z))*cos(y), (x + r*sin(z))*sin(y))"
            }
        }
    }

    pub fn domain(self) -> IntervalBox {
        let bounds: Vec<(f64, f64)> = match self {
            Preset::Linear => vec![(-2.0, 2.0); 2],
            Preset::Curve => vec![(0.0, PI)],
            Preset::Immersion => {
                let t = IMMERSION_MARGIN;
                vec![(1.5 * PI + t, 2.0 * PI - t), (t, 0.5 * PI - t)]
            }
            Preset::Submersion => {
                let top = 2.0 * PI - SUBMERSION_MARGIN;
                vec![(2.0, 4.5), (0.0, top), (0.0, top)]
            }
        };
        IntervalBox::from_bounds(&bounds).expect("preset bounds are ordered")
    }

    pub fn default_epsilon(self) -> f64 {
        match self {
            Preset::Linear => 1e-2,
            Preset::Curve => 1e-2,
            Preset::Immersion => 0.1,
            Preset::Submersion => 0.5,
        }
    }

    /// Paving problem with `params` overriding the preset's parameters.
    pub fn problem(self, params: &[(String, String)]) -> Result<PaveProblem> {
        let function = FunctionModel::parse_with_params(self.function_text(), params)?;
        let mut config = PaverConfig {
            epsilon: self.default_epsilon(),
            ..PaverConfig::default()
        };
        match self {
            Preset::Immersion => config.projection = Some(Projection::identity(2)),
            Preset::Submersion => config.mode = ProfileMode::PerBox { rows: vec![0, 1] },
            Preset::Linear | Preset::Curve => {}
        }
        Ok(PaveProblem {
            function,
            domain: self.domain(),
            config,
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown preset `{s}`")))
    }
}

/// A function, its domain and the paver configuration.
#[derive(Debug, Clone)]
pub struct PaveProblem {
    pub function: FunctionModel,
    pub domain: IntervalBox,
    pub config: PaverConfig,
}

impl PaveProblem {
    pub fn run(&self) -> Result<PaverResult> {
        pave(&self.function, &self.domain, &self.config)
    }
}

/// SVG drawing of the first two reported components; one-dimensional
/// results are drawn as bars. Inside boxes are filled, boundary boxes
/// outlined.
pub fn render_svg(result: &PaverResult) -> String {
    const SIZE: f64 = 600.0;
    const PAD: f64 = 20.0;
    let rect = |b: &IntervalBox| -> (f64, f64, f64, f64) {
        let x = b[0];
        let y = if b.dim() >= 2 { (b[1].lo(), b[1].hi()) } else { (0.0, 1.0) };
        (x.lo(), x.hi(), y.0, y.1)
    };
    let all: Vec<(f64, f64, f64, f64)> = result.inside.iter().chain(&result.boundary).map(rect).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in &all {
        x0 = x0.min(r.0);
        x1 = x1.max(r.1);
        y0 = y0.min(r.2);
        y1 = y1.max(r.3);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let scale = (SIZE - 2.0 * PAD) / (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let width = (x1 - x0) * scale + 2.0 * PAD;
    let height = (y1 - y0) * scale + 2.0 * PAD;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut draw = |b: &IntervalBox, style: &str| {
        let (a, bx, c, d) = rect(b);
        let _ = writeln!(
            svg,
            r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" {style}/>"#,
            PAD + (a - x0) * scale,
            PAD + (y1 - d) * scale,
            (bx - a) * scale,
            (d - c) * scale
        );
    };
    for b in &result.inside {
        draw(b, r##"fill="#4878d0" fill-opacity="0.8" stroke="#1f3f7a" stroke-width="0.3""##);
    }
    for b in &result.boundary {
        draw(b, r##"fill="none" stroke="#d65f5f" stroke-width="0.5""##);
    }
    svg.push_str("</svg>\n");
    svg
}

/// One line per box: `kind,lo0,hi0,lo1,hi1,...`.
pub fn boxes_csv(result: &PaverResult) -> String {
    let mut out = String::from("kind");
    for k in &result.rows {
        let _ = write!(out, ",lo{k},hi{k}");
    }
    out.push('\n');
    for (kind, list) in [("inside", &result.inside), ("boundary", &result.boundary)] {
        for b in list {
            out.push_str(kind);
            for c in b.iter() {
                let _ = write!(out, ",{:?},{:?}", c.lo(), c.hi());
            }
            out.push('\n');
        }
    }
    out
}

/// Random matrix families for the rank benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// Unit-width entries with an embedded dominant block of size `r`.
    EmbeddedDominant,
    /// Rank-`r` rotated matrices thickened by `±delta`.
    Rotated { delta: f64 },
}

impl Family {
    pub fn generate(self, size: usize, r: usize, seed: u64) -> Result<IntervalMatrix> {
        match self {
            Family::EmbeddedDominant => gen_embedded_dominant(size, r, seed),
            Family::Rotated { delta } => thicken(&gen_rotated_rank(size, r, seed)?, delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankBenchSpec {
    pub family: Family,
    pub size: usize,
    pub ranks: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Adds mean wall time per method to the report.
    pub timings: bool,
    pub execution: Execution,
}

impl Default for RankBenchSpec {
    fn default() -> Self {
        RankBenchSpec {
            family: Family::EmbeddedDominant,
            size: 8,
            ranks: (2..=8).collect(),
            trials: 200,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
            timings: false,
            execution: Execution::default(),
        }
    }
}

/// The extractors compared by the benchmark.
pub const BENCH_METHODS: [&str; 3] = ["sdd", "hmatrix", "random"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_rank: f64,
    /// Population standard deviation.
    pub std_rank: f64,
    pub min_rank: usize,
    pub max_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub r: usize,
    pub methods: Vec<MethodSummary>,
}

impl BenchPoint {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankBenchReport {
    pub family: Family,
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub points: Vec<BenchPoint>,
}

impl RankBenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_csv(&self) -> String {
        let timed = self
            .points
            .iter()
            .flat_map(|p| &p.methods)
            .any(|m| m.mean_seconds.is_some());
        let mut out = String::from("r,method,mean_rank,std_rank,min_rank,max_rank");
        if timed {
            out.push_str(",mean_seconds");
        }
        out.push('\n');
        for p in &self.points {
            for m in &p.methods {
                let _ = write!(
                    out,
                    "{},{},{:?},{:?},{},{}",
                    p.r, m.method, m.mean_rank, m.std_rank, m.min_rank, m.max_rank
                );
                if let Some(s) = m.mean_seconds {
                    let _ = write!(out, ",{s:?}");
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Profiles of the three extractors on one instance, with their run times.
fn run_trial(a: &IntervalMatrix, max_iter: usize, seed: u64) -> Result<Vec<(RankProfile, f64)>> {
    let timed = |f: &dyn Fn() -> Result<RankProfile>| -> Result<(RankProfile, f64)> {
        let start = Instant::now();
        let p = f()?;
        Ok((p, start.elapsed().as_secs_f64()))
    };
    Ok(vec![
        timed(&|| extract_sdd(a))?,
        timed(&|| extract_hmatrix(a))?,
        timed(&|| Ok(extract_random(a, max_iter, seed)))?,
    ])
}

/// Runs every extractor on `trials` instances per rank. Trial `t` uses the
/// seed `seed + t` for both the generator and the random extractor.
pub fn run_rank_bench(spec: &RankBenchSpec) -> Result<RankBenchReport> {
    if spec.trials == 0 || spec.max_iter == 0 {
        return Err(Error::InvalidParams("trials and max_iter must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(spec.ranks.len());
    for &r in &spec.ranks {
        let runs = spec.execution.map_range(spec.trials, |t| {
            let seed = spec.seed.wrapping_add(t as u64);
            let a = spec.family.generate(spec.size, r, seed)?;
            run_trial(&a, spec.max_iter, seed)
        });
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let methods = BENCH_METHODS
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let ranks: Vec<f64> = runs.iter().map(|run| run[k].0.rank as f64).collect();
                let n = ranks.len() as f64;
                let mean = ranks.iter().sum::<f64>() / n;
                let var = ranks.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                MethodSummary {
                    method: (*name).to_string(),
                    mean_rank: mean,
                    std_rank: var.sqrt(),
                    min_rank: runs.iter().map(|run| run[k].0.rank).min().unwrap_or(0),
                    max_rank: runs.iter().map(|run| run[k].0.rank).max().unwrap_or(0),
                    mean_seconds: spec
                        .timings
                        .then(|| runs.iter().map(|run| run[k].1).sum::<f64>() / n),
                }
            })
            .collect();
        points.push(BenchPoint { r, methods });
    }
    Ok(RankBenchReport {
        family: spec.family,
        size: spec.size,
        trials: spec.trials,
        seed: spec.seed,
        max_iter: spec.max_iter,
        points,
    })
}
