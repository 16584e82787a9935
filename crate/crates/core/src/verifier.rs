//! Empirical distortion measurement for the embedding.
//!
//! Point pairs are drawn from a region of `H_p^{n+1}`, both distances are
//! measured, and the smallest linear envelope `(l, m)` with
//! `d_tree ≤ l·d_hyp + m` and `d_hyp ≤ l·d_tree + m` is fitted over a grid of
//! additive constants. Sampling is split into fixed-size chunks, each with
//! its own ChaCha stream, so results do not depend on the thread count.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{color_distances, embed_with, LevelRule, Norm};
use crate::error::{Error, Result};
use crate::hyperbolic::{hyp_distance, HoroPoint};
use crate::params::{Params, ParamsSpec};
use crate::tree::DEFAULT_SCAN_CAP;

/// Pairs closer than this are recorded but left out of the ratio fit.
pub const SMALL_PAIR_CUTOFF: f64 = 0.1;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub t_min: f64,
    pub t_max: f64,
    pub x_radius: f64,
}

impl Region {
    /// `t ∈ [−4, 4]`, `|x_i| ≤ p^4`.
    pub fn default_for(params: &Params) -> Self {
        Region {
            t_min: -4.0,
            t_max: 4.0,
            x_radius: f64::from(params.p()).powi(4),
        }
    }

    /// Scales the height range by `s` and the horizontal radius by the
    /// power `s`, so the region grows by a factor `s` in hyperbolic terms:
    /// the bottom horosphere keeps the same intrinsic width.
    pub fn scaled(&self, s: f64) -> Self {
        Region {
            t_min: self.t_min * s,
            t_max: self.t_max * s,
            x_radius: self.x_radius.powf(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Both points uniform in the region.
    Uniform,
    /// Equal heights, uniform horizontal positions.
    SameHorosphere,
    /// Equal horizontal positions, integer heights.
    Vertical,
    /// Pairs at hyperbolic distance at most 2.
    NearPairs,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(Strategy::Uniform),
            "same_horosphere" => Ok(Strategy::SameHorosphere),
            "vertical" => Ok(Strategy::Vertical),
            "near_pairs" => Ok(Strategy::NearPairs),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub region: Region,
    pub count: usize,
    pub strategy: Strategy,
    pub seed: u64,
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        let r = &self.region;
        if !(r.t_min.is_finite() && r.t_max.is_finite() && r.x_radius.is_finite()) {
            return Err(Error::InvalidPlan("region bounds must be finite".into()));
        }
        if r.t_min > r.t_max {
            return Err(Error::InvalidPlan(format!("t_min {} > t_max {}", r.t_min, r.t_max)));
        }
        if r.x_radius <= 0.0 {
            return Err(Error::InvalidPlan(format!("x_radius {} must be positive", r.x_radius)));
        }
        if self.count == 0 {
            return Err(Error::InvalidPlan("count must be at least 1".into()));
        }
        if self.strategy == Strategy::Vertical && r.t_min.ceil() > r.t_max.floor() {
            return Err(Error::InvalidPlan("vertical pairs need an integer height in range".into()));
        }
        Ok(())
    }
}

/// Options shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub norm: Norm,
    pub scan_cap: u32,
    pub level_rule: LevelRule,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            norm: Norm::L1,
            scan_cap: DEFAULT_SCAN_CAP,
            level_rule: LevelRule::Rounded,
        }
    }
}

fn draw_point(params: &Params, region: &Region, rng: &mut ChaCha8Rng) -> HoroPoint {
    let t = rng.random_range(region.t_min..=region.t_max);
    let x = (0..params.n())
        .map(|_| rng.random_range(-region.x_radius..=region.x_radius))
        .collect();
    HoroPoint::new(t, x)
}

fn draw_pair(params: &Params, plan: &SamplePlan, rng: &mut ChaCha8Rng) -> (HoroPoint, HoroPoint) {
    let region = &plan.region;
    match plan.strategy {
        Strategy::Uniform => (draw_point(params, region, rng), draw_point(params, region, rng)),
        Strategy::SameHorosphere => {
            let z = draw_point(params, region, rng);
            let mut w = draw_point(params, region, rng);
            w.t = z.t;
            (z, w)
        }
        Strategy::Vertical => {
            let (lo, hi) = (region.t_min.ceil() as i64, region.t_max.floor() as i64);
            let mut z = draw_point(params, region, rng);
            z.t = rng.random_range(lo..=hi) as f64;
            let w = HoroPoint::new(rng.random_range(lo..=hi) as f64, z.x.clone());
            (z, w)
        }
        Strategy::NearPairs => {
            // Climb at most 1, move at most 1 along the higher horosphere,
            // and descend: total length ≤ 2.
            let z = draw_point(params, region, rng);
            let t = z.t + rng.random_range(-1.0..=1.0);
            let top = z.t.max(t);
            let scale = f64::from(params.p()).powf(-top) / (params.n() as f64).sqrt();
            let x = z
                .x
                .iter()
                .map(|xi| xi + scale * rng.random_range(-1.0..=1.0))
                .collect();
            (z, HoroPoint::new(t, x))
        }
    }
}

/// Draws `plan.count` pairs; identical for identical plans.
pub fn sample_pairs(params: &Params, plan: &SamplePlan) -> Result<Vec<(HoroPoint, HoroPoint)>> {
    plan.validate()?;
    let chunks = plan.count.div_ceil(CHUNK);
    let parts: Vec<Vec<_>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK.min(plan.count - chunk * CHUNK);
            (0..len).map(|_| draw_pair(params, plan, &mut rng)).collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub z: HoroPoint,
    pub w: HoroPoint,
    pub d_hyp: f64,
    pub d_tree: f64,
    pub per_color: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub l: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub params: ParamsSpec,
    pub plan: Option<SamplePlan>,
    pub norm: Norm,
    pub samples: Vec<Sample>,
    pub fit: Option<Fit>,
    pub violations: usize,
    pub runtime_ms: u64,
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    params: ParamsSpec,
    plan: Option<&'a SamplePlan>,
    norm: Norm,
    fit: Option<Fit>,
    n_samples: usize,
    violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
}

impl DistortionReport {
    /// JSON summary. Wall-clock time is included only on request, so
    /// repeated runs with one seed produce identical bytes.
    pub fn summary_json(&self, include_timing: bool) -> String {
        let summary = ReportSummary {
            params: self.params,
            plan: self.plan.as_ref(),
            norm: self.norm,
            fit: self.fit,
            n_samples: self.samples.len(),
            violations: self.violations,
            runtime_ms: include_timing.then_some(self.runtime_ms),
        };
        serde_json::to_string_pretty(&summary).expect("report serializes")
    }

    /// One row per pair: `t,x…,t',x'…,d_hyp,d_tree,per-color…`.
    pub fn to_csv(&self) -> String {
        let n = self.params.n;
        let colors = n + 1;
        let mut out = String::new();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("t_prime".into());
        header.extend((1..=n).map(|i| format!("x{i}_prime")));
        header.push("d_hyp".into());
        header.push("d_tree".into());
        header.extend((0..colors).map(|c| format!("color{c}")));
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.samples {
            let mut row = vec![s.z.t.to_string()];
            row.extend(s.z.x.iter().map(f64::to_string));
            row.push(s.w.t.to_string());
            row.extend(s.w.x.iter().map(f64::to_string));
            row.push(s.d_hyp.to_string());
            row.push(s.d_tree.to_string());
            row.extend(s.per_color.iter().map(u64::to_string));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Measures both distances for every pair. The fit is left empty.
pub fn evaluate_pairs(
    params: &Params,
    pairs: &[(HoroPoint, HoroPoint)],
    opts: &EvalOptions,
) -> Result<DistortionReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidPlan("no pairs to evaluate".into()));
    }
    let started = Instant::now();
    let samples = pairs
        .par_iter()
        .enumerate()
        .map(|(index, (z, w))| {
            evaluate_one(params, z, w, opts).map_err(|e| Error::Pair {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistortionReport {
        params: params.spec(),
        plan: None,
        norm: opts.norm,
        samples,
        fit: None,
        violations: 0,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

fn evaluate_one(params: &Params, z: &HoroPoint, w: &HoroPoint, opts: &EvalOptions) -> Result<Sample> {
    let d_hyp = hyp_distance(params, z, w)?;
    let ez = embed_with(params, z, opts.level_rule)?;
    let ew = embed_with(params, w, opts.level_rule)?;
    let per_color = color_distances(params, &ez, &ew, opts.scan_cap)?;
    Ok(Sample {
        z: z.clone(),
        w: w.clone(),
        d_hyp,
        d_tree: opts.norm.combine(&per_color),
        per_color,
    })
}

pub fn default_m_grid() -> Vec<f64> {
    (0..=50).map(f64::from).collect()
}

fn fitting_set(samples: &[Sample]) -> impl Iterator<Item = &Sample> {
    samples.iter().filter(|s| s.d_hyp >= SMALL_PAIR_CUTOFF)
}

/// Smallest `l` that satisfies both inequalities on the fitting set for the
/// additive constant `m`, or `None` when no `l` does (a pair with
/// `d_tree = 0` and `d_hyp > m`). Not clamped to 1.
pub fn required_l(samples: &[Sample], m: f64) -> Option<f64> {
    let mut l: f64 = 0.0;
    for s in fitting_set(samples) {
        l = l.max((s.d_tree - m) / s.d_hyp);
        if s.d_tree > 0.0 {
            l = l.max((s.d_hyp - m) / s.d_tree);
        } else if s.d_hyp > m {
            return None;
        }
    }
    Some(l)
}

/// Fits `(l, m)`: for each `m` in the grid the smallest admissible `l ≥ 1`,
/// then the pair with the smallest `l`, ties to the smaller `m`.
///
/// If no grid value admits a finite `l`, the fit is `l = ∞` at the largest
/// `m`.
pub fn fit_qi_constants(mut report: DistortionReport, m_grid: &[f64]) -> Result<DistortionReport> {
    if fitting_set(&report.samples).next().is_none() {
        return Err(Error::DegenerateSample);
    }
    if m_grid.is_empty() {
        return Err(Error::InvalidPlan("empty m grid".into()));
    }
    let mut best: Option<Fit> = None;
    for &m in m_grid {
        let Some(l) = required_l(&report.samples, m) else {
            continue;
        };
        let l = l.max(1.0);
        let better = match best {
            None => true,
            Some(b) => l < b.l || (l == b.l && m < b.m),
        };
        if better {
            best = Some(Fit { l, m });
        }
    }
    let fit = best.unwrap_or(Fit {
        l: f64::INFINITY,
        m: m_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    report.violations = count_violations(&report.samples, fit);
    report.fit = Some(fit);
    Ok(report)
}

/// Pairs in the fitting set breaking either inequality for `fit`.
pub fn count_violations(samples: &[Sample], fit: Fit) -> usize {
    fitting_set(samples)
        .filter(|s| s.d_tree > fit.l * s.d_hyp + fit.m || s.d_hyp > fit.l * s.d_tree + fit.m)
        .count()
}

/// Number of samples the fit is computed on.
pub fn fitting_count(samples: &[Sample]) -> usize {
    fitting_set(samples).count()
}

/// Samples, evaluates and fits in one go.
pub fn run_pipeline(
    params: &Params,
    plan: &SamplePlan,
    opts: &EvalOptions,
    m_grid: &[f64],
) -> Result<DistortionReport> {
    let started = Instant::now();
    let pairs = sample_pairs(params, plan)?;
    let mut report = evaluate_pairs(params, &pairs, opts)?;
    report.plan = Some(*plan);
    let mut report = fit_qi_constants(report, m_grid)?;
    report.runtime_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerticalWitness {
    pub t: f64,
    pub t_prime: f64,
    pub x: Vec<f64>,
    pub bound: f64,
    pub per_color: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: usize,
    pub witnesses: Vec<VerticalWitness>,
    pub passed: bool,
}

/// For vertical pairs `(k, x)`, `(k', x)` the largest per-color tree
/// distance must be at least `(|k' − k| + 1)/(n + 1) − 1`: some color has
/// cubes containing `x` on at least that share of the `|k' − k| + 1`
/// horospheres crossed, and each of them is a separate ancestor.
pub fn vertical_bound_check(params: &Params, count: usize, seed: u64) -> Result<CheckReport> {
    let plan = SamplePlan {
        region: Region::default_for(params),
        count,
        strategy: Strategy::Vertical,
        seed,
    };
    vertical_bound_check_with(params, &plan, &EvalOptions::default())
}

pub fn vertical_bound_check_with(
    params: &Params,
    plan: &SamplePlan,
    opts: &EvalOptions,
) -> Result<CheckReport> {
    let mut plan = *plan;
    plan.strategy = Strategy::Vertical;
    let pairs = sample_pairs(params, &plan)?;
    let report = evaluate_pairs(params, &pairs, opts)?;
    let colors = params.colors() as f64;
    let witnesses: Vec<VerticalWitness> = report
        .samples
        .into_iter()
        .filter_map(|s| {
            let bound = ((s.w.t - s.z.t).abs() + 1.0) / colors - 1.0;
            let best = s.per_color.iter().copied().max().unwrap_or(0) as f64;
            (best < bound).then_some(VerticalWitness {
                t: s.z.t,
                t_prime: s.w.t,
                x: s.z.x,
                bound,
                per_color: s.per_color,
            })
        })
        .collect();
    Ok(CheckReport {
        checked: pairs.len(),
        failures: witnesses.len(),
        passed: witnesses.is_empty(),
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleFit {
    pub scale: f64,
    /// `l` refitted with `m` held at the anchor.
    pub fit: Fit,
    /// Unconstrained fit over the whole grid at this scale.
    pub free_fit: Fit,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    /// `m` fitted at the first scale and held fixed afterwards.
    pub anchor_m: f64,
    pub fits: Vec<ScaleFit>,
    /// Largest `(l_{i+1} − l_i)/l_i` over consecutive scales (0 for one
    /// scale).
    pub max_relative_increase: f64,
    /// Largest `|l_{i+1} − l_i|/l_i` over consecutive scales.
    pub max_relative_change: f64,
    /// Whether `l` strictly increases from each scale to the next.
    pub strictly_increasing: bool,
}

/// Runs the pipeline on `base_plan.region` scaled by each factor and
/// reports how `l` moves.
///
/// The additive constant is fitted once, at the first scale, and `l` is
/// then refitted at every scale with that `m`. Letting `m` float per scale
/// hides growth: the grid minimum of `l` sits at its floor of 1 for any map
/// once `m` exceeds the sampled distances.
pub fn stability_probe(
    params: &Params,
    base_plan: &SamplePlan,
    scales: &[f64],
    opts: &EvalOptions,
    m_grid: &[f64],
) -> Result<TrendReport> {
    if scales.is_empty() || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPlan("scales must be non-empty and increasing".into()));
    }
    let mut anchor = None;
    let mut fits = Vec::with_capacity(scales.len());
    for &scale in scales {
        let plan = SamplePlan {
            region: base_plan.region.scaled(scale),
            ..*base_plan
        };
        let report = run_pipeline(params, &plan, opts, m_grid)?;
        let free_fit = report.fit.expect("pipeline fits");
        let m = *anchor.get_or_insert(free_fit.m);
        let fit = fit_qi_constants(report.clone(), &[m])?.fit.expect("fit filled");
        fits.push(ScaleFit {
            scale,
            fit,
            free_fit,
            n_samples: report.samples.len(),
        });
    }
    let steps: Vec<f64> = fits
        .windows(2)
        .map(|w| (w[1].fit.l - w[0].fit.l) / w[0].fit.l)
        .collect();
    Ok(TrendReport {
        anchor_m: anchor.expect("at least one scale"),
        max_relative_increase: steps.iter().copied().fold(0.0, f64::max),
        max_relative_change: steps.iter().map(|s| s.abs()).fold(0.0, f64::max),
        strictly_increasing: steps.iter().all(|&s| s > 0.0),
        fits,
    })
}
