//! Quenched survival probability of the killed walk, three ways:
//!
//! * `exact_survival_dirichlet` — eigen-expansion of the Dirichlet operator
//!   on a sub-box; exactly the survival of the walk killed by `V` *and* on
//!   exiting the sub-box, hence a certified lower bound;
//! * `mc_survival` — Feynman-Kac Monte Carlo over continuous-time simple
//!   random walks with exact exponential clocks (no time discretization);
//! * `spectral_upper_bound` — `sqrt(n) exp(-lambda_1^D t)` plus the exact
//!   free-walk exit probability of the box, a certified upper bound.
//!
//! `quenched_curve` runs all three on one fixed realization over a time
//! grid; `scaling_check` regresses the log-corrected decay exponent.

use crate::eigen;
use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, Coord, SiteBox};
use crate::hamiltonian::{assemble_region, BoundaryCondition};
use crate::ids::{asymptotic_inverse, RateFunction};
use crate::numeric::{linear_least_squares, wilson_interval, Welford};
use crate::random_media::{FieldSampler, ModelSpec, PotentialField};
use crate::rng::{SeedPath, Stream, StreamTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// What happens when a walk steps outside the stored field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallPolicy {
    /// The walk dies at the wall (matches the Dirichlet box expansion).
    Absorbing,
    /// Leaving the box is an error: the field must cover the walk's range.
    Strict,
}

/// One sampled continuous-time walk with its Feynman-Kac weight.
#[derive(Debug, Clone)]
pub struct WalkPath {
    /// Sites visited, starting point first.
    pub sites: Vec<Coord>,
    /// Time spent at each visited site (clipped at the horizon).
    pub holding_times: Vec<f64>,
    /// Accumulated `int_0^t V(X_s) ds`; infinite after a hard-trap visit.
    pub potential_integral: f64,
    /// True when the walk reached the horizon without absorption.
    pub survived_walls: bool,
}

impl WalkPath {
    /// `exp(-potential_integral)`, zeroed for wall-absorbed paths.
    pub fn weight(&self) -> f64 {
        if self.survived_walls {
            (-self.potential_integral).exp()
        } else {
            0.0
        }
    }
}

/// Simulate one walk, recording the trajectory.
pub fn simulate_path(
    field: &PotentialField,
    kappa: f64,
    t: f64,
    x: Coord,
    stream: &mut Stream,
    walls: WallPolicy,
) -> Result<WalkPath> {
    let region = *field.region();
    let d = region.d;
    if !region.contains(x) {
        return Err(Error::invalid("start site is outside the field's box"));
    }
    let rate = 2.0 * d as f64 * kappa;
    let mut path = WalkPath {
        sites: vec![x],
        holding_times: Vec::new(),
        potential_integral: 0.0,
        survived_walls: true,
    };
    let mut pos = x;
    let mut time = 0.0;
    loop {
        let v = field.value(pos).expect("walk stays inside the box");
        let tau = stream.exp(rate);
        let dwell = tau.min(t - time);
        path.holding_times.push(dwell);
        if dwell > 0.0 {
            if v.is_infinite() {
                path.potential_integral = f64::INFINITY;
                return Ok(path);
            }
            path.potential_integral += v * dwell;
        }
        time += tau;
        if time >= t {
            return Ok(path);
        }
        let dir = stream.below(2 * d as u64) as usize;
        let mut next = pos;
        next[dir / 2] += if dir.is_multiple_of(2) { 1 } else { -1 };
        if !region.contains(next) {
            match walls {
                WallPolicy::Absorbing => {
                    path.survived_walls = false;
                    return Ok(path);
                }
                WallPolicy::Strict => {
                    return Err(Error::WalkLeftBox {
                        time,
                        needed_half_side: region.half_side * 2,
                    })
                }
            }
        }
        pos = next;
        path.sites.push(pos);
    }
}

/// Weight of one walk without storing the trajectory.
fn path_weight(
    field: &PotentialField,
    kappa: f64,
    t: f64,
    x: Coord,
    stream: &mut Stream,
    walls: WallPolicy,
) -> Result<f64> {
    let region = field.region();
    let d = region.d;
    let rate = 2.0 * d as f64 * kappa;
    let mut pos = x;
    let mut acc = 0.0f64;
    let mut time = 0.0f64;
    loop {
        let v = field.value(pos).expect("walk stays inside the box");
        let tau = stream.exp(rate);
        let dwell = tau.min(t - time);
        if dwell > 0.0 {
            if v.is_infinite() {
                return Ok(0.0);
            }
            acc += v * dwell;
        }
        time += tau;
        if time >= t {
            return Ok((-acc).exp());
        }
        let dir = stream.below(2 * d as u64) as usize;
        let mut next = pos;
        next[dir / 2] += if dir.is_multiple_of(2) { 1 } else { -1 };
        if !region.contains(next) {
            match walls {
                WallPolicy::Absorbing => return Ok(0.0),
                WallPolicy::Strict => {
                    return Err(Error::WalkLeftBox {
                        time,
                        needed_half_side: region.half_side * 2,
                    })
                }
            }
        }
        pos = next;
    }
}

const PATH_BLOCK: usize = 1 << 14;

/// Feynman-Kac Monte Carlo estimate of the survival probability with its
/// standard error. Paths are keyed individually by `(block, index)`, so the
/// same seed at a larger horizon replays each path's prefix: estimates are
/// pathwise-coupled across `t` and exactly nonincreasing.
pub fn mc_survival(
    field: &PotentialField,
    kappa: f64,
    t: f64,
    x: Coord,
    n_paths: usize,
    seed: &SeedPath,
    walls: WallPolicy,
) -> Result<(f64, f64)> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa must be positive"));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid("time must be nonnegative"));
    }
    if n_paths == 0 {
        return Err(Error::invalid("need at least one path"));
    }
    if !field.region().contains(x) {
        return Err(Error::invalid("start site is outside the field's box"));
    }
    let seed = seed.with_tag(StreamTag::Walk);
    let n_blocks = n_paths.div_ceil(PATH_BLOCK);
    let blocks: Vec<Result<Welford>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * PATH_BLOCK;
            let hi = ((b + 1) * PATH_BLOCK).min(n_paths);
            let mut acc = Welford::new();
            for i in lo..hi {
                let mut stream = seed.keyed_stream(&[b as i64, i as i64]);
                acc.push(path_weight(field, kappa, t, x, &mut stream, walls)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = Welford::new();
    for b in blocks {
        total.merge(&b?);
    }
    Ok((total.mean, total.stderr()))
}

/// Eigen-expansion survival on a sub-box with Dirichlet walls:
/// `sum_k exp(-lambda_k t) phi_k(x) <phi_k, 1>`. This is exactly the
/// survival of the walk killed by `V` and on exiting `sub_box`, hence a
/// certified lower bound for the survival on any larger region.
pub fn exact_survival_dirichlet(
    field: &PotentialField,
    kappa: f64,
    sub_box: &SiteBox,
    t: f64,
    x: Coord,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid("time must be nonnegative"));
    }
    if !sub_box.contains(x) {
        return Err(Error::invalid("start site is outside the sub-box"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let h = match assemble_region(field, sub_box, BoundaryCondition::Dirichlet, kappa) {
        Ok(h) => h,
        // everything trapped: the walk dies immediately
        Err(Error::FullyTrapped) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let xi = match h.index_of_site(x) {
        Some(i) => i,
        None => return Ok(0.0), // hard-trapped start
    };
    if h.dim() > eigen::FULL_LIMIT {
        return Err(Error::invalid(format!(
            "sub-box has {} active sites; the eigen-expansion is capped at {}",
            h.dim(),
            eigen::FULL_LIMIT
        )));
    }
    let spec = eigen::full_spectrum(&h)?;
    let overlaps = spec.overlaps_with_ones();
    let mut u = 0.0;
    for (k, &lam) in spec.values.iter().enumerate() {
        u += (-lam * t).exp() * spec.vectors[(xi, k)] * overlaps[k];
    }
    Ok(u.clamp(0.0, 1.0))
}

/// In-box survival of the free 1D walk on `n` sites with Dirichlet walls,
/// started from site index `j`, by the closed-form sine expansion.
pub fn free_dirichlet_survival_1d(n: usize, kappa: f64, t: f64, j: usize) -> f64 {
    assert!(j < n);
    let nf = n as f64 + 1.0;
    let norm = 2.0 / nf;
    let mut u = 0.0;
    for k in 1..=n {
        let kf = k as f64 * std::f64::consts::PI / nf;
        let lam = 2.0 * kappa * (1.0 - kf.cos());
        let phi_j = ((j as f64 + 1.0) * kf).sin();
        let sum: f64 = (1..=n).map(|i| (i as f64 * kf).sin()).sum();
        u += (-lam * t).exp() * norm * phi_j * sum;
    }
    u.clamp(0.0, 1.0)
}

/// Probability that the free walk started at `x` stays inside `big_box` up
/// to time `t`; coordinates are independent in continuous time, so this is
/// a product of 1D factors.
pub fn free_box_survival(big_box: &SiteBox, kappa: f64, t: f64, x: Coord) -> Result<f64> {
    if !big_box.contains(x) {
        return Err(Error::invalid("start site is outside the box"));
    }
    let mut s = 1.0;
    for a in 0..big_box.d {
        let n = big_box.extent(a) as usize;
        let j = (x[a] - big_box.lo[a]) as usize;
        s *= free_dirichlet_survival_1d(n, kappa, t, j);
    }
    Ok(s)
}

/// Certified upper bound for the survival probability:
/// `sqrt(active sites) * exp(-lambda_1^D(big_box) t)` (Cauchy-Schwarz on the
/// eigen-expansion) plus the exact exit probability of the free walk.
pub fn spectral_upper_bound(
    field: &PotentialField,
    kappa: f64,
    big_box: &SiteBox,
    t: f64,
    x: Coord,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid("time must be nonnegative"));
    }
    if !big_box.contains(x) {
        return Err(Error::invalid("start site is outside the box"));
    }
    let exit_prob = 1.0 - free_box_survival(big_box, kappa, t, x)?;
    let in_box = match assemble_region(field, big_box, BoundaryCondition::Dirichlet, kappa) {
        Ok(h) => {
            let pair =
                eigen::principal_eigenpair(&h, eigen::DEFAULT_TOL, eigen::default_max_iter(h.dim()))?;
            (h.dim() as f64).sqrt() * (-pair.value * t).exp()
        }
        Err(Error::FullyTrapped) => 0.0,
        Err(e) => return Err(e),
    };
    Ok((in_box + exit_prob).min(1.0))
}

/// Minimizer of the Neumann principal eigenvalue over a grid of disjoint
/// cells inside `big_box`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestSubbox {
    pub cell_index: usize,
    pub cell: SiteBox,
    pub lambda_neumann: f64,
    pub lambda_dirichlet: f64,
    pub cells_scanned: usize,
}

/// Scan the grid of disjoint `side`-cells laid out with the given stride
/// (`stride >= side`), returning the cell with the smallest Neumann
/// principal eigenvalue and its Dirichlet eigenvalue. Ties keep the lowest
/// cell index.
pub fn best_subbox_scan(
    field: &PotentialField,
    big_box: &SiteBox,
    side: i64,
    stride: i64,
    kappa: f64,
) -> Result<BestSubbox> {
    if side < 1 {
        return Err(Error::invalid("cell side must be at least 1"));
    }
    if stride < side {
        return Err(Error::invalid("stride must be at least the cell side (disjoint grid)"));
    }
    let d = big_box.d;
    let mut counts = [1usize; 3];
    for a in 0..d {
        let extent = big_box.extent(a);
        if extent < side {
            return Err(Error::invalid("cell does not fit inside the box"));
        }
        counts[a] = ((extent - side) / stride + 1) as usize;
    }
    let total: usize = counts[..d].iter().product();

    let mut best: Option<(usize, SiteBox, f64)> = None;
    for cell_index in 0..total {
        let mut rem = cell_index;
        let mut lo = [0i64; 3];
        for a in (0..d).rev() {
            lo[a] = big_box.lo[a] + (rem % counts[a]) as i64 * stride;
            rem /= counts[a];
        }
        let cell = SiteBox::cube(d, lo, side)?;
        let lam_n = match assemble_region(field, &cell, BoundaryCondition::Neumann, kappa) {
            Ok(h) => {
                eigen::principal_eigenpair(&h, eigen::DEFAULT_TOL, eigen::default_max_iter(h.dim()))?
                    .value
            }
            Err(Error::FullyTrapped) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((_, _, current)) => lam_n < *current,
        };
        if better {
            best = Some((cell_index, cell, lam_n));
        }
    }
    let (cell_index, cell, lambda_neumann) =
        best.ok_or_else(|| Error::invalid("cell grid is empty"))?;
    if lambda_neumann.is_infinite() {
        return Err(Error::invalid("every scanned cell is fully trapped"));
    }
    let h_d = assemble_region(field, &cell, BoundaryCondition::Dirichlet, kappa)?;
    let lambda_dirichlet =
        eigen::principal_eigenpair(&h_d, eigen::DEFAULT_TOL, eigen::default_max_iter(h_d.dim()))?
            .value;
    Ok(BestSubbox {
        cell_index,
        cell,
        lambda_neumann,
        lambda_dirichlet,
        cells_scanned: total,
    })
}

/// Per-point completion state of a survival curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointStatus {
    Ok,
    /// Skipped because the budget ran out before this point.
    Budget,
}

impl std::fmt::Display for PointStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointStatus::Ok => write!(f, "ok"),
            PointStatus::Budget => write!(f, "budget"),
        }
    }
}

/// Survival estimates over a time grid for one fixed realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub t_grid: Vec<f64>,
    pub mc_estimate: Vec<f64>,
    pub mc_stderr: Vec<f64>,
    pub certified_lower: Vec<f64>,
    pub spectral_upper: Vec<f64>,
    pub status: Vec<PointStatus>,
    pub model: Option<ModelSpec>,
    pub seed: Option<SeedPath>,
    pub start: Coord,
    pub d: usize,
}

impl SurvivalCurve {
    /// Wrap a synthetic curve (analysis helpers only look at `mc_estimate`).
    pub fn synthetic(t_grid: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if t_grid.len() != u.len() {
            return Err(Error::invalid("grids must have equal length"));
        }
        let n = t_grid.len();
        Ok(SurvivalCurve {
            t_grid,
            mc_estimate: u,
            mc_stderr: vec![0.0; n],
            certified_lower: vec![0.0; n],
            spectral_upper: vec![1.0; n],
            status: vec![PointStatus::Ok; n],
            model: None,
            seed: None,
            start: [0, 0, 0],
            d: 1,
        })
    }

    /// CSV columns: `t,mc,mc_stderr,lower,upper,status`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,mc,mc_stderr,lower,upper,status")?;
        for i in 0..self.t_grid.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.t_grid[i],
                self.mc_estimate[i],
                self.mc_stderr[i],
                self.certified_lower[i],
                self.spectral_upper[i],
                self.status[i]
            )?;
        }
        Ok(())
    }
}

/// Resource limits for a quenched curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Budget {
    pub paths_per_t: usize,
    pub wall_seconds: Option<f64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            paths_per_t: 10_000,
            wall_seconds: None,
        }
    }
}

/// Half-side of the generation box for horizon `t`: covers the walk range
/// (four standard deviations of the displacement plus a safety margin) and
/// the `(-t, t)^d` spectral box.
pub fn generation_half_side(spec: &ModelSpec, d: usize, t: f64) -> i64 {
    let walk = (4.0 * (2.0 * d as f64 * spec.kappa * t).sqrt()).max(spec.profile.reach()) + 16.0;
    (walk.ceil() as i64).max(t.ceil() as i64).max(4)
}

/// All three survival estimates on one fixed realization (`seed` pins the
/// quenched field; the same sites reappear identically as the box grows
/// with `t`).
pub fn quenched_curve(
    spec: &ModelSpec,
    d: usize,
    seed: &SeedPath,
    x: Coord,
    t_grid: &[f64],
    budget: &Budget,
) -> Result<SurvivalCurve> {
    if t_grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("time grid must increase strictly"));
        }
    }
    if !(t_grid[0] > 0.0) {
        return Err(Error::invalid("times must be positive"));
    }
    if budget.paths_per_t == 0 {
        return Err(Error::invalid("budget allows zero paths"));
    }
    let sampler = FieldSampler::new(*spec, d)?;
    let start = std::time::Instant::now();

    let n = t_grid.len();
    let mut curve = SurvivalCurve {
        t_grid: t_grid.to_vec(),
        mc_estimate: vec![f64::NAN; n],
        mc_stderr: vec![f64::NAN; n],
        certified_lower: vec![f64::NAN; n],
        spectral_upper: vec![f64::NAN; n],
        status: vec![PointStatus::Budget; n],
        model: Some(*spec),
        seed: Some(*seed),
        start: x,
        d,
    };

    for (i, &t) in t_grid.iter().enumerate() {
        if let Some(limit) = budget.wall_seconds {
            if start.elapsed().as_secs_f64() > limit {
                break; // remaining points stay flagged
            }
        }
        let r_gen = generation_half_side(spec, d, t);
        if x.iter().take(d).any(|&c| c.abs() >= r_gen) {
            return Err(Error::invalid("start site must lie inside the generation box"));
        }
        let region = BoxRegion::lattice(d, r_gen)?;
        let field = sampler.sample(&region, &seed.with_tag(StreamTag::Field))?;

        let (mc, mc_err) = mc_survival(
            &field,
            spec.kappa,
            t,
            x,
            budget.paths_per_t,
            seed,
            WallPolicy::Strict,
        )?;

        // largest dense-feasible box centered on the start site
        let cap = match d {
            1 => 256,
            2 => 10,
            _ => 4,
        };
        let half = cap.min(r_gen);
        let mut low_box = SiteBox::centered(d, x, half)?;
        clamp_into(&mut low_box, &region.site_box());
        let lower = exact_survival_dirichlet(&field, spec.kappa, &low_box, t, x)?;

        let r_spec = (t.ceil() as i64).max(4).min(r_gen);
        let mut spec_box = SiteBox::centered(d, [0, 0, 0], r_spec)?;
        clamp_into(&mut spec_box, &region.site_box());
        if !spec_box.contains(x) {
            spec_box = region.site_box();
        }
        let upper = spectral_upper_bound(&field, spec.kappa, &spec_box, t, x)?;

        curve.mc_estimate[i] = mc;
        curve.mc_stderr[i] = mc_err;
        curve.certified_lower[i] = lower;
        curve.spectral_upper[i] = upper;
        curve.status[i] = PointStatus::Ok;
    }
    Ok(curve)
}

fn clamp_into(inner: &mut SiteBox, outer: &SiteBox) {
    for a in 0..inner.d {
        inner.lo[a] = inner.lo[a].max(outer.lo[a]);
        inner.hi[a] = inner.hi[a].min(outer.hi[a]);
    }
}

/// Slope of `log(t / -log u)` against `log log t`; under a decay law
/// `log u = -t / (log t)^s` the slope estimates `s`, and `1/L` is the
/// prediction for a Lifshitz index `L`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub slope: f64,
    pub stderr: f64,
    pub predicted_slope: f64,
    pub n_points: usize,
}

impl ScalingCheck {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

pub fn scaling_check(curve: &SurvivalCurve, index: f64) -> Result<ScalingCheck> {
    if !(index > 0.0) {
        return Err(Error::invalid("index must be positive"));
    }
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for i in 0..curve.t_grid.len() {
        if curve.status[i] != PointStatus::Ok {
            continue;
        }
        let t = curve.t_grid[i];
        let u = curve.mc_estimate[i];
        if !(t > 1.0) {
            return Err(Error::invalid("scaling needs t > 1"));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::OutOfDomain {
                value: t,
                reason: format!("survival {u} at t = {t} gives a nonpositive -log u"),
            });
        }
        rows.push(vec![1.0, t.ln().ln()]);
        ys.push((t / -u.ln()).ln());
    }
    if rows.len() < 4 {
        return Err(Error::invalid(format!(
            "scaling needs at least 4 usable points, got {}",
            rows.len()
        )));
    }
    let fit = linear_least_squares(&rows, &ys, None)?;
    Ok(ScalingCheck {
        slope: fit.coefficients[1],
        stderr: fit.stderr[1],
        predicted_slope: 1.0 / index,
        n_points: rows.len(),
    })
}

/// Monte Carlo estimate of `P(lambda_1^D((-t,t)^d) <= (1-eps)/psi(d log t))`
/// — the summable probability behind the almost-sure eigenvalue lower bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailProbability {
    pub t: f64,
    pub threshold: f64,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub ci: (f64, f64),
    pub n_realizations: usize,
}

pub fn eigenvalue_tail_probability(
    spec: &ModelSpec,
    d: usize,
    t: f64,
    eps: f64,
    phi: &RateFunction,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<TailProbability> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if !(t > 1.0) {
        return Err(Error::invalid("need t > 1"));
    }
    if n_realizations == 0 {
        return Err(Error::invalid("need at least one realization"));
    }
    let psi = asymptotic_inverse(phi, d as f64 * t.ln(), 1e-10)?;
    let threshold = (1.0 - eps) / psi;
    let region = BoxRegion::lattice(d, (t.ceil() as i64).max(1))?;
    let sampler = FieldSampler::new(*spec, d)?;
    let hits: Vec<Result<bool>> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(
                &region,
                &seed.with_tag(StreamTag::Field).with_realization(i as u64),
            )?;
            match assemble_region(&field, &region.site_box(), BoundaryCondition::Dirichlet, spec.kappa)
            {
                Ok(h) => {
                    let lam = eigen::principal_eigenpair(
                        &h,
                        eigen::DEFAULT_TOL,
                        eigen::default_max_iter(h.dim()),
                    )?
                    .value;
                    Ok(lam <= threshold)
                }
                Err(Error::FullyTrapped) => Ok(false),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut count = 0u64;
    for h in hits {
        count += h? as u64;
    }
    let p_hat = count as f64 / n_realizations as f64;
    Ok(TailProbability {
        t,
        threshold,
        p_hat,
        ci: wilson_interval(count, n_realizations as u64, 1.96),
        n_realizations,
    })
}

/// Frequency, per horizon, of realizations whose potential supremum over
/// `(-t, t)^d` exceeds `(3 d log t)^(1/alpha)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupPotentialScan {
    pub t_grid: Vec<f64>,
    pub bound: Vec<f64>,
    pub violation_frequency: Vec<f64>,
    pub n_realizations: usize,
}

pub fn sup_potential_scan(
    spec: &ModelSpec,
    d: usize,
    t_grid: &[f64],
    alpha: f64,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<SupPotentialScan> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }
    if t_grid.iter().any(|&t| !(t > 1.0)) {
        return Err(Error::invalid("horizons must exceed 1"));
    }
    if n_realizations == 0 {
        return Err(Error::invalid("need at least one realization"));
    }
    let sampler = FieldSampler::new(*spec, d)?;
    let mut bounds = Vec::with_capacity(t_grid.len());
    let mut freqs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let bound = (3.0 * d as f64 * t.ln()).powf(1.0 / alpha);
        let region = BoxRegion::lattice(d, (t.ceil() as i64).max(1))?;
        let sups: Vec<Result<f64>> = (0..n_realizations)
            .into_par_iter()
            .map(|i| {
                // realizations keyed by index only: the same omega is
                // examined on the growing box, the quenched reading
                let field = sampler.sample(
                    &region,
                    &seed.with_tag(StreamTag::Field).with_realization(i as u64),
                )?;
                Ok(field.sup())
            })
            .collect();
        let mut violations = 0usize;
        for s in sups {
            if s? > bound {
                violations += 1;
            }
        }
        bounds.push(bound);
        freqs.push(violations as f64 / n_realizations as f64);
    }
    Ok(SupPotentialScan {
        t_grid: t_grid.to_vec(),
        bound: bounds,
        violation_frequency: freqs,
        n_realizations,
    })
}
