//! Statistical checkers for the model hypotheses: the exponential moment of
//! the one-cell potential supremum, the short-range-correlation gap of
//! Neumann eigenvalue events on separated boxes, and the displacement
//! events behind the perturbed-lattice independence argument.
//!
//! These are spot checks on finitely many layouts and realizations; they
//! verify, never derive, the hypotheses.

use crate::eigen;
use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, SiteBox};
use crate::hamiltonian::{assemble_region, BoundaryCondition};
use crate::numeric::{log_sum_exp, quantile_sorted, wilson_interval, Welford};
use crate::random_media::{FieldSampler, ModelSpec, RadialLaw, TrapProfile};
use crate::rng::{SeedPath, StreamTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default correlation-decay exponent for a model: `theta/2` for perturbed
/// lattices, 1 otherwise (site-wise independent models decay faster than
/// any stretched exponential; the value only scales the reference).
pub fn default_beta(spec: &ModelSpec) -> f64 {
    match spec.variant {
        crate::random_media::ModelVariant::PerturbedLattice { theta } => theta / 2.0,
        _ => 1.0,
    }
}

/// Default minimum separation: eight profile radii.
pub fn default_r0(profile: &TrapProfile) -> f64 {
    8.0 * profile.reach()
}

/// Monte Carlo estimate of `E[exp((sup over one unit cell of V)^alpha)]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// The mean on the linear scale; `+inf` when it overflows f64.
    pub estimate: f64,
    /// `log` of the mean, always finite unless a hard trap was seen.
    pub log_estimate: f64,
    /// Standard error on the linear scale; `+inf` when not representable.
    pub stderr: f64,
    /// Raised when the top decile carries more than half the sum — the
    /// sample mean is then dominated by rare huge terms and the true
    /// moment is likely divergent.
    pub tail_flag: bool,
    pub n_realizations: usize,
}

impl MomentEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Moment estimate on the native lattice (`h = 1`: the cell is one site).
pub fn moment_estimate(
    spec: &ModelSpec,
    d: usize,
    alpha: f64,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<MomentEstimate> {
    moment_estimate_with_mesh(spec, d, 1.0, alpha, n_realizations, seed)
}

/// Moment estimate with an explicit mesh: the supremum over the unit cell
/// `[0,1]^d` runs over its `ceil(1/h)^d` sites.
pub fn moment_estimate_with_mesh(
    spec: &ModelSpec,
    d: usize,
    mesh: f64,
    alpha: f64,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<MomentEstimate> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }
    if n_realizations == 0 {
        return Err(Error::invalid("need at least one realization"));
    }
    if !(mesh > 0.0 && mesh <= 1.0) {
        return Err(Error::invalid("mesh must lie in (0, 1]"));
    }
    let cells = (1.0 / mesh).ceil() as i64;
    let region = BoxRegion::new(d, cells.max(1), mesh)?;
    let cell_sites: Vec<_> = region
        .sites()
        .filter(|z| z.iter().take(d).all(|&c| (0..cells).contains(&c)))
        .collect();
    let sampler = FieldSampler::new(*spec, d)?;

    let sups: Vec<Result<f64>> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(
                &region,
                &seed.with_tag(StreamTag::Field).with_realization(i as u64),
            )?;
            let sup = cell_sites
                .iter()
                .map(|&z| field.value(z).expect("cell inside box"))
                .fold(0.0f64, f64::max);
            Ok(sup)
        })
        .collect();

    // log of each term exp(sup^alpha) is just sup^alpha
    let mut log_terms = Vec::with_capacity(n_realizations);
    for s in sups {
        log_terms.push(s?.powf(alpha));
    }
    let n = n_realizations as f64;
    let log_estimate = log_sum_exp(&log_terms) - n.ln();
    let estimate = log_estimate.exp();

    let max_term = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stderr = if max_term < 350.0 {
        let mut w = Welford::new();
        for &lt in &log_terms {
            w.push(lt.exp());
        }
        w.stderr()
    } else {
        f64::INFINITY
    };

    let mut sorted = log_terms.clone();
    sorted.sort_by(f64::total_cmp);
    let top_n = n_realizations.div_ceil(10);
    let top = &sorted[n_realizations - top_n..];
    let tail_flag = log_sum_exp(top) > log_sum_exp(&log_terms) - std::f64::consts::LN_2;

    Ok(MomentEstimate {
        estimate,
        log_estimate,
        stderr,
        tail_flag,
        n_realizations,
    })
}

/// Disjoint boxes with their claimed separation `r` (lattice units).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxLayout {
    pub boxes: Vec<SiteBox>,
    pub r: f64,
}

impl BoxLayout {
    /// Layout invariants: pairwise distance `> r`, every diameter `< r`,
    /// and `r >= r0`.
    pub fn validate(&self, r0: f64) -> Result<()> {
        if self.boxes.is_empty() {
            return Err(Error::LayoutViolation("no boxes".into()));
        }
        if !(self.r >= r0) {
            return Err(Error::LayoutViolation(format!(
                "separation r = {} is below the minimum r0 = {r0}",
                self.r
            )));
        }
        let d = self.boxes[0].d;
        for (k, b) in self.boxes.iter().enumerate() {
            if b.d != d {
                return Err(Error::LayoutViolation("mixed dimensions".into()));
            }
            if !(b.diameter() < self.r) {
                return Err(Error::LayoutViolation(format!(
                    "box {k} has diameter {} >= r = {}",
                    b.diameter(),
                    self.r
                )));
            }
        }
        for i in 0..self.boxes.len() {
            for j in i + 1..self.boxes.len() {
                let dist = self.boxes[i].distance(&self.boxes[j]);
                if !(dist > self.r) {
                    return Err(Error::LayoutViolation(format!(
                        "boxes {i} and {j} are {dist} apart, need > r = {}",
                        self.r
                    )));
                }
            }
        }
        Ok(())
    }

    fn enclosing_half_side(&self) -> i64 {
        let mut m = 1i64;
        for b in &self.boxes {
            for a in 0..b.d {
                m = m.max(b.lo[a].abs()).max(b.hi[a].abs());
            }
        }
        m + 1
    }
}

/// Estimated factorization gap `|P(all events) - P(E_1) P(rest)|` for the
/// events `E_k = {lambda_1^N(A_k) <= lambda}`, with a bootstrap confidence
/// interval on the signed gap and the reference decay `exp(-r^beta)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub layout: BoxLayout,
    pub lambda: f64,
    pub gap: f64,
    /// Equal-tail bootstrap interval for the signed gap at the stated level.
    pub ci: (f64, f64),
    pub ci_level: f64,
    pub reference: f64,
    pub beta: f64,
    pub p_joint: f64,
    pub p_first: f64,
    pub p_rest: f64,
    pub n_realizations: usize,
    pub n_bootstrap: usize,
}

impl CorrelationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const BOOTSTRAP_CI_LEVEL: f64 = 0.99;

pub fn correlation_gap(
    spec: &ModelSpec,
    layout: &BoxLayout,
    lambda: f64,
    beta: f64,
    r0: f64,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<CorrelationReport> {
    layout.validate(r0)?;
    if n_realizations < 1000 {
        return Err(Error::invalid(
            "correlation gap needs at least 1000 realizations",
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    let d = layout.boxes[0].d;
    let region = BoxRegion::lattice(d, layout.enclosing_half_side())?;
    let sampler = FieldSampler::new(*spec, d)?;
    let k = layout.boxes.len();

    let events: Vec<Result<Vec<bool>>> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(
                &region,
                &seed.with_tag(StreamTag::Field).with_realization(i as u64),
            )?;
            layout
                .boxes
                .iter()
                .map(|b| {
                    match assemble_region(&field, b, BoundaryCondition::Neumann, spec.kappa) {
                        Ok(h) => Ok(eigen::principal_eigenpair(
                            &h,
                            eigen::DEFAULT_TOL,
                            eigen::default_max_iter(h.dim()),
                        )?
                        .value
                            <= lambda),
                        Err(Error::FullyTrapped) => Ok(false),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect();

    let mut joint = Vec::with_capacity(n_realizations);
    let mut first = Vec::with_capacity(n_realizations);
    let mut rest = Vec::with_capacity(n_realizations);
    for e in events {
        let e = e?;
        joint.push(e.iter().all(|&b| b));
        first.push(e[0]);
        rest.push(e[1..k].iter().all(|&b| b));
    }
    let mean = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64 / v.len() as f64;
    let p_joint = mean(&joint);
    let p_first = mean(&first);
    let p_rest = mean(&rest);
    let delta = p_joint - p_first * p_rest;

    // bootstrap over realizations, own stream
    let mut bs = seed.with_tag(StreamTag::Bootstrap).stream();
    let mut deltas = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut cj = 0u64;
        let mut cf = 0u64;
        let mut cr = 0u64;
        for _ in 0..n_realizations {
            let idx = bs.below(n_realizations as u64) as usize;
            cj += joint[idx] as u64;
            cf += first[idx] as u64;
            cr += rest[idx] as u64;
        }
        let n = n_realizations as f64;
        deltas.push(cj as f64 / n - (cf as f64 / n) * (cr as f64 / n));
    }
    deltas.sort_by(f64::total_cmp);
    let tail = (1.0 - BOOTSTRAP_CI_LEVEL) / 2.0;
    let ci = (
        quantile_sorted(&deltas, tail),
        quantile_sorted(&deltas, 1.0 - tail),
    );

    Ok(CorrelationReport {
        layout: layout.clone(),
        lambda,
        gap: delta.abs(),
        ci,
        ci_level: BOOTSTRAP_CI_LEVEL,
        reference: (-layout.r.powf(beta)).exp(),
        beta,
        p_joint,
        p_first,
        p_rest,
        n_realizations,
        n_bootstrap: BOOTSTRAP_RESAMPLES,
    })
}

/// Continuum distance from a point to the site rectangle of a box.
fn point_box_distance(p: [f64; 3], b: &SiteBox) -> f64 {
    let mut s = 0.0;
    for a in 0..b.d {
        let lo = b.lo[a] as f64;
        let hi = (b.hi[a] - 1) as f64;
        let gap = if p[a] < lo {
            lo - p[a]
        } else if p[a] > hi {
            p[a] - hi
        } else {
            0.0
        };
        s += gap * gap;
    }
    s.sqrt()
}

/// One draw's event evaluation, separated out so degenerate displacement
/// patterns can be checked directly.
///
/// Returns `(E1 violated, E2 violated, far part of E2 violated)` where
/// E1 requires every lattice point within `r/2` of the box to land within
/// `3r/4`, and E2 requires every point at distance `>= r/2` to stay at
/// distance `>= r/4`.
pub fn event_violations(
    a1: &SiteBox,
    r: f64,
    points: &[[i64; 3]],
    displacements: &[[f64; 3]],
) -> (bool, bool, bool) {
    let d = a1.d;
    let mut center = [0.0f64; 3];
    for a in 0..d {
        center[a] = (a1.lo[a] + a1.hi[a] - 1) as f64 / 2.0;
    }
    let mut e1 = false;
    let mut e2 = false;
    let mut far = false;
    for (q, w) in points.iter().zip(displacements) {
        let dist_q = a1.distance_to_point(*q);
        let mut landed = [0.0f64; 3];
        let mut from_center = 0.0;
        for a in 0..d {
            landed[a] = q[a] as f64 + w[a];
            let dc = q[a] as f64 - center[a];
            from_center += dc * dc;
        }
        let dist_landed = point_box_distance(landed, a1);
        if dist_q <= r / 2.0 && dist_landed > 3.0 * r / 4.0 {
            e1 = true;
        }
        if dist_q >= r / 2.0 && dist_landed < r / 4.0 {
            e2 = true;
            if from_center.sqrt() > r {
                far = true;
            }
        }
    }
    (e1, e2, far)
}

/// Monte Carlo rates of the two displacement events behind the
/// perturbed-lattice independence argument, with their analytic envelopes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisplacementEventRates {
    pub theta: f64,
    pub r: f64,
    pub e1_violation: f64,
    pub e1_ci: (f64, f64),
    pub e2_violation: f64,
    pub e2_ci: (f64, f64),
    pub far_violation: f64,
    pub far_ci: (f64, f64),
    /// Exact union bound for E1: (points within r/2) * P(|w| >= r/4).
    pub e1_union_bound: f64,
    /// The analytic envelope `N(d,theta) r^d exp(-(r/8)^theta)`.
    pub envelope: f64,
    /// Lattice sum `sum_{|q|>r} exp(-(|q|/4)^theta)` bounding the far part.
    pub far_envelope: f64,
    pub n_draws: usize,
}

impl DisplacementEventRates {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

pub fn displacement_event_rates(
    theta: f64,
    a1: &SiteBox,
    r: f64,
    n_draws: usize,
    seed: &SeedPath,
) -> Result<DisplacementEventRates> {
    if !(r > 0.0) {
        return Err(Error::invalid("r must be positive"));
    }
    if !(a1.diameter() < r) {
        return Err(Error::invalid("the box diameter must be below r"));
    }
    if n_draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    let d = a1.d;
    let law = RadialLaw::build(d, theta, 1e-10)?;

    // lattice points that can matter: farther ones reach within r/4 of the
    // box only through a displacement in the law's negligible tail
    let reach = r + law.quantile(1.0 - 1e-12) + 2.0;
    let range = reach.ceil() as i64;
    let mut points = Vec::new();
    let mut cube_lo = [0i64; 3];
    let mut cube_hi = [0i64; 3];
    for a in 0..d {
        cube_lo[a] = a1.lo[a] - range;
        cube_hi[a] = a1.hi[a] + range;
    }
    let scan = SiteBox::new(d, cube_lo, cube_hi)?;
    for q in scan.sites() {
        if a1.distance_to_point(q) <= reach {
            points.push(q);
        }
    }

    let seed = seed.with_tag(StreamTag::Displacement);
    let results: Vec<(bool, bool, bool)> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let draw_seed = seed.with_realization(i as u64);
            let displacements: Vec<[f64; 3]> = points
                .iter()
                .map(|q| {
                    let mut s = draw_seed.keyed_stream(&q[..d]);
                    let radius = law.quantile(s.open01());
                    let dir = s.unit_vector(d);
                    [radius * dir[0], radius * dir[1], radius * dir[2]]
                })
                .collect();
            event_violations(a1, r, &points, &displacements)
        })
        .collect();

    let count = |f: &dyn Fn(&(bool, bool, bool)) -> bool| results.iter().filter(|t| f(t)).count() as u64;
    let c1 = count(&|t| t.0);
    let c2 = count(&|t| t.1);
    let cf = count(&|t| t.2);
    let n = n_draws as f64;

    let near = points
        .iter()
        .filter(|&&q| a1.distance_to_point(q) <= r / 2.0)
        .count() as f64;
    let e1_union_bound = (near * law.tail(r / 4.0)).min(1.0);
    let envelope = law.normalizing_constant() * r.powi(d as i32) * (-(r / 8.0).powf(theta)).exp();

    // far envelope: lattice sum of exp(-(|q|/4)^theta) over |q| > r
    let cut = (4.0 * (45.0f64).powf(1.0 / theta) + r).ceil() as i64;
    let mut far_envelope = 0.0;
    let far_box = SiteBox::new(
        d,
        [-cut, -cut * (d > 1) as i64, -cut * (d > 2) as i64],
        [cut + 1, (cut * (d > 1) as i64) + 1, (cut * (d > 2) as i64) + 1],
    )?;
    for q in far_box.sites() {
        let norm: f64 = (0..d).map(|a| (q[a] * q[a]) as f64).sum::<f64>().sqrt();
        if norm > r {
            far_envelope += (-(norm / 4.0).powf(theta)).exp();
        }
    }

    Ok(DisplacementEventRates {
        theta,
        r,
        e1_violation: c1 as f64 / n,
        e1_ci: wilson_interval(c1, n_draws as u64, 1.96),
        e2_violation: c2 as f64 / n,
        e2_ci: wilson_interval(c2, n_draws as u64, 1.96),
        far_violation: cf as f64 / n,
        far_ci: wilson_interval(cf, n_draws as u64, 1.96),
        e1_union_bound,
        envelope,
        far_envelope,
        n_draws,
    })
}
