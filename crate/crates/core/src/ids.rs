//! Integrated density of states: Monte Carlo eigenvalue counting, coupled
//! Dirichlet/Neumann bracketing bounds, the exact 1D hard-trap series,
//! Lifshitz-exponent fits, and rate-function inversion.
//!
//! The lattice normalization counts states per site: `N(lambda) =
//! E[#{k : lambda_k <= lambda}] / (2R)^d` lies in `[0, 1]`.

use crate::eigen;
use crate::error::{Error, Result};
use crate::geometry::BoxRegion;
use crate::hamiltonian::{assemble, BoundaryCondition};
use crate::numeric::{linear_least_squares, Welford};
use crate::random_media::{FieldSampler, ModelSpec};
use crate::rng::{SeedPath, StreamTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Log-spaced grid with the given number of points per decade (endpoints
/// included).
pub fn log_lambda_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("grid needs 0 < lo < hi"));
    }
    if per_decade == 0 {
        return Err(Error::invalid("per_decade must be positive"));
    }
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil() as usize + 1;
    let step = decades / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * 10f64.powf(step * i as f64)
            }
        })
        .collect())
}

/// Monte Carlo estimate of the IDS on a lambda grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdsEstimate {
    pub lambda_grid: Vec<f64>,
    pub bc: BoundaryCondition,
    /// Box half-side; 0 marks an exact (infinite-volume) curve.
    pub half_side: i64,
    pub n_realizations: usize,
    /// Mean count density per site, one entry per grid lambda.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// True where the per-realization eigenvalue budget saturated, making
    /// the density a lower bound at that lambda.
    pub truncated: Vec<bool>,
}

impl IdsEstimate {
    /// Wrap an exact curve (no Monte Carlo error) for fitting.
    pub fn from_exact(lambda_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if lambda_grid.len() != values.len() {
            return Err(Error::invalid("grid and values must have equal length"));
        }
        let n = lambda_grid.len();
        Ok(IdsEstimate {
            lambda_grid,
            bc: BoundaryCondition::Dirichlet,
            half_side: 0,
            n_realizations: 0,
            mean: values,
            stderr: vec![0.0; n],
            truncated: vec![false; n],
        })
    }

    /// CSV columns: `lambda,mean,stderr,n,bc,R,truncated`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "lambda,mean,stderr,n,bc,R,truncated")?;
        for i in 0..self.lambda_grid.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.lambda_grid[i],
                self.mean[i],
                self.stderr[i],
                self.n_realizations,
                self.bc,
                self.half_side,
                self.truncated[i] as u8
            )?;
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    if grid[0] <= 0.0 {
        return Err(Error::invalid("lambda grid must be positive"));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("lambda grid must increase strictly"));
        }
    }
    Ok(())
}

/// Counts for a whole grid from one realization's operator.
fn counts_for_grid(
    h: &crate::hamiltonian::OperatorHandle,
    grid: &[f64],
) -> Result<(Vec<usize>, Vec<bool>)> {
    let mut counts = Vec::with_capacity(grid.len());
    let mut truncated = Vec::with_capacity(grid.len());
    let n = h.dim();
    let gersh = h.gershgorin_upper();
    if h.dimension_d() == 1 || n <= eigen::DENSE_LIMIT {
        for &lambda in grid {
            let c = eigen::count_leq(h, lambda)?;
            counts.push(c.count);
            truncated.push(c.truncated);
        }
    } else {
        let budget = eigen::COUNT_BUDGET.min(n);
        let values =
            eigen::lowest_eigenvalues(h, budget, eigen::DEFAULT_TOL, eigen::default_max_iter(n))?;
        let slack = 1e-12 * gersh.max(1.0);
        for &lambda in grid {
            if lambda >= gersh {
                counts.push(n);
                truncated.push(false);
            } else {
                let c = values.iter().take_while(|&&v| v <= lambda + slack).count();
                counts.push(c);
                truncated.push(c == budget && budget < n);
            }
        }
    }
    Ok((counts, truncated))
}

/// Monte Carlo IDS estimate: realizations are independent (per-realization
/// seeds) and accumulated in realization order, so the result does not
/// depend on the thread count. Dirichlet and Neumann runs with the same
/// seed share their realizations, coupling the two estimates.
pub fn estimate_ids(
    spec: &ModelSpec,
    bc: BoundaryCondition,
    region: &BoxRegion,
    lambda_grid: &[f64],
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<IdsEstimate> {
    validate_grid(lambda_grid)?;
    if n_realizations == 0 {
        return Err(Error::invalid("need at least one realization"));
    }
    let sampler = FieldSampler::new(*spec, region.d)?;
    let sites = region.site_count() as f64;

    let per_realization: Vec<Result<(Vec<usize>, Vec<bool>)>> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(
                region,
                &seed.with_tag(StreamTag::Field).with_realization(i as u64),
            )?;
            match assemble(&field, bc, spec.kappa) {
                Ok(h) => counts_for_grid(&h, lambda_grid),
                // a fully trapped box contributes zero states
                Err(Error::FullyTrapped) => {
                    Ok((vec![0; lambda_grid.len()], vec![false; lambda_grid.len()]))
                }
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut acc: Vec<Welford> = vec![Welford::new(); lambda_grid.len()];
    let mut truncated = vec![false; lambda_grid.len()];
    for r in per_realization {
        let (counts, flags) = r?;
        for (j, c) in counts.iter().enumerate() {
            acc[j].push(*c as f64 / sites);
            truncated[j] |= flags[j];
        }
    }
    Ok(IdsEstimate {
        lambda_grid: lambda_grid.to_vec(),
        bc,
        half_side: region.half_side,
        n_realizations,
        mean: acc.iter().map(|w| w.mean).collect(),
        stderr: acc.iter().map(|w| w.stderr()).collect(),
        truncated,
    })
}

/// Finite-volume bracketing bounds at one lambda, estimated on shared
/// realizations: lower `= (2R)^-d P(lambda_1^D <= lambda)`, upper
/// `= c4 P(lambda_1^N <= lambda)` with the lattice Weyl constant `c4`
/// reported alongside. The upper bound only applies for lambda in `(0, 1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketingBounds {
    pub lambda: f64,
    pub lower: f64,
    pub lower_stderr: f64,
    pub upper: Option<f64>,
    pub upper_stderr: Option<f64>,
    pub c4: Option<f64>,
    pub p_dirichlet: f64,
    pub p_neumann: f64,
    pub n_realizations: usize,
}

pub fn bracketing_bounds(
    spec: &ModelSpec,
    region: &BoxRegion,
    lambda: f64,
    n_realizations: usize,
    seed: &SeedPath,
) -> Result<BracketingBounds> {
    if n_realizations < 30 {
        return Err(Error::invalid("bracketing needs at least 30 realizations"));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    let sampler = FieldSampler::new(*spec, region.d)?;
    let pairs: Vec<Result<(bool, bool)>> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(
                region,
                &seed.with_tag(StreamTag::Field).with_realization(i as u64),
            )?;
            let principal = |bc| -> Result<f64> {
                match assemble(&field, bc, spec.kappa) {
                    Ok(h) => Ok(eigen::principal_eigenpair(
                        &h,
                        eigen::DEFAULT_TOL,
                        eigen::default_max_iter(h.dim()),
                    )?
                    .value),
                    Err(Error::FullyTrapped) => Ok(f64::INFINITY),
                    Err(e) => Err(e),
                }
            };
            let ld = principal(BoundaryCondition::Dirichlet)?;
            let ln = principal(BoundaryCondition::Neumann)?;
            Ok((ld <= lambda, ln <= lambda))
        })
        .collect();

    let mut hits_d = 0u64;
    let mut hits_n = 0u64;
    for p in pairs {
        let (id, inn) = p?;
        hits_d += id as u64;
        hits_n += inn as u64;
    }
    let n = n_realizations as f64;
    let p_d = hits_d as f64 / n;
    let p_n = hits_n as f64 / n;
    let sd_d = (p_d * (1.0 - p_d) / n).sqrt();
    let sd_n = (p_n * (1.0 - p_n) / n).sqrt();
    let vol = region.site_count() as f64;

    let (upper, upper_stderr, c4) = if lambda < 1.0 {
        let c4 = lattice_weyl_constant(region, spec.kappa);
        (Some(c4 * p_n), Some(c4 * sd_n), Some(c4))
    } else {
        (None, None, None)
    };

    Ok(BracketingBounds {
        lambda,
        lower: p_d / vol,
        lower_stderr: sd_d / vol,
        upper,
        upper_stderr,
        c4,
        p_dirichlet: p_d,
        p_neumann: p_n,
        n_realizations,
    })
}

fn axis_neumann_eigenvalues(n: usize, kappa: f64) -> Vec<f64> {
    (0..n)
        .map(|k| 2.0 * kappa * (1.0 - (k as f64 * std::f64::consts::PI / n as f64).cos()))
        .collect()
}

/// Exact count of free Neumann eigenvalues `<= lambda` on the box, by
/// direct enumeration of the tensor cosine spectrum (`d <= 3`).
pub fn weyl_count(region: &BoxRegion, kappa: f64, lambda: f64) -> usize {
    if lambda < 0.0 {
        return 0;
    }
    let n = 2 * region.half_side as usize;
    let axis = axis_neumann_eigenvalues(n, kappa);
    match region.d {
        1 => axis.iter().filter(|&&e| e <= lambda).count(),
        2 => {
            let mut count = 0;
            for &e1 in &axis {
                if e1 > lambda {
                    break;
                }
                count += axis.iter().take_while(|&&e2| e1 + e2 <= lambda).count();
            }
            count
        }
        3 => {
            let mut count = 0;
            for &e1 in &axis {
                if e1 > lambda {
                    break;
                }
                for &e2 in &axis {
                    if e1 + e2 > lambda {
                        break;
                    }
                    count += axis
                        .iter()
                        .take_while(|&&e3| e1 + e2 + e3 <= lambda)
                        .count();
                }
            }
            count
        }
        _ => unreachable!("BoxRegion enforces d <= 3"),
    }
}

/// Lattice Weyl constant: the largest per-volume count ratio
/// `#{free Neumann eigenvalues <= mu} / ((2R)^d mu^{d/2})` over the
/// positive free spectrum up to 1. (At `mu -> 0` the ratio diverges on any
/// finite box because of the zero mode, so the supremum runs over the
/// positive eigenvalues, matching the large-box reading.)
pub fn lattice_weyl_constant(region: &BoxRegion, kappa: f64) -> f64 {
    let n = 2 * region.half_side as usize;
    let axis = axis_neumann_eigenvalues(n, kappa);
    let mut sums = Vec::new();
    match region.d {
        1 => sums.extend(axis.iter().copied()),
        2 => {
            for &e1 in &axis {
                if e1 > 1.0 {
                    break;
                }
                for &e2 in &axis {
                    if e1 + e2 > 1.0 {
                        break;
                    }
                    sums.push(e1 + e2);
                }
            }
        }
        3 => {
            for &e1 in &axis {
                if e1 > 1.0 {
                    break;
                }
                for &e2 in &axis {
                    if e1 + e2 > 1.0 {
                        break;
                    }
                    for &e3 in &axis {
                        if e1 + e2 + e3 > 1.0 {
                            break;
                        }
                        sums.push(e1 + e2 + e3);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    sums.retain(|&s| s > 0.0 && s <= 1.0);
    sums.sort_by(f64::total_cmp);
    let vol = region.site_count() as f64;
    let mut best = weyl_count(region, kappa, 1.0) as f64 / vol;
    for &mu in &sums {
        let count = weyl_count(region, kappa, mu) as f64;
        best = best.max(count / (vol * mu.powf(region.d as f64 / 2.0)));
    }
    best
}

/// Eigenvalue count of the free Dirichlet run of length `len`:
/// `#{k in 1..=len : 2 kappa (1 - cos(k pi / (len+1))) <= lambda}`.
/// Ties are included within a relative slack of 1e-12, the same convention
/// as [`eigen::count_leq`], so exact-threshold queries are rounding-stable.
fn segment_count(len: u64, kappa: f64, lambda: f64) -> u64 {
    let thr = lambda + 1e-12 * (2.0 * kappa + lambda.abs());
    let c = thr / (2.0 * kappa);
    if c >= 2.0 {
        return len;
    }
    if c <= 0.0 {
        return 0;
    }
    let eig =
        |k: u64| 2.0 * kappa * (1.0 - (k as f64 * std::f64::consts::PI / (len as f64 + 1.0)).cos());
    let mut k = (((len + 1) as f64) * (1.0 - c).acos() / std::f64::consts::PI).floor() as u64;
    k = k.min(len);
    while k < len && eig(k + 1) <= thr {
        k += 1;
    }
    while k >= 1 && eig(k) > thr {
        k -= 1;
    }
    k
}

/// Exact infinite-volume IDS of the 1D model with hard single-site
/// Bernoulli traps: trap-free runs of length `l` occur with per-site density
/// `p^2 (1-p)^l` and contribute the Dirichlet path spectrum of the run.
/// The series is truncated when the geometric tail bound drops below
/// `series_tol` relative to the partial sum, so deep-tail values far below
/// any absolute cutoff stay computable.
pub fn ids_1d_hard_exact(p: f64, kappa: f64, lambda: f64, series_tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p must lie in (0,1), got {p}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa must be positive"));
    }
    if !(series_tol > 0.0) {
        return Err(Error::invalid("series_tol must be positive"));
    }
    if lambda <= 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    let c = (lambda / (2.0 * kappa)).min(2.0);
    // first run length whose ground state clears lambda
    let mut l_min = if c >= 2.0 {
        1
    } else {
        ((std::f64::consts::PI / (1.0 - c).acos()).ceil() as u64).saturating_sub(1)
    }
    .max(1);
    while l_min > 1 && segment_count(l_min - 1, kappa, lambda) > 0 {
        l_min -= 1;
    }
    while segment_count(l_min, kappa, lambda) == 0 {
        l_min += 1;
        if l_min > 100_000_000 {
            return Ok(0.0);
        }
    }

    let mut sum = 0.0f64;
    let mut l = l_min;
    let mut weight = p * p * q.powi(l as i32); // p^2 q^l
    loop {
        if weight == 0.0 {
            break; // underflow: remaining terms are below representable range
        }
        sum += weight * segment_count(l, kappa, lambda) as f64;
        // tail bound: sum_{j>l} p^2 q^j j = q^{l+1} ((l+1) p + q)
        let tail = q.powi(l as i32 + 1) * ((l as f64 + 1.0) * p + q);
        if sum > 0.0 && tail <= series_tol * sum {
            break;
        }
        l += 1;
        weight *= q;
        if l > 200_000_000 {
            return Err(Error::invalid("hard-trap series did not converge"));
        }
    }
    Ok(sum)
}

/// Envelope for the finite-box bias `|E[count]/(2R) - N(lambda)|` of the 1D
/// hard-trap model: boundary runs see one wall instead of a second trap and
/// runs longer than the box are clipped, giving
/// `(1/2R) sum_l q^l cnt(l) (p^2 (l+1) + 2p) + p^2 sum_{l>=2R} l q^l + q^{2R}`.
pub fn ids_1d_hard_finite_r_bias(p: f64, kappa: f64, lambda: f64, half_side: i64) -> f64 {
    let q = 1.0 - p;
    let two_r = 2 * half_side as u64;
    let mut sum = 0.0f64;
    let mut l = 1u64;
    let mut ql = q; // q^l
    loop {
        let cnt = segment_count(l, kappa, lambda) as f64;
        sum += ql * cnt * (p * p * (l as f64 + 1.0) + 2.0 * p);
        let tail = ql * q * ((l as f64 + 1.0) * p + q) * (p + 2.0);
        if (sum > 0.0 && tail < 1e-12 * sum) || ql == 0.0 || l > 10_000_000 {
            break;
        }
        l += 1;
        ql *= q;
    }
    // clipped runs beyond the box size
    let tail_2r = q.powi(two_r as i32) * (two_r as f64 * p + q);
    sum / two_r as f64 + p * tail_2r + q.powi(two_r as i32)
}

/// Regularly varying rate `phi(x) = c x^L (log x)^m`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateFunction {
    pub amplitude: f64,
    pub index: f64,
    pub log_power: f64,
}

impl RateFunction {
    pub fn new(amplitude: f64, index: f64, log_power: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        if !(index > 0.0) || !index.is_finite() {
            return Err(Error::invalid(format!("index must be positive, got {index}")));
        }
        if !log_power.is_finite() {
            return Err(Error::invalid("log power must be finite"));
        }
        Ok(RateFunction {
            amplitude,
            index,
            log_power,
        })
    }

    /// Pure power law `c x^L`.
    pub fn power_law(amplitude: f64, index: f64) -> Result<Self> {
        RateFunction::new(amplitude, index, 0.0)
    }

    /// Left end of the domain where the function increases strictly. A pure
    /// power law increases on all of `(0, inf)`; with a log factor the
    /// domain starts at `max(e, e^{-m/L})`.
    pub fn x_min(&self) -> f64 {
        if self.log_power == 0.0 {
            0.0
        } else {
            std::f64::consts::E.max((-self.log_power / self.index).exp())
        }
    }

    /// Evaluate at `x >= x_min` (`phi(0) = 0` for pure power laws).
    pub fn eval(&self, x: f64) -> f64 {
        if self.log_power == 0.0 {
            self.amplitude * x.powf(self.index)
        } else {
            self.amplitude * x.powf(self.index) * x.ln().powf(self.log_power)
        }
    }
}

/// Inverse of a rate function by monotone bisection: returns `psi(y)` with
/// `phi(psi(y)) = y` to the requested relative tolerance.
pub fn asymptotic_inverse(phi: &RateFunction, y: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let x_min = phi.x_min();
    let f_min = if x_min == 0.0 { 0.0 } else { phi.eval(x_min) };
    if !(y >= f_min) {
        return Err(Error::OutOfDomain {
            value: y,
            reason: format!("below the rate function's range start {f_min}"),
        });
    }
    if y == f_min && x_min > 0.0 {
        return Ok(x_min);
    }
    let mut lo = x_min;
    let mut hi = x_min.max(1.0);
    let mut guard = 0;
    while phi.eval(hi) < y {
        hi *= 2.0;
        guard += 1;
        if guard > 4000 {
            return Err(Error::OutOfDomain {
                value: y,
                reason: "rate function never reaches this value".into(),
            });
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if phi.eval(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The predicted exponential decay rate per unit time, `1 / psi(d log t)`.
pub fn predicted_decay_rate(phi: &RateFunction, d: usize, t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::OutOfDomain {
            value: t,
            reason: "need t > 1 for the log-time scale".into(),
        });
    }
    let y = d as f64 * t.ln();
    let x_min = phi.x_min();
    let f_min = if x_min == 0.0 { 0.0 } else { phi.eval(x_min) };
    if y < f_min {
        return Err(Error::OutOfDomain {
            value: t,
            reason: format!("d log t = {y} is below the rate function's range start {f_min}"),
        });
    }
    let psi = asymptotic_inverse(phi, y, 1e-12)?;
    if !(psi > 0.0) {
        return Err(Error::OutOfDomain {
            value: t,
            reason: "inverse vanished; t too small".into(),
        });
    }
    Ok(1.0 / psi)
}

/// Weighted fit of `log(-log N)` against `log(1/lambda)` (and
/// `log log(1/lambda)` with the flag).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LifshitzFit {
    pub l_hat: f64,
    pub c_hat: f64,
    pub m_hat: Option<f64>,
    pub l_stderr: f64,
    pub c_stderr: f64,
    pub m_stderr: Option<f64>,
    pub window: (f64, f64),
    pub residual_norm: f64,
    pub n_points: usize,
}

impl LifshitzFit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// The fitted rate function `c_hat x^L (log x)^m`.
    pub fn rate_function(&self) -> Result<RateFunction> {
        RateFunction::new(self.c_hat, self.l_hat, self.m_hat.unwrap_or(0.0))
    }
}

pub fn fit_lifshitz(
    ids: &IdsEstimate,
    window: (f64, f64),
    with_log_correction: bool,
) -> Result<LifshitzFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("fit window needs 0 < lo < hi"));
    }
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    let mut sigmas = Vec::new();
    for (i, &lambda) in ids.lambda_grid.iter().enumerate() {
        if lambda < lo || lambda > hi {
            continue;
        }
        let n = ids.mean[i];
        if !(n > 0.0 && n < 1.0) {
            return Err(Error::OutOfDomain {
                value: lambda,
                reason: format!("IDS estimate {n} at lambda {lambda} is not strictly inside (0,1)"),
            });
        }
        let x1 = (1.0 / lambda).ln();
        if with_log_correction && x1 <= 0.0 {
            return Err(Error::OutOfDomain {
                value: lambda,
                reason: "log-log regressor needs lambda < 1".into(),
            });
        }
        let neg_log_n = -n.ln();
        ys.push(neg_log_n.ln());
        let mut row = vec![1.0, x1];
        if with_log_correction {
            row.push(x1.ln());
        }
        rows.push(row);
        // delta method: d/dN log(-log N) = 1 / (N log N)
        sigmas.push(ids.stderr[i] / (n * neg_log_n));
    }
    if rows.len() < 4 {
        return Err(Error::invalid(format!(
            "fit window holds {} grid points, need at least 4",
            rows.len()
        )));
    }
    let all_exact = sigmas.iter().all(|&s| s == 0.0);
    let weights: Option<Vec<f64>> = if all_exact {
        None
    } else {
        let min_pos = sigmas
            .iter()
            .copied()
            .filter(|&s| s > 0.0)
            .fold(f64::INFINITY, f64::min);
        Some(
            sigmas
                .iter()
                .map(|&s| {
                    let s = if s > 0.0 { s } else { min_pos };
                    1.0 / (s * s)
                })
                .collect(),
        )
    };
    let fit = linear_least_squares(&rows, &ys, weights.as_deref())?;
    let l_hat = fit.coefficients[1];
    if !(l_hat > 0.0) {
        return Err(Error::OutOfDomain {
            value: l_hat,
            reason: "fitted Lifshitz index is not positive in this window".into(),
        });
    }
    let c_hat = fit.coefficients[0].exp();
    Ok(LifshitzFit {
        l_hat,
        c_hat,
        m_hat: with_log_correction.then(|| fit.coefficients[2]),
        l_stderr: fit.stderr[1],
        c_stderr: c_hat * fit.stderr[0],
        m_stderr: with_log_correction.then(|| fit.stderr[2]),
        window,
        residual_norm: fit.residual_norm,
        n_points: fit.n_points,
    })
}
