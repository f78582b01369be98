//! Shared numerical utilities: streaming moments, quadrature, monotone
//! interpolation, small least-squares problems.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Welford accumulator for mean and variance; merges are exact, so a block
/// reduction in fixed order reproduces the sequential result.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Welford::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let delta = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count as f64 - 1.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Adaptive Simpson quadrature with an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::TabulationFailed { tol });
        }
        let l = recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Monotone cubic interpolant (Fritsch–Carlson): preserves monotonicity of
/// the data, C1, exact at the knots.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::invalid("interpolation needs >= 2 matching nodes"));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid("interpolation nodes must increase strictly"));
            }
        }
        let n = x.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            slope[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean weighted by interval widths
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        // clamp endpoint slopes to keep monotonicity
        for i in [0, n - 1] {
            let d = if i == 0 { delta[0] } else { delta[n - 2] };
            if slope[i] * d <= 0.0 {
                slope[i] = 0.0;
            } else if slope[i].abs() > 3.0 * d.abs() {
                slope[i] = 3.0 * d;
            }
        }
        Ok(MonotoneCubic { x, y, slope })
    }

    pub fn eval(&self, q: f64) -> f64 {
        let n = self.x.len();
        if q <= self.x[0] {
            return self.y[0];
        }
        if q >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let mut i = match self
            .x
            .binary_search_by(|v| v.partial_cmp(&q).expect("non-NaN nodes"))
        {
            Ok(k) => return self.y[k],
            Err(k) => k - 1,
        };
        if i == n - 1 {
            i -= 1;
        }
        let h = self.x[i + 1] - self.x[i];
        let t = (q - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

/// Result of a (weighted) linear least-squares fit.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    /// sqrt of the (weighted) residual sum of squares.
    pub residual_norm: f64,
    pub n_points: usize,
}

/// Solve `min ||W^(1/2) (X b - y)||`. When `weights` is `None` the fit is
/// ordinary least squares and parameter errors are scaled by the residual
/// variance; with explicit weights (1/sigma^2) the covariance is (X'WX)^-1.
pub fn linear_least_squares(
    rows: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
) -> Result<LinearFit> {
    let n = rows.len();
    if n == 0 || n != y.len() {
        return Err(Error::invalid("least squares needs matching nonempty data"));
    }
    let p = rows[0].len();
    if n < p {
        return Err(Error::invalid(format!(
            "least squares needs at least {p} points, got {n}"
        )));
    }
    let w: Vec<f64> = match weights {
        Some(ws) => {
            if ws.len() != n || ws.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid("weights must be positive and finite"));
            }
            ws.to_vec()
        }
        None => vec![1.0; n],
    };

    let mut xtx = DMatrix::<f64>::zeros(p, p);
    let mut xty = DVector::<f64>::zeros(p);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != p {
            return Err(Error::invalid("ragged design matrix"));
        }
        for a in 0..p {
            xty[a] += w[i] * row[a] * y[i];
            for b in 0..p {
                xtx[(a, b)] += w[i] * row[a] * row[b];
            }
        }
    }
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("singular normal equations in least squares"))?;
    let beta = chol.solve(&xty);
    let cov = chol.inverse();

    let mut rss = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let fit: f64 = row.iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
        rss += w[i] * (y[i] - fit) * (y[i] - fit);
    }
    let scale = if weights.is_some() {
        1.0
    } else if n > p {
        rss / (n - p) as f64
    } else {
        0.0
    };
    let stderr: Vec<f64> = (0..p).map(|a| (cov[(a, a)] * scale).max(0.0).sqrt()).collect();

    Ok(LinearFit {
        coefficients: beta.iter().copied().collect(),
        stderr,
        residual_norm: rss.max(0.0).sqrt(),
        n_points: n,
    })
}

/// log(sum(exp(xs))) without overflow; -inf for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Empirical quantile by linear interpolation on a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let t = pos - lo as f64;
        sorted[lo] * (1.0 - t) + sorted[hi] * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn welford_matches_direct_formulas() {
        let xs = [1.0, 4.0, -2.0, 0.5, 9.0, 3.25];
        let mut w = Welford::new();
        for &x in &xs {
            w.push(x);
        }
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 =
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() as f64 - 1.0);
        assert_relative_eq!(w.mean, mean, epsilon = 1e-14);
        assert_relative_eq!(w.variance(), var, epsilon = 1e-14);
    }

    #[test]
    fn welford_merge_equals_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 5.0).collect();
        let mut seq = Welford::new();
        for &x in &xs {
            seq.push(x);
        }
        let mut left = Welford::new();
        let mut right = Welford::new();
        for &x in &xs[..37] {
            left.push(x);
        }
        for &x in &xs[37..] {
            right.push(x);
        }
        left.merge(&right);
        assert_relative_eq!(left.mean, seq.mean, epsilon = 1e-13);
        assert_relative_eq!(left.variance(), seq.variance(), epsilon = 1e-13);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-11);
        let g = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-13).unwrap();
        assert_relative_eq!(g, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-11);
    }

    #[test]
    fn monotone_cubic_is_monotone_and_exact_at_knots() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64 / 4.0).exp()).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sqrt()).collect();
        let interp = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_relative_eq!(interp.eval(*xi), *yi, epsilon = 1e-12);
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..400 {
            let q = x[0] + (x[x.len() - 1] - x[0]) * i as f64 / 399.0;
            let v = interp.eval(q);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn least_squares_recovers_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 2.5 - 0.75 * i as f64).collect();
        let fit = linear_least_squares(&rows, &y, None).unwrap();
        assert_relative_eq!(fit.coefficients[0], 2.5, epsilon = 1e-12);
        assert_relative_eq!(fit.coefficients[1], -0.75, epsilon = 1e-12);
        assert!(fit.residual_norm < 1e-10);
        assert!(fit.stderr[1] < 1e-10);
    }

    #[test]
    fn wilson_contains_truth_for_fair_coin() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && 0.5 < hi);
        let (lo0, hi0) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.1);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_relative_eq!(
            log_sum_exp(&[-1000.0, -1000.0]),
            -1000.0 + (2.0f64).ln(),
            epsilon = 1e-12
        );
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::INFINITY, 0.0]), f64::INFINITY);
    }
}
