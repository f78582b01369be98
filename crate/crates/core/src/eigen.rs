//! Eigensolvers for [`OperatorHandle`].
//!
//! Small active sets go through a dense symmetric decomposition. Larger ones
//! use Lanczos with full reorthogonalization for the lowest `k <= 32`
//! eigenvalues, with shifted inverse iteration (CG inner solves) as the
//! fallback for the principal pair. In one dimension the operator is
//! tridiagonal in site order, so spectral counting uses exact Sturm pivots.
//!
//! Lanczos counts assume a simple low spectrum; the exact dense and Sturm
//! paths are used whenever the dimension permits, so multiplicities are
//! only at risk above [`DENSE_LIMIT`] active sites in `d >= 2`.

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorHandle;
use crate::rng::{SeedPath, StreamTag};
use nalgebra::DMatrix;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense cutoff for k-lowest solves and spectral counting.
pub const DENSE_LIMIT: usize = 512;

/// Dense cutoff when only the principal pair is needed.
pub const PRINCIPAL_DENSE_LIMIT: usize = 128;

/// Hard cap for full diagonalization.
pub const FULL_LIMIT: usize = 4096;

/// Eigenvalue budget per realization when counting on large boxes.
pub const COUNT_BUDGET: usize = 32;

const LANCZOS_SEED: u64 = 0x4c41_4e43_5a4f_5331;

/// Default iteration cap: ten times the dimension.
pub fn default_max_iter(dim: usize) -> usize {
    10 * dim.max(1)
}

/// A converged eigenpair; `vector` is unit-norm over the active sites and
/// `residual` is the verified `||H phi - lambda phi||`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// All eigenpairs of a small operator, ascending; column `k` of `vectors`
/// belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct FullSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl FullSpectrum {
    /// `<phi_k, 1>` for every k.
    pub fn overlaps_with_ones(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|k| self.vectors.column(k).iter().sum())
            .collect()
    }
}

fn to_dense(h: &OperatorHandle) -> DMatrix<f64> {
    let n = h.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = h.diagonal()[i];
        for &j in h.neighbors_of(i) {
            m[(i, j as usize)] = -h.kappa();
        }
    }
    m
}

fn dense_spectrum(h: &OperatorHandle) -> FullSpectrum {
    let n = h.dim();
    let eig = nalgebra::SymmetricEigen::new(to_dense(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    FullSpectrum { values, vectors }
}

/// Full diagonalization; the active set must not exceed [`FULL_LIMIT`].
pub fn full_spectrum(h: &OperatorHandle) -> Result<FullSpectrum> {
    if h.dim() > FULL_LIMIT {
        return Err(Error::invalid(format!(
            "active set of {} sites exceeds the full-diagonalization cap {FULL_LIMIT}",
            h.dim()
        )));
    }
    Ok(dense_spectrum(h))
}

/// The `k` smallest eigenvalues in nondecreasing order.
pub fn lowest_eigenvalues(
    h: &OperatorHandle,
    k: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = h.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n {
        return Err(Error::TooManyEigenvalues {
            requested: k,
            dimension: n,
        });
    }
    if n <= DENSE_LIMIT || k * 2 >= n {
        if n > FULL_LIMIT {
            return Err(Error::invalid(format!(
                "need {k} of {n} eigenvalues; dense path capped at {FULL_LIMIT}"
            )));
        }
        let spec = dense_spectrum(h);
        return Ok(spec.values[..k].to_vec());
    }
    let out = lanczos_lowest(h, k, tol, max_iter, false)?;
    Ok(out.values)
}

/// Smallest eigenpair: nonnegative unit eigenvector and verified residual.
pub fn principal_eigenpair(h: &OperatorHandle, tol: f64, max_iter: usize) -> Result<Eigenpair> {
    let n = h.dim();
    let scale = residual_scale(h);
    if n <= PRINCIPAL_DENSE_LIMIT {
        let spec = dense_spectrum(h);
        let vector: Vec<f64> = spec.vectors.column(0).iter().copied().collect();
        let mut pair = finish_pair(h, spec.values[0], vector);
        pair.residual = pair.residual.max(0.0);
        return Ok(pair);
    }
    match lanczos_lowest(h, 1, tol, max_iter, true) {
        Ok(out) => {
            let pair = finish_pair(h, out.values[0], out.vectors.expect("requested")[0].clone());
            if pair.residual <= tol * scale {
                return Ok(pair);
            }
            inverse_iteration(h, pair, tol, max_iter)
        }
        Err(Error::NotConverged {
            best_value,
            residual,
            ..
        }) => {
            // retry from a shifted inverse iteration seeded near the best Ritz value
            let start = Eigenpair {
                value: best_value,
                vector: normalized_random(h.dim()),
                residual,
            };
            inverse_iteration(h, start, tol, max_iter)
        }
        Err(e) => Err(e),
    }
}

/// Result of spectral counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralCount {
    pub count: usize,
    /// True when the eigenvalue budget saturated, so `count` is only a
    /// lower bound.
    pub truncated: bool,
}

/// Number of eigenvalues `<= lambda` (ties included within a relative slack
/// of 1e-12 of the spectral scale).
pub fn count_leq(h: &OperatorHandle, lambda: f64) -> Result<SpectralCount> {
    let n = h.dim();
    let scale = residual_scale(h);
    let thr = lambda + 1e-12 * scale;
    if thr < 0.0 {
        return Ok(SpectralCount {
            count: 0,
            truncated: false,
        });
    }
    if lambda >= h.gershgorin_upper() {
        return Ok(SpectralCount {
            count: n,
            truncated: false,
        });
    }
    if h.dimension_d() == 1 {
        return Ok(SpectralCount {
            count: sturm_count_1d(h, thr),
            truncated: false,
        });
    }
    if n <= DENSE_LIMIT {
        let spec = dense_spectrum(h);
        let count = spec.values.iter().take_while(|&&v| v <= thr).count();
        return Ok(SpectralCount {
            count,
            truncated: false,
        });
    }
    let budget = COUNT_BUDGET.min(n);
    let values = lowest_eigenvalues(h, budget, DEFAULT_TOL, default_max_iter(n))?;
    let count = values.iter().take_while(|&&v| v <= thr).count();
    Ok(SpectralCount {
        count,
        truncated: count == budget && budget < n,
    })
}

/// Exact Sturm count of eigenvalues strictly below `lambda` for the 1D
/// (tridiagonal) operator: negative pivots of the `LDL^T` factorization.
fn sturm_count_1d(h: &OperatorHandle, lambda: f64) -> usize {
    let n = h.dim();
    let kappa2 = h.kappa() * h.kappa();
    let mut count = 0usize;
    let mut prev_pivot = 0.0f64;
    for i in 0..n {
        let coupled = i > 0 && h.sites()[i][0] == h.sites()[i - 1][0] + 1;
        let sub = if coupled { kappa2 / prev_pivot } else { 0.0 };
        let mut pivot = (h.diagonal()[i] - lambda) - sub;
        if pivot == 0.0 {
            pivot = -f64::MIN_POSITIVE;
        }
        if pivot < 0.0 {
            count += 1;
        }
        prev_pivot = pivot;
    }
    count
}

fn residual_scale(h: &OperatorHandle) -> f64 {
    h.gershgorin_upper().max(1.0)
}

fn finish_pair(h: &OperatorHandle, value: f64, mut vector: Vec<f64>) -> Eigenpair {
    normalize(&mut vector);
    // sign-fix toward nonnegative entries
    let s: f64 = vector.iter().sum();
    if s < 0.0 {
        for v in vector.iter_mut() {
            *v = -*v;
        }
    }
    let mut hv = vec![0.0; vector.len()];
    h.apply(&vector, &mut hv);
    let residual = vector
        .iter()
        .zip(&hv)
        .map(|(x, y)| (y - value * x) * (y - value * x))
        .sum::<f64>()
        .sqrt();
    Eigenpair {
        value,
        vector,
        residual,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn normalized_random(n: usize) -> Vec<f64> {
    let mut s = SeedPath::new(LANCZOS_SEED, 1, StreamTag::Eigen).stream();
    let mut v: Vec<f64> = (0..n).map(|_| s.uniform(-1.0, 1.0)).collect();
    normalize(&mut v);
    v
}

struct LanczosOutput {
    values: Vec<f64>,
    vectors: Option<Vec<Vec<f64>>>,
}

/// Lanczos with full reorthogonalization (two Gram-Schmidt passes per step)
/// against the whole stored basis; restarts with a fresh direction on
/// breakdown so invariant subspaces do not stall the iteration.
fn lanczos_lowest(
    h: &OperatorHandle,
    k: usize,
    tol: f64,
    max_iter: usize,
    want_vectors: bool,
) -> Result<LanczosOutput> {
    let n = h.dim();
    let scale = residual_scale(h);
    let m_cap = max_iter.min(n).max(k);
    let mut stream = SeedPath::new(LANCZOS_SEED, 0, StreamTag::Eigen).stream();

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut v: Vec<f64> = (0..n).map(|_| stream.uniform(-1.0, 1.0)).collect();
    normalize(&mut v);

    let mut next_check = (k + 8).min(m_cap);
    let mut hv = vec![0.0; n];
    loop {
        let j = basis.len();
        if j >= m_cap {
            break;
        }
        h.apply(&v, &mut hv);
        let a = dot(&v, &hv);
        let mut w = hv.clone();
        axpy(&mut w, -a, &v);
        if j > 0 && beta[j - 1] != 0.0 {
            axpy(&mut w, -beta[j - 1], &basis[j - 1]);
        }
        basis.push(std::mem::take(&mut v));
        alpha.push(a);
        for _ in 0..2 {
            for u in &basis {
                let c = dot(u, &w);
                if c != 0.0 {
                    axpy(&mut w, -c, u);
                }
            }
        }
        let b = dot(&w, &w).sqrt();
        if b > 1e-13 * scale {
            beta.push(b);
            for x in w.iter_mut() {
                *x /= b;
            }
            v = w;
        } else if basis.len() < n {
            // invariant subspace: continue from a fresh orthogonal direction
            let mut fresh: Vec<f64> = (0..n).map(|_| stream.uniform(-1.0, 1.0)).collect();
            for _ in 0..2 {
                for u in &basis {
                    let c = dot(u, &fresh);
                    axpy(&mut fresh, -c, u);
                }
            }
            if normalize(&mut fresh) < 1e-12 {
                beta.push(0.0);
                break;
            }
            beta.push(0.0);
            v = fresh;
        } else {
            beta.push(0.0);
            break;
        }

        let j = basis.len();
        if j >= k && j >= next_check {
            next_check = ((j as f64 * 1.5) as usize).max(j + 8).min(m_cap);
            let (_, y) = tridiag_eigen(&alpha, &beta[..alpha.len() - 1]);
            let b_last = *beta.last().expect("nonempty");
            let converged = (0..k).all(|i| (b_last * y[(j - 1, i)]).abs() <= 0.5 * tol * scale);
            if converged {
                break;
            }
        }
        if basis.len() >= n {
            break;
        }
    }

    let j = basis.len();
    if j < k {
        return Err(Error::NotConverged {
            iterations: j,
            best_value: f64::NAN,
            residual: f64::INFINITY,
        });
    }
    let (theta, y) = tridiag_eigen(&alpha, &beta[..alpha.len() - 1]);
    let take = k.min(j);
    let mut values = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    let mut worst = 0.0f64;
    for i in 0..take {
        let mut x = vec![0.0; n];
        for (row, base) in basis.iter().enumerate() {
            let c = y[(row, i)];
            if c != 0.0 {
                axpy(&mut x, c, base);
            }
        }
        normalize(&mut x);
        h.apply(&x, &mut hv);
        let lam = theta[i];
        let resid = x
            .iter()
            .zip(&hv)
            .map(|(xi, yi)| (yi - lam * xi) * (yi - lam * xi))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(resid);
        values.push(lam);
        vectors.push(x);
    }
    if worst > tol * scale {
        return Err(Error::NotConverged {
            iterations: j,
            best_value: values[0],
            residual: worst,
        });
    }
    Ok(LanczosOutput {
        values,
        vectors: want_vectors.then_some(vectors),
    })
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and subdiagonal; ascending values, columns of `y` are vectors.
fn tridiag_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = diag.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = diag[i];
        if i + 1 < m {
            t[(i, i + 1)] = off[i];
            t[(i + 1, i)] = off[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut y = DMatrix::<f64>::zeros(m, m);
    for (kk, &i) in order.iter().enumerate() {
        y.set_column(kk, &eig.eigenvectors.column(i));
    }
    (values, y)
}

enum CgOutcome {
    Solved(Vec<f64>),
    Indefinite,
}

/// Conjugate gradient for `(H - sigma I) x = b`; reports indefiniteness so
/// the caller can lower the shift.
fn cg_shifted(h: &OperatorHandle, sigma: f64, b: &[f64], tol: f64, max_iter: usize) -> CgOutcome {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let b_norm = rs.sqrt().max(1e-300);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        h.apply(&p, &mut ap);
        axpy(&mut ap, -sigma, &p);
        let p_ap = dot(&p, &ap);
        if p_ap <= 0.0 {
            return CgOutcome::Indefinite;
        }
        let alpha = rs / p_ap;
        axpy(&mut x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() <= tol * b_norm {
            return CgOutcome::Solved(x);
        }
        let ratio = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + ratio * p[i];
        }
    }
    CgOutcome::Solved(x)
}

/// Shifted inverse iteration for the principal pair, CG inner solves.
fn inverse_iteration(
    h: &OperatorHandle,
    start: Eigenpair,
    tol: f64,
    max_iter: usize,
) -> Result<Eigenpair> {
    let n = h.dim();
    let scale = residual_scale(h);
    let mut x = start.vector.clone();
    if normalize(&mut x) == 0.0 {
        x = normalized_random(n);
    }
    let mut shift_gap = (10.0 * start.residual).max(1e-6 * scale);
    let mut best = start;
    for _ in 0..60 {
        let theta = h.rayleigh_quotient(&x)?;
        let sigma = theta - shift_gap;
        match cg_shifted(h, sigma, &x, 1e-12, 10 * n) {
            CgOutcome::Solved(mut y) => {
                if normalize(&mut y) == 0.0 {
                    shift_gap *= 2.0;
                    continue;
                }
                let pair = finish_pair(h, h.rayleigh_quotient(&y)?, y);
                if pair.residual <= tol * scale {
                    return Ok(pair);
                }
                if pair.residual < best.residual {
                    best = pair.clone();
                }
                x = pair.vector;
                shift_gap = (pair.residual * 4.0).max(1e-9 * scale);
            }
            CgOutcome::Indefinite => {
                shift_gap *= 4.0;
            }
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        best_value: best.value,
        residual: best.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, SiteBox};
    use crate::hamiltonian::{assemble, assemble_region, BoundaryCondition};
    use crate::random_media::{sample_bernoulli, PotentialField, TrapProfile};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn free_path(n: i64, bc: BoundaryCondition, kappa: f64) -> OperatorHandle {
        let region = BoxRegion::lattice(1, n).unwrap();
        let field = PotentialField::zero(region);
        let sub = SiteBox::new(1, [0, 0, 0], [n, 0, 0]).unwrap();
        assemble_region(&field, &sub, bc, kappa).unwrap()
    }

    fn dirichlet_path_eigenvalue(n: usize, kappa: f64, k: usize) -> f64 {
        2.0 * kappa * (1.0 - (k as f64 * PI / (n as f64 + 1.0)).cos())
    }

    fn neumann_path_eigenvalue(n: usize, kappa: f64, k: usize) -> f64 {
        2.0 * kappa * (1.0 - (k as f64 * PI / n as f64).cos())
    }

    #[test]
    fn dirichlet_path_spectrum_n3() {
        let h = free_path(3, BoundaryCondition::Dirichlet, 0.5);
        let vals = lowest_eigenvalues(&h, 3, DEFAULT_TOL, default_max_iter(3)).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert_relative_eq!(*v, dirichlet_path_eigenvalue(3, 0.5, k + 1), epsilon = 1e-12);
        }
        assert_relative_eq!(vals[0], 1.0 - (PI / 4.0).cos(), epsilon = 1e-12);
    }

    #[test]
    fn neumann_path_spectrum_n4() {
        let h = free_path(4, BoundaryCondition::Neumann, 0.5);
        let vals = lowest_eigenvalues(&h, 4, DEFAULT_TOL, default_max_iter(4)).unwrap();
        let expect = [0.0, 1.0 - (PI / 4.0).cos(), 1.0, 1.0 + (PI / 4.0).cos()];
        for (k, (v, e)) in vals.iter().zip(expect).enumerate() {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
            assert_relative_eq!(*v, neumann_path_eigenvalue(4, 0.5, k), epsilon = 1e-12);
        }
    }

    #[test]
    fn neumann_principal_is_zero_with_constant_vector() {
        let h = free_path(10, BoundaryCondition::Neumann, 0.5);
        let pair = principal_eigenpair(&h, DEFAULT_TOL, default_max_iter(10)).unwrap();
        assert!(pair.value.abs() < 1e-12);
        let c = 1.0 / (10.0f64).sqrt();
        for v in &pair.vector {
            assert_relative_eq!(*v, c, epsilon = 1e-9);
        }
    }

    #[test]
    fn lanczos_matches_closed_form_on_large_path() {
        // n above DENSE_LIMIT forces the Lanczos route
        let h = free_path(600, BoundaryCondition::Dirichlet, 0.5);
        let vals = lowest_eigenvalues(&h, 5, 1e-10, default_max_iter(600)).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert_relative_eq!(
                *v,
                dirichlet_path_eigenvalue(600, 0.5, k + 1),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn principal_on_large_path_via_lanczos() {
        let h = free_path(700, BoundaryCondition::Dirichlet, 0.5);
        let pair = principal_eigenpair(&h, 1e-9, default_max_iter(700)).unwrap();
        assert_relative_eq!(
            pair.value,
            dirichlet_path_eigenvalue(700, 0.5, 1),
            epsilon = 1e-9
        );
        assert!(pair.vector.iter().all(|&v| v >= -1e-9));
        assert!(pair.residual <= 1e-9 * h.gershgorin_upper().max(1.0));
    }

    #[test]
    fn shift_identity() {
        let region = BoxRegion::lattice(1, 6).unwrap();
        let seed = SeedPath::new(77, 0, StreamTag::Field);
        let spike = TrapProfile::spike(0.8).unwrap();
        let field = sample_bernoulli(&region, 0.4, &spike, &seed).unwrap();
        let shifted = field.plus_constant(0.3).unwrap();
        let h0 = assemble(&field, BoundaryCondition::Dirichlet, 0.5).unwrap();
        let h1 = assemble(&shifted, BoundaryCondition::Dirichlet, 0.5).unwrap();
        let p0 = principal_eigenpair(&h0, DEFAULT_TOL, 1000).unwrap();
        let p1 = principal_eigenpair(&h1, DEFAULT_TOL, 1000).unwrap();
        assert_relative_eq!(p1.value, p0.value + 0.3, epsilon = 1e-10);
        let overlap: f64 = p0.vector.iter().zip(&p1.vector).map(|(a, b)| a * b).sum();
        assert_relative_eq!(overlap.abs(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn too_many_eigenvalues_is_an_error() {
        let h = free_path(3, BoundaryCondition::Dirichlet, 0.5);
        match lowest_eigenvalues(&h, 4, DEFAULT_TOL, 100) {
            Err(Error::TooManyEigenvalues { .. }) => {}
            other => panic!("expected TooManyEigenvalues, got {other:?}"),
        }
    }

    #[test]
    fn principal_consistent_with_k1() {
        let region = BoxRegion::lattice(2, 4).unwrap();
        let seed = SeedPath::new(5, 3, StreamTag::Field);
        let spike = TrapProfile::spike(1.0).unwrap();
        let field = sample_bernoulli(&region, 0.3, &spike, &seed).unwrap();
        let h = assemble(&field, BoundaryCondition::Dirichlet, 0.5).unwrap();
        let pair = principal_eigenpair(&h, DEFAULT_TOL, 1000).unwrap();
        let k1 = lowest_eigenvalues(&h, 1, DEFAULT_TOL, 1000).unwrap();
        assert!((pair.value - k1[0]).abs() <= 2.0 * DEFAULT_TOL * h.gershgorin_upper());
    }

    #[test]
    fn sturm_count_matches_dense_on_random_1d_fields() {
        let region = BoxRegion::lattice(1, 24).unwrap();
        for trial in 0..10u64 {
            let seed = SeedPath::new(1000 + trial, 0, StreamTag::Field);
            let profile = if trial % 2 == 0 {
                TrapProfile::spike(f64::INFINITY).unwrap()
            } else {
                TrapProfile::spike(1.5).unwrap()
            };
            let field = sample_bernoulli(&region, 0.3, &profile, &seed).unwrap();
            if field.active_count() == 0 {
                continue;
            }
            let h = assemble(&field, BoundaryCondition::Dirichlet, 0.5).unwrap();
            let spec = dense_spectrum(&h);
            for lambda in [0.01, 0.1, 0.3, 0.5, 1.0, 2.5] {
                let direct = spec.values.iter().filter(|&&v| v <= lambda + 1e-12).count();
                let sturm = count_leq(&h, lambda).unwrap();
                assert_eq!(sturm.count, direct, "trial {trial} lambda {lambda}");
                assert!(!sturm.truncated);
            }
        }
    }

    #[test]
    fn count_handles_extreme_thresholds() {
        let h = free_path(8, BoundaryCondition::Neumann, 0.5);
        assert_eq!(count_leq(&h, -0.5).unwrap().count, 0);
        // zero eigenvalue counted at threshold zero
        assert_eq!(count_leq(&h, 0.0).unwrap().count, 1);
        // above the lattice spectral maximum everything counts
        assert_eq!(count_leq(&h, 2.0).unwrap().count, 8);
    }

    #[test]
    fn dense_count_includes_multiplicities() {
        // free Dirichlet square: eigenvalues lam_jk = lam_j + lam_k have
        // multiplicity 2 off the diagonal j = k
        let region = BoxRegion::lattice(2, 3).unwrap();
        let field = PotentialField::zero(region);
        let h = assemble(&field, BoundaryCondition::Dirichlet, 0.5).unwrap();
        let n = 6;
        let mut expect: Vec<f64> = Vec::new();
        for j in 1..=n {
            for k in 1..=n {
                expect.push(
                    dirichlet_path_eigenvalue(n, 0.5, j) + dirichlet_path_eigenvalue(n, 0.5, k),
                );
            }
        }
        expect.sort_by(f64::total_cmp);
        for lambda in [0.3, 0.8, 1.5, 2.2] {
            let direct = expect.iter().filter(|&&v| v <= lambda).count();
            assert_eq!(count_leq(&h, lambda).unwrap().count, direct);
        }
    }

    #[test]
    fn full_spectrum_parseval() {
        let region = BoxRegion::lattice(2, 3).unwrap();
        let seed = SeedPath::new(42, 0, StreamTag::Field);
        let field = sample_bernoulli(
            &region,
            0.2,
            &TrapProfile::spike(f64::INFINITY).unwrap(),
            &seed,
        )
        .unwrap();
        let h = assemble(&field, BoundaryCondition::Dirichlet, 0.5).unwrap();
        let spec = full_spectrum(&h).unwrap();
        let total: f64 = spec.overlaps_with_ones().iter().map(|o| o * o).sum();
        assert_relative_eq!(total, h.dim() as f64, max_relative = 1e-10);
    }

    #[test]
    fn inverse_iteration_refines_a_rough_pair() {
        let h = free_path(200, BoundaryCondition::Dirichlet, 0.5);
        let rough = Eigenpair {
            value: 0.001,
            vector: normalized_random(h.dim()),
            residual: 1.0,
        };
        let pair = inverse_iteration(&h, rough, 1e-9, 4000).unwrap();
        assert_relative_eq!(
            pair.value,
            dirichlet_path_eigenvalue(200, 0.5, 1),
            epsilon = 1e-8
        );
    }
}
