//! Assembly of `H = -kappa * Laplacian + V` on a lattice region.
//!
//! The Laplacian convention is `(-Lap f)(x) = sum_{y~x} (f(x) - f(y))` with
//! per-neighbor rate `kappa`, matching the generator of the continuous-time
//! simple random walk used in [`crate::survival`]. Hard-trap sites
//! (`V = +inf`) are removed from the active set, which imposes a Dirichlet
//! condition on their boundary under either boundary condition.
//!
//! Missing neighbors contribute to the diagonal as follows:
//! * neighbor outside the region: `+kappa` under Dirichlet (absorbing
//!   wall), nothing under Neumann (reflecting wall);
//! * neighbor inside the region but hard-trapped: `+kappa` always.
//!
//! The resulting quadratic form is positive semidefinite by construction.

use crate::error::{Error, Result};
use crate::geometry::{neighbors, Coord, SiteBox};
use crate::random_media::PotentialField;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Neumann => write!(f, "neumann"),
        }
    }
}

const NO_SITE: u32 = u32::MAX;

/// Sparse symmetric form of the operator on the active sites of a region.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    region: SiteBox,
    mesh: f64,
    bc: BoundaryCondition,
    kappa: f64,
    d: usize,
    sites: Vec<Coord>,
    index_in_region: Vec<u32>,
    potential: Vec<f64>,
    diag: Vec<f64>,
    adj_offsets: Vec<u32>,
    adj_targets: Vec<u32>,
}

/// Assemble on the field's full box.
pub fn assemble(
    field: &PotentialField,
    bc: BoundaryCondition,
    kappa: f64,
) -> Result<OperatorHandle> {
    assemble_region(field, &field.region().site_box(), bc, kappa)
}

/// Assemble on a rectangular sub-region of the field's box.
pub fn assemble_region(
    field: &PotentialField,
    region: &SiteBox,
    bc: BoundaryCondition,
    kappa: f64,
) -> Result<OperatorHandle> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    let field_box = field.region().site_box();
    if region.d != field_box.d || !field_box.contains_box(region) {
        return Err(Error::invalid(
            "region must be contained in the field's box".to_string(),
        ));
    }
    let d = region.d;

    let region_size = region.site_count();
    let mut index_in_region = vec![NO_SITE; region_size];
    let mut sites = Vec::new();
    let mut potential = Vec::new();
    for (ri, z) in region.sites().enumerate() {
        let v = field.value(z).expect("region inside field box");
        if v.is_finite() {
            index_in_region[ri] = sites.len() as u32;
            sites.push(z);
            potential.push(v);
        }
    }
    let n = sites.len();
    if n == 0 {
        return Err(Error::FullyTrapped);
    }

    let mut diag = vec![0.0f64; n];
    let mut adj_offsets = Vec::with_capacity(n + 1);
    let mut adj_targets = Vec::new();
    adj_offsets.push(0u32);
    for (i, &z) in sites.iter().enumerate() {
        for nb in neighbors(z, d) {
            if let Some(ri) = region.index_of(nb) {
                let j = index_in_region[ri];
                if j != NO_SITE {
                    diag[i] += kappa;
                    adj_targets.push(j);
                } else {
                    // hard trap: absorbing under either boundary condition
                    diag[i] += kappa;
                }
            } else if bc == BoundaryCondition::Dirichlet {
                diag[i] += kappa;
            }
        }
        diag[i] += potential[i];
        adj_offsets.push(adj_targets.len() as u32);
    }

    Ok(OperatorHandle {
        region: *region,
        mesh: field.region().mesh,
        bc,
        kappa,
        d,
        sites,
        index_in_region,
        potential,
        diag,
        adj_offsets,
        adj_targets,
    })
}

impl OperatorHandle {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn dimension_d(&self) -> usize {
        self.d
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn region(&self) -> &SiteBox {
        &self.region
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn sites(&self) -> &[Coord] {
        &self.sites
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Active index of a site, if it is active and inside the region.
    pub fn index_of_site(&self, z: Coord) -> Option<usize> {
        let ri = self.region.index_of(z)?;
        let i = self.index_in_region[ri];
        (i != NO_SITE).then_some(i as usize)
    }

    pub fn neighbors_of(&self, i: usize) -> &[u32] {
        let lo = self.adj_offsets[i] as usize;
        let hi = self.adj_offsets[i + 1] as usize;
        &self.adj_targets[lo..hi]
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for i in 0..self.dim() {
            let mut acc = self.diag[i] * x[i];
            for &j in self.neighbors_of(i) {
                acc -= self.kappa * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// `<f, H f>` evaluated through the edge form, so the result is
    /// nonnegative up to rounding regardless of cancellation.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.dim());
        let mut q = 0.0;
        for i in 0..self.dim() {
            let mut degree = 0usize;
            for &j in self.neighbors_of(i) {
                let j = j as usize;
                degree += 1;
                if j > i {
                    let dfe = f[i] - f[j];
                    q += self.kappa * dfe * dfe;
                }
            }
            let killing = self.diag[i] - self.potential[i] - self.kappa * degree as f64;
            q += killing * f[i] * f[i] + self.potential[i] * f[i] * f[i];
        }
        q
    }

    /// Rayleigh quotient `<f, Hf> / <f, f>`; an upper bound for the
    /// principal eigenvalue for any nonzero trial vector.
    pub fn rayleigh_quotient(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.dim() {
            return Err(Error::invalid(format!(
                "trial vector length {} does not match dimension {}",
                f.len(),
                self.dim()
            )));
        }
        let norm2: f64 = f.iter().map(|v| v * v).sum();
        if !(norm2 > 0.0) {
            return Err(Error::invalid("trial vector must be nonzero"));
        }
        Ok(self.quadratic_form(f) / norm2)
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diag[i] + self.kappa * self.neighbors_of(i).len() as f64)
            .fold(0.0, f64::max)
    }

    /// Coordinate-format dump (1-based indices) for external cross-checks.
    /// Header line: `n n nnz`.
    pub fn write_coo<W: Write>(&self, w: &mut W) -> Result<()> {
        let n = self.dim();
        let nnz = n + self.adj_targets.len();
        writeln!(w, "{n} {n} {nnz}")?;
        for i in 0..n {
            writeln!(w, "{} {} {}", i + 1, i + 1, self.diag[i])?;
            for &j in self.neighbors_of(i) {
                writeln!(w, "{} {} {}", i + 1, j + 1, -self.kappa)?;
            }
        }
        Ok(())
    }
}

/// Dirichlet-form Rayleigh quotient of the cutoff-damped Neumann ground
/// state: builds the per-axis product ramp `rho` (1 on the eps-interior,
/// linear to 0 across the eps-collar) and evaluates `rho * phi_n` in the
/// Dirichlet form on the same region. The value is a certified upper bound
/// for the Dirichlet principal eigenvalue of the region.
pub fn cutoff_transfer(
    field: &PotentialField,
    region: &SiteBox,
    phi_n: &[f64],
    kappa: f64,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let mut widths = [0i64; 3];
    for a in 0..region.d {
        let side = region.extent(a);
        let w = (eps * side as f64).floor();
        if w < 2.0 {
            return Err(Error::CollarTooThin {
                collar: eps * side as f64,
            });
        }
        widths[a] = w as i64;
    }
    let dirichlet = assemble_region(field, region, BoundaryCondition::Dirichlet, kappa)?;
    if phi_n.len() != dirichlet.dim() {
        return Err(Error::invalid(format!(
            "eigenvector length {} does not match the region's active set {}",
            phi_n.len(),
            dirichlet.dim()
        )));
    }
    let trial: Vec<f64> = dirichlet
        .sites()
        .iter()
        .zip(phi_n)
        .map(|(&z, &v)| {
            let mut rho = 1.0f64;
            for a in 0..region.d {
                let depth = (z[a] - region.lo[a]).min(region.hi[a] - 1 - z[a]);
                rho *= (depth as f64 / widths[a] as f64).min(1.0);
            }
            rho * v
        })
        .collect();
    dirichlet.rayleigh_quotient(&trial)
}
