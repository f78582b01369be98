//! Lattice boxes and site indexing.
//!
//! Dimensions up to 3 are supported. Coordinates are carried as `[i64; 3]`
//! with unused axes pinned to zero, which keeps hot loops allocation-free.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A lattice coordinate; axes beyond the active dimension stay zero.
pub type Coord = [i64; 3];

/// Centered lattice box: the sites `{-R, ..., R-1}^d`, each at physical
/// position `h * z`. Site count is exactly `(2R)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub d: usize,
    pub half_side: i64,
    pub mesh: f64,
}

impl BoxRegion {
    pub fn new(d: usize, half_side: i64, mesh: f64) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(Error::invalid(format!("dimension must be 1..=3, got {d}")));
        }
        if half_side <= 0 {
            return Err(Error::invalid(format!(
                "half_side must be positive, got {half_side}"
            )));
        }
        if !(mesh > 0.0) || !mesh.is_finite() {
            return Err(Error::invalid(format!("mesh must be positive, got {mesh}")));
        }
        Ok(BoxRegion { d, half_side, mesh })
    }

    /// Native lattice box (`h = 1`).
    pub fn lattice(d: usize, half_side: i64) -> Result<Self> {
        BoxRegion::new(d, half_side, 1.0)
    }

    pub fn site_count(&self) -> usize {
        (2 * self.half_side as usize).pow(self.d as u32)
    }

    /// Physical side length `2Rh`.
    pub fn physical_side(&self) -> f64 {
        2.0 * self.half_side as f64 * self.mesh
    }

    /// Physical volume `(2Rh)^d`.
    pub fn physical_volume(&self) -> f64 {
        self.physical_side().powi(self.d as i32)
    }

    /// The full box as a [`SiteBox`].
    pub fn site_box(&self) -> SiteBox {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..self.d {
            lo[a] = -self.half_side;
            hi[a] = self.half_side;
        }
        SiteBox { d: self.d, lo, hi }
    }

    pub fn contains(&self, z: Coord) -> bool {
        (0..self.d).all(|a| z[a] >= -self.half_side && z[a] < self.half_side)
    }

    /// Row-major linear index of a site, or `None` outside the box.
    pub fn index_of(&self, z: Coord) -> Option<usize> {
        if !self.contains(z) {
            return None;
        }
        let n = 2 * self.half_side;
        let mut idx: i64 = 0;
        for a in 0..self.d {
            idx = idx * n + (z[a] + self.half_side);
        }
        Some(idx as usize)
    }

    pub fn coords_of(&self, mut idx: usize) -> Coord {
        let n = (2 * self.half_side) as usize;
        let mut z = [0i64; 3];
        for a in (0..self.d).rev() {
            z[a] = (idx % n) as i64 - self.half_side;
            idx /= n;
        }
        z
    }

    /// Physical position of a site.
    pub fn position(&self, z: Coord) -> [f64; 3] {
        let mut p = [0.0; 3];
        for a in 0..self.d {
            p[a] = z[a] as f64 * self.mesh;
        }
        p
    }

    /// Nearest site to a physical point (round half away from zero), which
    /// may fall outside the box.
    pub fn nearest_site(&self, p: [f64; 3]) -> Coord {
        let mut z = [0i64; 3];
        for a in 0..self.d {
            z[a] = (p[a] / self.mesh).round() as i64;
        }
        z
    }

    pub fn sites(&self) -> SiteIter {
        self.site_box().sites()
    }
}

/// Half-open axis-aligned lattice rectangle `[lo, hi)` in site coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteBox {
    pub d: usize,
    pub lo: Coord,
    pub hi: Coord,
}

impl SiteBox {
    pub fn new(d: usize, lo: Coord, hi: Coord) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(Error::invalid(format!("dimension must be 1..=3, got {d}")));
        }
        for a in 0..d {
            if hi[a] <= lo[a] {
                return Err(Error::invalid(format!(
                    "empty extent on axis {a}: [{}, {})",
                    lo[a], hi[a]
                )));
            }
        }
        Ok(SiteBox { d, lo, hi })
    }

    /// Cube of side `side` with lower corner `lo`.
    pub fn cube(d: usize, lo: Coord, side: i64) -> Result<Self> {
        let mut hi = [0i64; 3];
        for a in 0..d {
            hi[a] = lo[a] + side;
        }
        SiteBox::new(d, lo, hi)
    }

    /// Cube of side `2*half + parity` centered at `center` (side `2*half`).
    pub fn centered(d: usize, center: Coord, half: i64) -> Result<Self> {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..d {
            lo[a] = center[a] - half;
            hi[a] = center[a] + half;
        }
        SiteBox::new(d, lo, hi)
    }

    pub fn extent(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn site_count(&self) -> usize {
        (0..self.d).map(|a| self.extent(a) as usize).product()
    }

    pub fn contains(&self, z: Coord) -> bool {
        (0..self.d).all(|a| z[a] >= self.lo[a] && z[a] < self.hi[a])
    }

    pub fn contains_box(&self, other: &SiteBox) -> bool {
        (0..self.d).all(|a| other.lo[a] >= self.lo[a] && other.hi[a] <= self.hi[a])
    }

    /// Row-major index within this box.
    pub fn index_of(&self, z: Coord) -> Option<usize> {
        if !self.contains(z) {
            return None;
        }
        let mut idx: i64 = 0;
        for a in 0..self.d {
            idx = idx * self.extent(a) + (z[a] - self.lo[a]);
        }
        Some(idx as usize)
    }

    pub fn coords_of(&self, mut idx: usize) -> Coord {
        let mut z = [0i64; 3];
        for a in (0..self.d).rev() {
            let n = self.extent(a) as usize;
            z[a] = (idx % n) as i64 + self.lo[a];
            idx /= n;
        }
        z
    }

    pub fn sites(&self) -> SiteIter {
        SiteIter {
            boxx: *self,
            next: 0,
            total: self.site_count(),
        }
    }

    /// Euclidean distance between the closest points of two boxes, in
    /// lattice units (0 when they touch or overlap).
    pub fn distance(&self, other: &SiteBox) -> f64 {
        let mut s = 0.0;
        for a in 0..self.d {
            // gap between [lo, hi-1] site ranges on this axis
            let gap = if other.lo[a] > self.hi[a] - 1 {
                (other.lo[a] - (self.hi[a] - 1)) as f64
            } else if self.lo[a] > other.hi[a] - 1 {
                (self.lo[a] - (other.hi[a] - 1)) as f64
            } else {
                0.0
            };
            s += gap * gap;
        }
        s.sqrt()
    }

    /// Euclidean diameter of the site set, in lattice units.
    pub fn diameter(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..self.d {
            let e = (self.extent(a) - 1) as f64;
            s += e * e;
        }
        s.sqrt()
    }

    /// Euclidean distance from a lattice point to this box, lattice units.
    pub fn distance_to_point(&self, z: Coord) -> f64 {
        let mut s = 0.0;
        for a in 0..self.d {
            let gap = if z[a] < self.lo[a] {
                (self.lo[a] - z[a]) as f64
            } else if z[a] > self.hi[a] - 1 {
                (z[a] - (self.hi[a] - 1)) as f64
            } else {
                0.0
            };
            s += gap * gap;
        }
        s.sqrt()
    }
}

pub struct SiteIter {
    boxx: SiteBox,
    next: usize,
    total: usize,
}

impl Iterator for SiteIter {
    type Item = Coord;

    fn next(&mut self) -> Option<Coord> {
        if self.next >= self.total {
            return None;
        }
        let z = self.boxx.coords_of(self.next);
        self.next += 1;
        Some(z)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = self.total - self.next;
        (rem, Some(rem))
    }
}

/// The 2d nearest neighbors of a site.
pub fn neighbors(z: Coord, d: usize) -> impl Iterator<Item = Coord> {
    (0..d).flat_map(move |a| {
        [-1i64, 1].into_iter().map(move |step| {
            let mut n = z;
            n[a] += step;
            n
        })
    })
}
