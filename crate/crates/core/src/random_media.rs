//! Realizations of the four trap-potential models on lattice boxes.
//!
//! Every sampler keys its randomness by absolute coordinate (site, cell, or
//! lattice point), so a realization is a pure function of `(ModelSpec,
//! SeedPath)` restricted to the requested box: enlarging the box extends the
//! same realization. Trap centers from the continuum models are rounded to
//! the nearest site before profiles are superposed; hard traps carry
//! `f64::INFINITY` and are removed from operators downstream.

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, Coord};
use crate::numeric::{adaptive_simpson, MonotoneCubic};
use crate::rng::{SeedPath, StreamTag};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Shape of the single-trap potential `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfileShape {
    /// `W` supported on exactly one site.
    Spike,
    /// Indicator of the Euclidean ball of the profile radius.
    Ball,
}

/// One trap's potential: nonnegative, bounded unless hard, supported in a
/// ball of `radius` lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapProfile {
    pub shape: ProfileShape,
    /// Support radius in lattice units (ignored for spikes).
    pub radius: f64,
    /// Trap height; `f64::INFINITY` means a hard (absorbing) trap.
    pub height: f64,
}

impl TrapProfile {
    pub fn spike(height: f64) -> Result<Self> {
        TrapProfile::new(ProfileShape::Spike, 0.0, height)
    }

    pub fn ball(radius: f64, height: f64) -> Result<Self> {
        TrapProfile::new(ProfileShape::Ball, radius, height)
    }

    pub fn new(shape: ProfileShape, radius: f64, height: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("profile radius must be finite and >= 0, got {radius}")));
        }
        if !(height >= 0.0) {
            return Err(Error::invalid(format!("profile height must be >= 0, got {height}")));
        }
        Ok(TrapProfile { shape, radius, height })
    }

    pub fn is_hard(&self) -> bool {
        self.height.is_infinite()
    }

    /// Support radius in lattice units.
    pub fn reach(&self) -> f64 {
        match self.shape {
            ProfileShape::Spike => 0.0,
            ProfileShape::Ball => self.radius,
        }
    }
}

/// Which random medium to draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelVariant {
    /// Each site hosts a trap center independently with probability `p`.
    Bernoulli { p: f64 },
    /// I.i.d. site values with `P(V < v) = exp(-v^-gamma)`; no profile.
    IidTail { gamma: f64 },
    /// Poisson cloud of trap centers with intensity `nu` per unit volume.
    Poisson { nu: f64 },
    /// One trap near each integer point, displaced with density
    /// proportional to `exp(-|x|^theta)`.
    PerturbedLattice { theta: f64 },
}

/// A trap model together with its profile and the walk's diffusion constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: ModelVariant,
    pub profile: TrapProfile,
    /// Per-neighbor jump rate of the walk (total rate `2 d kappa`).
    pub kappa: f64,
}

impl ModelSpec {
    pub fn new(variant: ModelVariant, profile: TrapProfile, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        match variant {
            ModelVariant::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!("p must lie in [0,1], got {p}")));
                }
            }
            ModelVariant::IidTail { gamma } => {
                if !(gamma > 0.0) {
                    return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
                }
            }
            ModelVariant::Poisson { nu } => {
                if !(nu >= 0.0) {
                    return Err(Error::invalid(format!("nu must be >= 0, got {nu}")));
                }
            }
            ModelVariant::PerturbedLattice { theta } => {
                if !(theta > 0.0) {
                    return Err(Error::invalid(format!("theta must be positive, got {theta}")));
                }
            }
        }
        Ok(ModelSpec { variant, profile, kappa })
    }

    pub fn bernoulli(p: f64, profile: TrapProfile, kappa: f64) -> Result<Self> {
        ModelSpec::new(ModelVariant::Bernoulli { p }, profile, kappa)
    }

    pub fn iid_tail(gamma: f64, kappa: f64) -> Result<Self> {
        // profile is unused for site-wise i.i.d. values
        ModelSpec::new(ModelVariant::IidTail { gamma }, TrapProfile::spike(1.0)?, kappa)
    }

    pub fn poisson(nu: f64, profile: TrapProfile, kappa: f64) -> Result<Self> {
        ModelSpec::new(ModelVariant::Poisson { nu }, profile, kappa)
    }

    pub fn perturbed_lattice(theta: f64, profile: TrapProfile, kappa: f64) -> Result<Self> {
        ModelSpec::new(ModelVariant::PerturbedLattice { theta }, profile, kappa)
    }
}

/// Where a field came from; stored in the binary header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldProvenance {
    pub variant_code: u32,
    pub seed: SeedPath,
}

impl FieldProvenance {
    fn custom() -> Self {
        FieldProvenance {
            variant_code: 0,
            seed: SeedPath::new(0, 0, StreamTag::Scratch),
        }
    }
}

/// A realization of the potential on a box: one nonnegative extended-real
/// value per site, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    region: BoxRegion,
    values: Vec<f64>,
    provenance: FieldProvenance,
}

impl PotentialField {
    pub fn from_values(region: BoxRegion, values: Vec<f64>) -> Result<Self> {
        if values.len() != region.site_count() {
            return Err(Error::invalid(format!(
                "value count {} does not match site count {}",
                values.len(),
                region.site_count()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::invalid("potential values must be >= 0 (inf allowed)"));
        }
        Ok(PotentialField {
            region,
            values,
            provenance: FieldProvenance::custom(),
        })
    }

    pub fn zero(region: BoxRegion) -> Self {
        PotentialField {
            values: vec![0.0; region.site_count()],
            region,
            provenance: FieldProvenance::custom(),
        }
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &FieldProvenance {
        &self.provenance
    }

    /// Value at a site; `None` outside the box.
    pub fn value(&self, z: Coord) -> Option<f64> {
        self.region.index_of(z).map(|i| self.values[i])
    }

    /// Number of sites with finite potential.
    pub fn active_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Largest value including infinities (the field supremum).
    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The same field shifted by a constant (for monotonicity experiments).
    pub fn plus_constant(&self, c: f64) -> Result<PotentialField> {
        if !(c >= 0.0) {
            return Err(Error::invalid("shift must be >= 0 to preserve nonnegativity"));
        }
        Ok(PotentialField {
            region: self.region,
            values: self.values.iter().map(|v| v + c).collect(),
            provenance: FieldProvenance::custom(),
        })
    }

    /// Pointwise maximum with another field on the same box.
    pub fn pointwise_max(&self, other: &PotentialField) -> Result<PotentialField> {
        if self.region != other.region {
            return Err(Error::invalid("fields live on different boxes"));
        }
        Ok(PotentialField {
            region: self.region,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.max(*b))
                .collect(),
            provenance: FieldProvenance::custom(),
        })
    }

    const MAGIC: &'static [u8; 8] = b"TRAPFLD1";

    /// Flat binary layout: magic, d, R, h, variant tag, seed triple, payload
    /// of row-major little-endian f64 (`+inf` kept as IEEE infinity).
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.region.d as u32).to_le_bytes())?;
        w.write_all(&self.region.half_side.to_le_bytes())?;
        w.write_all(&self.region.mesh.to_le_bytes())?;
        w.write_all(&self.provenance.variant_code.to_le_bytes())?;
        w.write_all(&self.provenance.seed.master_seed.to_le_bytes())?;
        w.write_all(&self.provenance.seed.realization_index.to_le_bytes())?;
        w.write_all(&stream_tag_code(self.provenance.seed.stream_tag).to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::MalformedField("bad magic".into()));
        }
        let d = read_u32(r)? as usize;
        let half_side = read_i64(r)?;
        let mesh = read_f64(r)?;
        let variant_code = read_u32(r)?;
        let master = read_u64(r)?;
        let idx = read_u64(r)?;
        let tag = stream_tag_from_code(read_u32(r)?)
            .ok_or_else(|| Error::MalformedField("unknown stream tag".into()))?;
        let len = read_u64(r)? as usize;
        let region = BoxRegion::new(d, half_side, mesh)
            .map_err(|e| Error::MalformedField(e.to_string()))?;
        if len != region.site_count() {
            return Err(Error::MalformedField(format!(
                "payload length {len} does not match box ({} sites)",
                region.site_count()
            )));
        }
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            let v = read_f64(r)?;
            if v.is_nan() || v < 0.0 {
                return Err(Error::MalformedField("negative or NaN potential value".into()));
            }
            values.push(v);
        }
        Ok(PotentialField {
            region,
            values,
            provenance: FieldProvenance {
                variant_code,
                seed: SeedPath::new(master, idx, tag),
            },
        })
    }

    /// CSV with one row per site: coordinate columns then the value.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let names = ["x", "y", "z"];
        let header: Vec<&str> = names[..self.region.d].to_vec();
        writeln!(w, "{},value", header.join(","))?;
        for (i, z) in self.region.sites().enumerate() {
            for a in 0..self.region.d {
                write!(w, "{},", z[a])?;
            }
            writeln!(w, "{}", self.values[i])?;
        }
        Ok(())
    }
}

fn stream_tag_code(tag: StreamTag) -> u32 {
    match tag {
        StreamTag::Field => 1,
        StreamTag::Walk => 2,
        StreamTag::Eigen => 3,
        StreamTag::Bootstrap => 4,
        StreamTag::Displacement => 5,
        StreamTag::Scratch => 6,
    }
}

fn stream_tag_from_code(code: u32) -> Option<StreamTag> {
    Some(match code {
        1 => StreamTag::Field,
        2 => StreamTag::Walk,
        3 => StreamTag::Eigen,
        4 => StreamTag::Bootstrap,
        5 => StreamTag::Displacement,
        6 => StreamTag::Scratch,
        _ => return None,
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Superpose profile copies at the given continuum centers:
/// `V(x) = sum_i W(x - x_i)` evaluated at every site of the box.
pub fn superpose(
    centers: &[[f64; 3]],
    profile: &TrapProfile,
    region: &BoxRegion,
) -> Result<PotentialField> {
    let mut values = vec![0.0f64; region.site_count()];
    let h = region.mesh;
    for c in centers {
        match profile.shape {
            ProfileShape::Spike => {
                let s = region.nearest_site(*c);
                let exact = (0..region.d).all(|a| (c[a] - s[a] as f64 * h).abs() <= h * 1e-9);
                if exact {
                    if let Some(i) = region.index_of(s) {
                        values[i] += profile.height;
                    }
                }
            }
            ProfileShape::Ball => {
                // candidate sites in the bounding cube of the support ball
                let mut lo = [0i64; 3];
                let mut hi = [0i64; 3];
                for a in 0..region.d {
                    lo[a] = ((c[a] / h) - profile.radius).floor() as i64;
                    hi[a] = ((c[a] / h) + profile.radius).ceil() as i64;
                }
                let r2 = (profile.radius * h) * (profile.radius * h);
                let mut z = lo;
                loop {
                    let mut dist2 = 0.0;
                    for a in 0..region.d {
                        let dx = z[a] as f64 * h - c[a];
                        dist2 += dx * dx;
                    }
                    if dist2 <= r2 * (1.0 + 1e-12) + 1e-300 {
                        if let Some(i) = region.index_of(z) {
                            values[i] += profile.height;
                        }
                    }
                    // advance the cube scan
                    let mut a = 0;
                    loop {
                        if a == region.d {
                            break;
                        }
                        z[a] += 1;
                        if z[a] <= hi[a] {
                            break;
                        }
                        z[a] = lo[a];
                        a += 1;
                    }
                    if a == region.d {
                        break;
                    }
                }
            }
        }
    }
    PotentialField::from_values(*region, values)
}

/// Site-Bernoulli trap centers: each lattice site hosts a trap with
/// probability `p`, independently, keyed by the site coordinate.
pub fn sample_bernoulli(
    region: &BoxRegion,
    p: f64,
    profile: &TrapProfile,
    seed: &SeedPath,
) -> Result<PotentialField> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0,1], got {p}")));
    }
    let pad = profile.reach().ceil() as i64;
    let mut centers = Vec::new();
    let outer = padded_box(region, pad);
    for z in outer.sites() {
        let mut s = seed.keyed_stream(&z[..region.d.min(3)]);
        if s.bernoulli(p) {
            centers.push(region.position(z));
        }
    }
    let mut field = superpose(&centers, profile, region)?;
    field.provenance = FieldProvenance {
        variant_code: 1,
        seed: *seed,
    };
    Ok(field)
}

/// Quantile transform of the heavy-lower-tail law `P(V < v) = exp(-v^-gamma)`.
pub fn iid_tail_quantile(u: f64, gamma: f64) -> f64 {
    (-u.ln()).powf(-1.0 / gamma)
}

/// I.i.d. site values with `P(V < v) = exp(-v^-gamma)` via the inverse CDF.
pub fn sample_iid_tail(region: &BoxRegion, gamma: f64, seed: &SeedPath) -> Result<PotentialField> {
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    let mut values = vec![0.0f64; region.site_count()];
    for (i, z) in region.sites().enumerate() {
        let mut s = seed.keyed_stream(&z[..region.d.min(3)]);
        values[i] = iid_tail_quantile(s.open01(), gamma);
    }
    let mut field = PotentialField::from_values(*region, values)?;
    field.provenance = FieldProvenance {
        variant_code: 2,
        seed: *seed,
    };
    Ok(field)
}

/// Poisson cloud: per-cell counts `Poisson(nu * h^d)` with uniform continuum
/// positions, keyed by the cell coordinate; centers are rounded to the
/// nearest site, then superposed.
pub fn sample_poisson(
    region: &BoxRegion,
    nu: f64,
    profile: &TrapProfile,
    seed: &SeedPath,
) -> Result<PotentialField> {
    if !(nu >= 0.0) {
        return Err(Error::invalid(format!("nu must be >= 0, got {nu}")));
    }
    let h = region.mesh;
    let cell_mean = nu * h.powi(region.d as i32);
    let pad = profile.reach().ceil() as i64 + 1;
    let outer = padded_box(region, pad);
    let mut centers = Vec::new();
    for z in outer.sites() {
        let mut s = seed.keyed_stream(&z[..region.d.min(3)]);
        let count = s.poisson(cell_mean);
        for _ in 0..count {
            let mut c = [0.0f64; 3];
            for a in 0..region.d {
                c[a] = (z[a] as f64 + s.f64()) * h;
            }
            // round to the nearest site before superposition
            let site = region.nearest_site(c);
            centers.push(region.position(site));
        }
    }
    let mut field = superpose(&centers, profile, region)?;
    field.provenance = FieldProvenance {
        variant_code: 3,
        seed: *seed,
    };
    Ok(field)
}

/// Perturbed lattice: one trap at `q + omega_q` for each integer point `q`,
/// displacements i.i.d. with density proportional to `exp(-|x|^theta)`.
pub fn sample_perturbed_lattice(
    region: &BoxRegion,
    theta: f64,
    profile: &TrapProfile,
    seed: &SeedPath,
) -> Result<PotentialField> {
    let law = RadialLaw::build(region.d, theta, 1e-10)?;
    sample_perturbed_lattice_with(region, &law, profile, seed)
}

/// Same as [`sample_perturbed_lattice`] with a prebuilt radial law (the
/// tabulation is the expensive part when sampling many realizations).
pub fn sample_perturbed_lattice_with(
    region: &BoxRegion,
    law: &RadialLaw,
    profile: &TrapProfile,
    seed: &SeedPath,
) -> Result<PotentialField> {
    if law.dimension() != region.d {
        return Err(Error::invalid("radial law dimension does not match box"));
    }
    // lattice points up to this physical distance outside the box still
    // reach it: displacements beyond the 1-1e-6 quantile are padded 8x
    let margin = (8.0 * law.quantile(1.0 - 1e-6)).max(profile.reach() * region.mesh);
    let extent = (region.half_side as f64 * region.mesh + margin).ceil() as i64;
    let d = region.d;
    let mut centers = Vec::new();
    let mut q = [0i64; 3];
    for a in 0..3 {
        q[a] = if a < d { -extent } else { 0 };
    }
    loop {
        let mut s = seed.keyed_stream(&q[..d.min(3)]);
        let radius = law.quantile(s.open01());
        let dir = s.unit_vector(d);
        let mut c = [0.0f64; 3];
        for a in 0..d {
            c[a] = q[a] as f64 + radius * dir[a];
        }
        let site = region.nearest_site(c);
        centers.push(region.position(site));

        let mut a = 0;
        loop {
            if a == d {
                break;
            }
            q[a] += 1;
            if q[a] <= extent {
                break;
            }
            q[a] = -extent;
            a += 1;
        }
        if a == d {
            break;
        }
    }
    let mut field = superpose(&centers, profile, region)?;
    field.provenance = FieldProvenance {
        variant_code: 4,
        seed: *seed,
    };
    Ok(field)
}

/// Dispatch on the model variant.
pub fn sample(spec: &ModelSpec, region: &BoxRegion, seed: &SeedPath) -> Result<PotentialField> {
    match spec.variant {
        ModelVariant::Bernoulli { p } => sample_bernoulli(region, p, &spec.profile, seed),
        ModelVariant::IidTail { gamma } => sample_iid_tail(region, gamma, seed),
        ModelVariant::Poisson { nu } => sample_poisson(region, nu, &spec.profile, seed),
        ModelVariant::PerturbedLattice { theta } => {
            sample_perturbed_lattice(region, theta, &spec.profile, seed)
        }
    }
}

/// Reusable sampler: tabulates the perturbed-lattice radial law once and
/// shares it across realizations (it is the expensive part of that model).
#[derive(Debug, Clone)]
pub struct FieldSampler {
    spec: ModelSpec,
    law: Option<RadialLaw>,
}

impl FieldSampler {
    pub fn new(spec: ModelSpec, d: usize) -> Result<Self> {
        let law = match spec.variant {
            ModelVariant::PerturbedLattice { theta } => Some(RadialLaw::build(d, theta, 1e-10)?),
            _ => None,
        };
        Ok(FieldSampler { spec, law })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn sample(&self, region: &BoxRegion, seed: &SeedPath) -> Result<PotentialField> {
        match (&self.spec.variant, &self.law) {
            (ModelVariant::PerturbedLattice { .. }, Some(law)) => {
                sample_perturbed_lattice_with(region, law, &self.spec.profile, seed)
            }
            _ => sample(&self.spec, region, seed),
        }
    }
}

fn padded_box(region: &BoxRegion, pad: i64) -> crate::geometry::SiteBox {
    let mut sb = region.site_box();
    for a in 0..region.d {
        sb.lo[a] -= pad;
        sb.hi[a] += pad;
    }
    sb
}

/// Tabulated radial law of the displacement density `r^(d-1) exp(-r^theta)`:
/// CDF and quantile by monotone cubic interpolation on 4096 log-spaced
/// nodes, cumulative integrals by adaptive Simpson.
#[derive(Debug, Clone)]
pub struct RadialLaw {
    d: usize,
    theta: f64,
    r_nodes: Vec<f64>,
    cdf_nodes: Vec<f64>,
    quantile_interp: MonotoneCubic,
    cdf_interp: MonotoneCubic,
    radial_mass: f64,
}

impl RadialLaw {
    pub const NODES: usize = 4096;

    pub fn build(d: usize, theta: f64, tol: f64) -> Result<RadialLaw> {
        if d == 0 || d > 3 {
            return Err(Error::invalid(format!("dimension must be 1..=3, got {d}")));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::invalid(format!("theta must be positive, got {theta}")));
        }
        let g = move |r: f64| r.powi(d as i32 - 1) * (-r.powf(theta)).exp();

        // extend until the density tail is negligible
        let mut r_max = (41.5f64).powf(1.0 / theta).max(1.0);
        let mut mass = adaptive_simpson(&g, 0.0, r_max, tol * 1e-3)?;
        loop {
            let ext = adaptive_simpson(&g, r_max, 1.5 * r_max, tol * 1e-3)?;
            if ext <= mass * 1e-16 {
                break;
            }
            mass += ext;
            r_max *= 1.5;
            if r_max > 1e12 {
                return Err(Error::TabulationFailed { tol });
            }
        }

        let n = Self::NODES;
        let r_lo = r_max * 1e-8;
        let ratio = (r_max / r_lo).powf(1.0 / (n - 1) as f64);
        let mut r_nodes = Vec::with_capacity(n + 1);
        r_nodes.push(0.0);
        let mut r = r_lo;
        for i in 0..n {
            r_nodes.push(if i == n - 1 { r_max } else { r });
            r *= ratio;
        }

        let per_interval = tol * mass / n as f64;
        let mut cdf_nodes = Vec::with_capacity(n + 1);
        cdf_nodes.push(0.0);
        let mut acc = 0.0;
        for w in r_nodes.windows(2) {
            acc += adaptive_simpson(&g, w[0], w[1], per_interval)?;
            cdf_nodes.push(acc);
        }
        let total = *cdf_nodes.last().expect("nonempty");
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::TabulationFailed { tol });
        }
        for c in cdf_nodes.iter_mut() {
            *c /= total;
        }
        // clamp stray rounding so the table is nondecreasing and ends at 1
        for i in 1..cdf_nodes.len() {
            if cdf_nodes[i] < cdf_nodes[i - 1] {
                cdf_nodes[i] = cdf_nodes[i - 1];
            }
        }
        let last = cdf_nodes.len() - 1;
        cdf_nodes[last] = 1.0;

        // strictly increasing subsequence for the inverse interpolation
        let mut inv_f = Vec::with_capacity(cdf_nodes.len());
        let mut inv_r = Vec::with_capacity(cdf_nodes.len());
        for (rv, fv) in r_nodes.iter().zip(&cdf_nodes) {
            if inv_f.last().is_none_or(|&prev| *fv > prev) {
                inv_f.push(*fv);
                inv_r.push(*rv);
            }
        }
        let quantile_interp = MonotoneCubic::new(inv_f.clone(), inv_r.clone())?;
        let cdf_interp = MonotoneCubic::new(inv_r, inv_f)?;

        Ok(RadialLaw {
            d,
            theta,
            r_nodes,
            cdf_nodes,
            quantile_interp,
            cdf_interp,
            radial_mass: total,
        })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Quantile of the radial law: `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // below the first tabulated node the CDF behaves like c r^d
        let first_f = self.cdf_nodes[1];
        if u <= first_f {
            let first_r = self.r_nodes[1];
            return first_r * (u / first_f).powf(1.0 / self.d as f64);
        }
        self.quantile_interp.eval(u)
    }

    /// CDF of the radial law.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= *self.r_nodes.last().expect("nonempty") {
            return 1.0;
        }
        self.cdf_interp.eval(r).clamp(0.0, 1.0)
    }

    /// Upper tail `P(|omega| >= r)`.
    pub fn tail(&self, r: f64) -> f64 {
        (1.0 - self.cdf(r)).max(0.0)
    }

    /// Mean of the radial law, by quadrature (diagnostic).
    pub fn mean_radius(&self) -> f64 {
        let d = self.d as i32;
        let theta = self.theta;
        let g = move |r: f64| r.powi(d) * (-r.powf(theta)).exp();
        let r_max = *self.r_nodes.last().expect("nonempty");
        adaptive_simpson(&g, 0.0, r_max * 2.0, 1e-12).map_or(f64::NAN, |m| m / self.radial_mass)
    }

    /// The density normalizer `N(d, theta)` of `N exp(-|x|^theta)` on `R^d`;
    /// reported for documentation, never used by the sampler.
    pub fn normalizing_constant(&self) -> f64 {
        let sphere_area = match self.d {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI,
            3 => 4.0 * std::f64::consts::PI,
            _ => unreachable!(),
        };
        1.0 / (sphere_area * self.radial_mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn seed(i: u64) -> SeedPath {
        SeedPath::new(0xBEE5, i, StreamTag::Field)
    }

    #[test]
    fn bernoulli_extremes() {
        let region = BoxRegion::lattice(1, 8).unwrap();
        let spike = TrapProfile::spike(1.0).unwrap();
        let empty = sample_bernoulli(&region, 0.0, &spike, &seed(0)).unwrap();
        assert!(empty.values().iter().all(|&v| v == 0.0));
        let full = sample_bernoulli(&region, 1.0, &spike, &seed(0)).unwrap();
        assert!(full.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bernoulli_count_within_binomial_band() {
        let region = BoxRegion::lattice(1, 5000).unwrap();
        let spike = TrapProfile::spike(1.0).unwrap();
        let field = sample_bernoulli(&region, 0.5, &spike, &seed(1)).unwrap();
        let count: f64 = field.values().iter().sum();
        let n: f64 = 10_000.0;
        let sigma = (n * 0.25).sqrt();
        assert!(
            (count - 5000.0).abs() <= 3.0 * sigma,
            "count {count} outside 3 sigma of 5000"
        );
    }

    #[test]
    fn iid_tail_quantile_fixed_points() {
        assert_relative_eq!(iid_tail_quantile((-1.0f64).exp(), 2.7), 1.0, epsilon = 1e-12);
        assert_relative_eq!(iid_tail_quantile((-8.0f64).exp(), 3.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn iid_tail_empirical_cdf_matches_exact_law() {
        let region = BoxRegion::lattice(1, 100_000).unwrap();
        let field = sample_iid_tail(&region, 1.0, &seed(2)).unwrap();
        let n = field.values().len() as f64;
        let frac = field.values().iter().filter(|&&v| v < 1.0).count() as f64 / n;
        let p = (-1.0f64).exp();
        let sigma = (p * (1.0 - p) / n).sqrt();
        assert!((frac - p).abs() <= 3.0 * sigma, "frac {frac} vs {p}");
    }

    #[test]
    fn poisson_empty_and_counts() {
        let region = BoxRegion::lattice(1, 1000).unwrap();
        let spike = TrapProfile::spike(1.0).unwrap();
        let empty = sample_poisson(&region, 0.0, &spike, &seed(3)).unwrap();
        assert!(empty.values().iter().all(|&v| v == 0.0));

        let field = sample_poisson(&region, 2.0, &spike, &seed(3)).unwrap();
        let count: f64 = field.values().iter().sum();
        let mean = 4000.0;
        assert!(
            (count - mean).abs() <= 3.0 * mean.sqrt(),
            "count {count} outside 3 sigma of {mean}"
        );
    }

    #[test]
    fn identical_seed_paths_give_identical_fields() {
        let region = BoxRegion::lattice(2, 16).unwrap();
        let ball = TrapProfile::ball(1.5, f64::INFINITY).unwrap();
        let a = sample_poisson(&region, 0.3, &ball, &seed(4)).unwrap();
        let b = sample_poisson(&region, 0.3, &ball, &seed(4)).unwrap();
        let bits = |f: &PotentialField| -> Vec<u64> {
            f.values().iter().map(|v| v.to_bits()).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = sample_poisson(&region, 0.3, &ball, &seed(5)).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn growing_the_box_extends_the_same_realization() {
        let small = BoxRegion::lattice(2, 6).unwrap();
        let large = BoxRegion::lattice(2, 12).unwrap();
        let spike = TrapProfile::spike(2.5).unwrap();
        let sp = ModelSpec::bernoulli(0.3, spike, 0.5).unwrap();
        let fs = sample(&sp, &small, &seed(6)).unwrap();
        let fl = sample(&sp, &large, &seed(6)).unwrap();
        for z in small.sites() {
            assert_eq!(fs.value(z), fl.value(z), "mismatch at {z:?}");
        }
    }

    #[test]
    fn superpose_examples() {
        let region = BoxRegion::lattice(1, 8).unwrap();
        let empty = superpose(&[], &TrapProfile::spike(1.0).unwrap(), &region).unwrap();
        assert!(empty.values().iter().all(|&v| v == 0.0));

        let two = superpose(
            &[[2.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            &TrapProfile::spike(1.0).unwrap(),
            &region,
        )
        .unwrap();
        assert_eq!(two.value([2, 0, 0]), Some(2.0));

        let ball = TrapProfile::ball(1.0, 1.0).unwrap();
        let field = superpose(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]], &ball, &region).unwrap();
        for z in -8..8i64 {
            let expect = if (-1..=1).contains(&z) || (2..=4).contains(&z) {
                1.0
            } else {
                0.0
            };
            assert_eq!(field.value([z, 0, 0]), Some(expect), "site {z}");
        }
    }

    #[test]
    fn superpose_additivity_on_disjoint_centers() {
        let region = BoxRegion::lattice(1, 16).unwrap();
        let ball = TrapProfile::ball(1.0, 0.7).unwrap();
        let a: Vec<[f64; 3]> = vec![[-10.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let b: Vec<[f64; 3]> = vec![[5.0, 0.0, 0.0], [9.0, 0.0, 0.0]];
        let mut all = a.clone();
        all.extend_from_slice(&b);
        let fa = superpose(&a, &ball, &region).unwrap();
        let fb = superpose(&b, &ball, &region).unwrap();
        let fab = superpose(&all, &ball, &region).unwrap();
        for i in 0..region.site_count() {
            assert_relative_eq!(
                fab.values()[i],
                fa.values()[i] + fb.values()[i],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn hard_profiles_produce_infinities() {
        let region = BoxRegion::lattice(1, 4).unwrap();
        let hard = TrapProfile::ball(1.0, f64::INFINITY).unwrap();
        let field = superpose(&[[0.0, 0.0, 0.0]], &hard, &region).unwrap();
        assert_eq!(field.value([0, 0, 0]), Some(f64::INFINITY));
        assert_eq!(field.value([1, 0, 0]), Some(f64::INFINITY));
        assert_eq!(field.value([2, 0, 0]), Some(0.0));
        assert_eq!(field.active_count(), 8 - 3);
    }

    #[test]
    fn radial_law_exponential_case() {
        // d=1, theta=1: the radial density is exp(-r), mean 1
        let law = RadialLaw::build(1, 1.0, 1e-10).unwrap();
        assert_relative_eq!(law.mean_radius(), 1.0, epsilon = 1e-7);
        assert_relative_eq!(law.cdf(1.0), 1.0 - (-1.0f64).exp(), epsilon = 1e-8);
        assert_relative_eq!(law.quantile(0.5), (2.0f64).ln(), epsilon = 1e-7);
        // density normalizer of (1/2) exp(-|x|) on R
        assert_relative_eq!(law.normalizing_constant(), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn radial_law_rayleigh_case() {
        // d=2, theta=2: radial density r exp(-r^2), mean sqrt(pi)/2
        let law = RadialLaw::build(2, 2.0, 1e-10).unwrap();
        assert_relative_eq!(
            law.mean_radius(),
            std::f64::consts::PI.sqrt() / 2.0,
            epsilon = 1e-7
        );
    }

    #[test]
    fn displacement_moments_match_the_law() {
        let law = RadialLaw::build(1, 1.0, 1e-10).unwrap();
        let mut s = seed(7).stream();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| law.quantile(s.open01())).sum::<f64>() / n as f64;
        // Exp(1) has sigma = 1
        assert!((mean - 1.0).abs() <= 3.0 / (n as f64).sqrt(), "mean {mean}");

        let law2 = RadialLaw::build(2, 2.0, 1e-10).unwrap();
        let mean2: f64 = (0..n).map(|_| law2.quantile(s.open01())).sum::<f64>() / n as f64;
        let expect = std::f64::consts::PI.sqrt() / 2.0;
        // Rayleigh(1/sqrt 2) has variance 1 - pi/4
        let sigma = (1.0 - std::f64::consts::PI / 4.0).sqrt();
        assert!(
            (mean2 - expect).abs() <= 3.0 * sigma / (n as f64).sqrt(),
            "mean {mean2} vs {expect}"
        );
    }

    #[test]
    fn directions_are_isotropic() {
        for d in 1..=3usize {
            let mut s = seed(8 + d as u64).stream();
            let n = 20_000;
            let mut acc = [0.0f64; 3];
            for _ in 0..n {
                let v = s.unit_vector(d);
                for a in 0..3 {
                    acc[a] += v[a];
                }
            }
            let norm = (acc.iter().map(|x| x * x).sum::<f64>()).sqrt() / n as f64;
            assert!(norm < 3.0 / (n as f64).sqrt(), "d={d}: mean norm {norm}");
        }
    }

    #[test]
    fn perturbed_lattice_field_is_deterministic_and_nonnegative() {
        let region = BoxRegion::lattice(1, 12).unwrap();
        let ball = TrapProfile::ball(0.5, 1.0).unwrap();
        let a = sample_perturbed_lattice(&region, 1.0, &ball, &seed(11)).unwrap();
        let b = sample_perturbed_lattice(&region, 1.0, &ball, &seed(11)).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().all(|&v| v >= 0.0));
        // one trap per lattice point with small displacements: the box
        // should see roughly one trap's worth of mass per site
        let total: f64 = a.values().iter().sum();
        assert!(total > 0.0);
    }

    #[test]
    fn binary_roundtrip_preserves_bits_and_header() {
        let region = BoxRegion::new(2, 5, 0.5).unwrap();
        let ball = TrapProfile::ball(1.0, f64::INFINITY).unwrap();
        let field = sample_poisson(&region, 1.0, &ball, &seed(12)).unwrap();
        let mut buf = Vec::new();
        field.write_binary(&mut buf).unwrap();
        let back = PotentialField::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back.region(), field.region());
        assert_eq!(back.provenance(), field.provenance());
        let bits: Vec<u64> = field.values().iter().map(|v| v.to_bits()).collect();
        let bits2: Vec<u64> = back.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits, bits2);
    }

    #[test]
    fn csv_has_row_per_site() {
        let region = BoxRegion::lattice(2, 2).unwrap();
        let field = PotentialField::zero(region);
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 16);
        assert!(text.starts_with("x,y,value"));
    }

    #[test]
    fn two_point_law_is_translation_invariant() {
        // compare empirical (V(x), V(x+e)) histograms at two base points
        let region = BoxRegion::lattice(1, 4).unwrap();
        let spike = TrapProfile::spike(1.0).unwrap();
        let n = 4000;
        let mut cells_a = [0u64; 4];
        let mut cells_b = [0u64; 4];
        for i in 0..n {
            let f = sample_bernoulli(&region, 0.4, &spike, &seed(20).with_realization(i)).unwrap();
            let cell = |x: i64| -> usize {
                let v0 = f.value([x, 0, 0]).unwrap() > 0.5;
                let v1 = f.value([x + 1, 0, 0]).unwrap() > 0.5;
                (v0 as usize) * 2 + v1 as usize
            };
            cells_a[cell(-3)] += 1;
            cells_b[cell(1)] += 1;
        }
        // two-sample chi-square with 3 dof; 16.27 is the 99.9% point
        let mut chi2 = 0.0;
        for k in 0..4 {
            let (na, nb) = (cells_a[k] as f64, cells_b[k] as f64);
            if na + nb > 0.0 {
                chi2 += (na - nb) * (na - nb) / (na + nb);
            }
        }
        assert!(chi2 < 16.27, "chi2 {chi2}");
    }
}
