//! Numerical laboratory for a diffusing particle among random traps.
//!
//! The operator under study is `H = -kappa * Laplacian + V` on finite lattice
//! boxes, where `V` is a nonnegative random potential built from one of four
//! trap models (Bernoulli sites, i.i.d. heavy-lower-tail values, Poisson
//! clouds, perturbed-lattice clouds). The crate provides:
//!
//! * reproducible samplers for the four models ([`random_media`]),
//! * sparse assembly of the operator with Dirichlet or Neumann boundary
//!   conditions and low-lying eigensolvers ([`hamiltonian`], [`eigen`]),
//! * integrated-density-of-states estimation, Dirichlet/Neumann bracketing
//!   bounds, an exact 1D hard-trap series, and Lifshitz-exponent fits
//!   ([`ids`]),
//! * survival probabilities of the killed walk computed three ways —
//!   eigen-expansion lower bounds, Feynman-Kac Monte Carlo, and spectral
//!   upper bounds — plus the scaling analysis ([`survival`]),
//! * statistical checkers for the moment and short-range-correlation
//!   hypotheses ([`assumptions`]).
//!
//! Everything is deterministic given a [`rng::SeedPath`]: fields are keyed
//! per site (or per cell / lattice point), so the same seed yields the same
//! realization regardless of box size or thread count.

// `!(x > 0.0)` in validations rejects NaN, which `x <= 0.0` would accept;
// indexed loops across a fixed small dimension follow the stencil math.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod assumptions;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod ids;
pub mod numeric;
pub mod random_media;
pub mod rng;
pub mod survival;

pub use error::{Error, Result};
pub use geometry::{BoxRegion, SiteBox};
pub use random_media::{ModelSpec, ModelVariant, PotentialField, TrapProfile};
pub use rng::{SeedPath, StreamTag};
