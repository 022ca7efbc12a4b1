//! Retarded electromagnetic potentials and fields of localized sources.
//!
//! The crate evaluates the retarded four-potential of a current distribution
//! by volume quadrature, derives the magnetic and electric fields from it,
//! evaluates the same field through the curl-of-current volume integral, and
//! evaluates time-domain Kirchhoff surface integrals over spheres so that the
//! decomposition "source term + boundary term = field" can be checked
//! numerically. On top of that sit power-law scaling measurements and
//! finite-difference wave-equation residual checks.
//!
//! Everything works in natural units with `c = 1`; see [`units::UnitSystem`]
//! for conversion at the I/O boundary.

pub mod error;
pub mod field;
pub mod greens;
pub mod kirchhoff;
pub mod parallel;
pub mod quadrature;
pub mod scaling;
pub mod source;
pub mod sphere;
pub mod units;
pub mod validation;

pub use error::{FieldError, Flags, Result};
pub use units::{SpacetimePoint, UnitSystem};

/// Cartesian 3-vector used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;

/// 3×3 tensor. Gradient tensors are stored as `g[(c, k)] = ∂_c F_k`.
pub type Mat3 = nalgebra::Matrix3<f64>;
