//! Units and spacetime points.
//!
//! All computation runs in natural units with the speed of light fixed to 1
//! and Gaussian source factors (`4π/c`). A [`UnitSystem`] only rescales
//! numbers on their way in or out.

use serde::{Deserialize, Serialize};

use crate::{FieldError, Result, Vec3};

/// Conversion between internal natural units and output units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Output length units per internal length unit.
    pub length: f64,
    /// Output field units per internal field unit.
    pub field: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            length: 1.0,
            field: 1.0,
        }
    }
}

impl UnitSystem {
    /// Speed of light in internal units.
    pub const C: f64 = 1.0;

    pub fn new(length: f64, field: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite() && field > 0.0 && field.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "unit scales must be positive and finite, got length={length}, field={field}"
            )));
        }
        Ok(UnitSystem { length, field })
    }

    pub fn speed_of_light(&self) -> f64 {
        Self::C
    }

    pub fn length_out(&self, internal: f64) -> f64 {
        internal * self.length
    }

    /// Time is measured in length/c, so it scales like length.
    pub fn time_out(&self, internal: f64) -> f64 {
        internal * self.length / Self::C
    }

    pub fn field_out(&self, internal: f64) -> f64 {
        internal * self.field
    }
}

/// An event `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub x: Vec3,
    pub t: f64,
}

impl SpacetimePoint {
    pub fn new(x: Vec3, t: f64) -> Self {
        SpacetimePoint { x, t }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(FieldError::InvalidParameter(format!(
                "non-finite spacetime point ({}, {}, {}; {})",
                self.x.x, self.x.y, self.x.z, self.t
            )))
        }
    }

    /// Point at spherical coordinates `(radius, theta, phi)` about `center`.
    pub fn spherical(center: &Vec3, radius: f64, theta: f64, phi: f64, t: f64) -> Self {
        SpacetimePoint {
            x: center + radius * unit_from_angles(theta, phi),
            t,
        }
    }
}

/// Unit vector for polar angle `theta` (from +z) and azimuth `phi`.
pub fn unit_from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Polar angle and azimuth of a non-zero vector.
pub fn angles_of(v: &Vec3) -> (f64, f64) {
    let r = v.norm();
    ((v.z / r).clamp(-1.0, 1.0).acos(), v.y.atan2(v.x))
}
