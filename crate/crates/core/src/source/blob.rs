use std::f64::consts::PI;

use super::dipole::TAIL_LEVEL;
use super::{SourceModel, SourceSample, Support};
use crate::quadrature::Coordinates;
use crate::{FieldError, Result, Vec3};

/// Static Gaussian charge blob with no current.
///
/// Exists for all times (it carries no current, so there is nothing to switch
/// on); its exterior potential is exactly Coulomb's `q/R`.
#[derive(Debug, Clone)]
pub struct StaticChargeBlob {
    charge: f64,
    sigma: f64,
    center: Vec3,
    norm: f64,
}

impl StaticChargeBlob {
    pub fn new(charge: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !charge.is_finite() {
            return Err(FieldError::InvalidParameter("charge must be finite".into()));
        }
        let mut blob = StaticChargeBlob {
            charge,
            sigma,
            center: Vec3::zeros(),
            norm: 1.0,
        };
        blob.norm = 1.0 / blob.truncated_mass();
        Ok(blob)
    }

    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn truncation_radius(&self) -> f64 {
        self.sigma * (-2.0 * TAIL_LEVEL.ln()).sqrt()
    }

    /// `∫ exp(−r²/2σ²) d³x` over the truncated ball, in closed form.
    fn truncated_mass(&self) -> f64 {
        let s = self.sigma;
        let a = self.truncation_radius();
        let u = a / (s * 2f64.sqrt());
        // 4π ∫₀ᵃ r² e^{−r²/2σ²} dr = (2πσ²)^{3/2} erf(u) − 4πσ² a e^{−u²}
        (2.0 * PI * s * s).powf(1.5) * erf(u) - 4.0 * PI * s * s * a * (-u * u).exp()
    }
}

fn erf(u: f64) -> f64 {
    1.0 - statrs::function::erf::erfc(u)
}

impl SourceModel for StaticChargeBlob {
    fn sample(&self, x: &Vec3, _t: f64) -> SourceSample {
        let d = x - self.center;
        let a = self.truncation_radius();
        let r2 = d.norm_squared();
        if r2 >= a * a {
            return SourceSample::ZERO;
        }
        let rho = self.charge * self.norm * (-0.5 * r2 / (self.sigma * self.sigma)).exp();
        SourceSample {
            charge: [rho, 0.0, 0.0],
            current: [Vec3::zeros(); 3],
        }
    }

    fn curl_current(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::zeros())
    }

    fn has_analytic_curl(&self) -> bool {
        true
    }

    fn support(&self) -> Support {
        Support::Ball {
            center: self.center,
            radius: self.truncation_radius(),
        }
    }

    fn steady_after(&self) -> f64 {
        0.0
    }

    fn active_from(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn frequency(&self) -> Option<f64> {
        Some(0.0)
    }

    fn peak_magnitude(&self) -> f64 {
        (self.charge * self.norm).abs()
    }

    fn base_counts(&self, coordinates: Coordinates) -> [usize; 3] {
        match coordinates {
            Coordinates::ObserverCentered => [40, 24, 24],
            _ => [24, 8, 8],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_current_ever() {
        let b = StaticChargeBlob::new(1.0, 0.1).unwrap();
        let s = b.sample(&Vec3::new(0.05, 0.0, 0.0), -4.0);
        assert_eq!(s.current, [Vec3::zeros(); 3]);
        assert!(s.charge[0] > 0.0);
        assert!(b.sample(&Vec3::new(1.0, 0.0, 0.0), 0.0).is_zero());
    }

    #[test]
    fn normalization_is_total_charge() {
        // radial midpoint sum of the density reproduces q
        let b = StaticChargeBlob::new(2.5, 0.2).unwrap();
        let a = b.truncation_radius();
        let n = 20000;
        let dr = a / n as f64;
        let total: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) * dr;
                4.0 * PI * r * r * b.sample(&Vec3::new(r, 0.0, 0.0), 0.0).charge[0] * dr
            })
            .sum();
        assert!((total / 2.5 - 1.0).abs() < 1e-7);
    }
}
