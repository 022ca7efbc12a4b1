use std::f64::consts::PI;

use super::{ramped_oscillation, SourceModel, SourceSample, Support, SwitchOn};
use crate::quadrature::Coordinates;
use crate::{FieldError, Result, Vec3};

/// Envelope tail level at the truncation radius, relative to the peak.
pub(crate) const TAIL_LEVEL: f64 = 1e-12;

/// Oscillating electric dipole smeared over a truncated Gaussian.
///
/// `P(x, t) = p(t)·g(x)` with `p(t) = p₀·sin(ω_d t)·ramp(t)·â` and `g` a unit
/// Gaussian of width σ cut off where it falls below `10⁻¹²` of its peak.
/// The current is `j = ṗ·g` and the charge `ρ = −p·∇g`, so continuity holds.
#[derive(Debug, Clone)]
pub struct HertzianDipoleSource {
    moment: f64,
    omega: f64,
    sigma: f64,
    axis: Vec3,
    center: Vec3,
    ramp: SwitchOn,
}

impl HertzianDipoleSource {
    /// z-directed dipole at the origin, switched on over one period.
    pub fn new(moment: f64, omega: f64, sigma: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !moment.is_finite() {
            return Err(FieldError::InvalidParameter("dipole moment must be finite".into()));
        }
        Ok(HertzianDipoleSource {
            moment,
            omega,
            sigma,
            axis: Vec3::new(0.0, 0.0, 1.0),
            center: Vec3::zeros(),
            ramp: SwitchOn::new(0.0, 2.0 * PI / omega)?,
        })
    }

    /// Unit-wavelength dipole (`ω = 2π`) with σ = 0.05.
    pub fn unit_wavelength() -> Self {
        Self::new(1.0, 2.0 * PI, 0.05).expect("valid default parameters")
    }

    pub fn with_axis(mut self, axis: Vec3) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(FieldError::InvalidParameter("dipole axis must be non-zero".into()));
        }
        self.axis = axis / n;
        Ok(self)
    }

    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    pub fn with_switch_on(mut self, ramp: SwitchOn) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    /// Radius beyond which the envelope is below the tail level.
    pub fn truncation_radius(&self) -> f64 {
        self.sigma * (-2.0 * TAIL_LEVEL.ln()).sqrt()
    }

    fn envelope(&self, d: &Vec3) -> Option<f64> {
        let r2 = d.norm_squared();
        let a = self.truncation_radius();
        if r2 >= a * a {
            return None;
        }
        let s2 = self.sigma * self.sigma;
        Some((2.0 * PI * s2).powf(-1.5) * (-0.5 * r2 / s2).exp())
    }
}

impl SourceModel for HertzianDipoleSource {
    fn sample(&self, x: &Vec3, t: f64) -> SourceSample {
        if t <= self.ramp.start {
            return SourceSample::ZERO;
        }
        let d = x - self.center;
        let Some(g) = self.envelope(&d) else {
            return SourceSample::ZERO;
        };
        let (time, _) = ramped_oscillation(self.omega, 0.5 * PI, t, &self.ramp);
        let along = self.axis.dot(&d) / (self.sigma * self.sigma);
        let mut out = SourceSample::ZERO;
        for k in 0..3 {
            out.current[k] = self.axis * (self.moment * time[k + 1] * g);
            out.charge[k] = self.moment * time[k] * along * g;
        }
        out
    }

    fn curl_current(&self, x: &Vec3, t: f64) -> Option<Vec3> {
        if t <= self.ramp.start {
            return Some(Vec3::zeros());
        }
        let d = x - self.center;
        let Some(g) = self.envelope(&d) else {
            return Some(Vec3::zeros());
        };
        let (time, _) = ramped_oscillation(self.omega, 0.5 * PI, t, &self.ramp);
        // ∇×(g·ṗ) = ∇g × ṗ with ∇g = −g·d/σ²
        let grad_g = d * (-g / (self.sigma * self.sigma));
        Some(grad_g.cross(&(self.axis * (self.moment * time[1]))))
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
        self.ramp.end()
    }

    fn active_from(&self) -> f64 {
        self.ramp.start
    }

    fn frequency(&self) -> Option<f64> {
        Some(self.omega)
    }

    fn peak_magnitude(&self) -> f64 {
        let g0 = (2.0 * PI * self.sigma * self.sigma).powf(-1.5);
        self.moment.abs() * self.omega * g0
    }

    fn base_counts(&self, coordinates: Coordinates) -> [usize; 3] {
        let ka = (self.omega * self.truncation_radius()).ceil() as usize;
        match coordinates {
            Coordinates::ObserverCentered => [40, 24 + ka, 24 + 2 * ka],
            _ => [24, 10 + ka, 12 + 2 * ka],
        }
    }
}
