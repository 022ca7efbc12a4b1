use std::f64::consts::PI;

use super::{ramped_oscillation, SourceModel, SourceSample, Support, SwitchOn};
use serde::{Deserialize, Serialize};

use crate::quadrature::Coordinates;
use crate::{FieldError, Result, Vec3};

/// Direction of the polarization vector inside the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    #[default]
    Azimuthal,
    Radial,
    Axial,
}

/// Polarization current whose distribution pattern rotates rigidly about the z axis.
///
/// `P(x, t) = A·P₀(r, z)·cos(m(φ − ωt))·ramp(t)·ê` with `j = ∂P/∂t` and,
/// when `bound_charge` is set, `ρ = −∇·P` (so continuity holds exactly).
/// The envelope is `P₀ = b((r − r_c)/Δr)·b(z/h)` with `b(s) = (1 − s²)⁴`,
/// which is C³ at the edges of the annulus. The pattern speed at radius `r`
/// is `ωr`; the source is superluminal when `ω·r_max > c`.
#[derive(Debug, Clone)]
pub struct RotatingPolarizationSource {
    mode: u32,
    omega: f64,
    r_min: f64,
    r_max: f64,
    half_height: f64,
    amplitude: f64,
    polarization: Polarization,
    bound_charge: bool,
    ramp: SwitchOn,
}

impl RotatingPolarizationSource {
    /// Source with unit amplitude, azimuthal polarization, bound charge
    /// included and a switch-on lasting one rotation period.
    pub fn new(mode: u32, omega: f64, r_min: f64, r_max: f64, half_height: f64) -> Result<Self> {
        if mode == 0 {
            return Err(FieldError::InvalidParameter("azimuthal mode must be >= 1".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "annulus needs 0 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if !(half_height > 0.0 && half_height.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "half height must be positive, got {half_height}"
            )));
        }
        Ok(RotatingPolarizationSource {
            mode,
            omega,
            r_min,
            r_max,
            half_height,
            amplitude: 1.0,
            polarization: Polarization::Azimuthal,
            bound_charge: true,
            ramp: SwitchOn::new(0.0, 2.0 * PI / omega)?,
        })
    }

    /// The default desk-scale superluminal configuration: `m = 5`,
    /// `ω·r_max/c = 1.5`, annulus `r ∈ [0.5, 1]`, `|z| ≤ 0.25`.
    pub fn desk_scale() -> Self {
        Self::new(5, 1.5, 0.5, 1.0, 0.25).expect("valid default parameters")
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn with_bound_charge(mut self, bound_charge: bool) -> Self {
        self.bound_charge = bound_charge;
        self
    }

    pub fn with_switch_on(mut self, ramp: SwitchOn) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn switch_on(&self) -> SwitchOn {
        self.ramp
    }

    /// Pattern speed at the outer radius, in units of c.
    pub fn rim_speed(&self) -> f64 {
        self.omega * self.r_max
    }

    pub fn is_superluminal(&self) -> bool {
        self.rim_speed() > 1.0
    }

    /// Rotation period `2π/ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Envelope and its radial/axial derivatives; `None` outside the annulus.
    fn envelope(&self, r: f64, z: f64) -> Option<(f64, f64, f64)> {
        let rc = 0.5 * (self.r_min + self.r_max);
        let dr = 0.5 * (self.r_max - self.r_min);
        let sr = (r - rc) / dr;
        let sz = z / self.half_height;
        if sr.abs() >= 1.0 || sz.abs() >= 1.0 {
            return None;
        }
        let (br, dbr) = bump(sr);
        let (bz, dbz) = bump(sz);
        let a = self.amplitude;
        Some((a * br * bz, a * dbr * bz / dr, a * br * dbz / self.half_height))
    }

    fn wavenumber(&self) -> f64 {
        self.mode as f64 * self.omega
    }

    fn azimuthal_nodes(&self, extent: f64) -> usize {
        let harmonics = self.mode as f64 + (self.wavenumber() * extent).ceil() + 8.0;
        2 * (harmonics as usize + 1)
    }
}

/// `(1 − s²)⁴` and its derivative, for `|s| < 1`.
fn bump(s: f64) -> (f64, f64) {
    let q = 1.0 - s * s;
    let q3 = q * q * q;
    (q3 * q, -8.0 * s * q3)
}

impl SourceModel for RotatingPolarizationSource {
    fn sample(&self, x: &Vec3, t: f64) -> SourceSample {
        if t <= self.ramp.start {
            return SourceSample::ZERO;
        }
        let r = x.x.hypot(x.y);
        let Some((p0, dp0_dr, dp0_dz)) = self.envelope(r, x.z) else {
            return SourceSample::ZERO;
        };
        if r <= 0.0 {
            return SourceSample::ZERO;
        }
        let (cp, sp) = (x.x / r, x.y / r);
        let phi = x.y.atan2(x.x);
        let m = self.mode as f64;
        let (time, dtheta) = ramped_oscillation(self.wavenumber(), m * phi, t, &self.ramp);
        let e = match self.polarization {
            Polarization::Azimuthal => Vec3::new(-sp, cp, 0.0),
            Polarization::Radial => Vec3::new(cp, sp, 0.0),
            Polarization::Axial => Vec3::new(0.0, 0.0, 1.0),
        };
        let mut out = SourceSample::ZERO;
        for k in 0..3 {
            out.current[k] = e * (p0 * time[k + 1]);
        }
        if self.bound_charge {
            for k in 0..3 {
                // ∂_φ of the time factor is m·∂_θ
                let div = match self.polarization {
                    Polarization::Azimuthal => p0 / r * m * dtheta[k],
                    Polarization::Radial => (p0 / r + dp0_dr) * time[k],
                    Polarization::Axial => dp0_dz * time[k],
                };
                out.charge[k] = -div;
            }
        }
        out
    }

    fn curl_current(&self, x: &Vec3, t: f64) -> Option<Vec3> {
        if t <= self.ramp.start {
            return Some(Vec3::zeros());
        }
        let r = x.x.hypot(x.y);
        let Some((p0, dp0_dr, dp0_dz)) = self.envelope(r, x.z) else {
            return Some(Vec3::zeros());
        };
        if r <= 0.0 {
            return Some(Vec3::zeros());
        }
        let (cp, sp) = (x.x / r, x.y / r);
        let phi = x.y.atan2(x.x);
        let m = self.mode as f64;
        let (time, dtheta) = ramped_oscillation(self.wavenumber(), m * phi, t, &self.ramp);
        let (t1, t1_phi) = (time[1], m * dtheta[1]);
        let r_hat = Vec3::new(cp, sp, 0.0);
        let phi_hat = Vec3::new(-sp, cp, 0.0);
        let z_hat = Vec3::new(0.0, 0.0, 1.0);
        // cylindrical curl of f·ê with f = P₀·T₁
        let curl = match self.polarization {
            Polarization::Azimuthal => -dp0_dz * t1 * r_hat + (p0 / r + dp0_dr) * t1 * z_hat,
            Polarization::Radial => dp0_dz * t1 * phi_hat - (p0 / r) * t1_phi * z_hat,
            Polarization::Axial => (p0 / r) * t1_phi * r_hat - dp0_dr * t1 * phi_hat,
        };
        Some(curl)
    }

    fn has_analytic_curl(&self) -> bool {
        true
    }

    fn support(&self) -> Support {
        Support::Cylinder {
            center: Vec3::zeros(),
            r_min: self.r_min,
            r_max: self.r_max,
            half_height: self.half_height,
        }
    }

    fn steady_after(&self) -> f64 {
        self.ramp.end()
    }

    fn active_from(&self) -> f64 {
        self.ramp.start
    }

    fn frequency(&self) -> Option<f64> {
        Some(self.wavenumber())
    }

    fn peak_magnitude(&self) -> f64 {
        self.amplitude.abs() * self.wavenumber()
    }

    fn base_counts(&self, coordinates: Coordinates) -> [usize; 3] {
        let k = self.wavenumber();
        let gl = |extent: f64| ((0.5 * k * extent).ceil() as usize + 6).max(6);
        let radius = self.r_max.hypot(self.half_height);
        match coordinates {
            Coordinates::Cylindrical | Coordinates::Auto => [
                gl(self.r_max - self.r_min),
                self.azimuthal_nodes(self.r_max),
                gl(2.0 * self.half_height),
            ],
            Coordinates::Spherical => [gl(radius) + 10, gl(2.0 * radius) + 12, self.azimuthal_nodes(radius)],
            Coordinates::ObserverCentered => [gl(2.0 * radius) + 16, gl(2.0 * radius) + 16, self.azimuthal_nodes(radius)],
        }
    }
}
