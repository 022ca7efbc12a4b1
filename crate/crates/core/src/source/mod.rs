//! Source models: localized charge and current densities `(ρ, j)`.
//!
//! Every model is switched on at some time `t0 ≥ 0` and is identically zero
//! before, so retarded fields start from null initial data. Models report
//! their own time derivatives analytically; the retarded-field kernels need
//! `j`, `∂j/∂t` and `∂²j/∂t²` (and likewise for `ρ`).

mod blob;
mod dipole;
mod rotating;

use std::fmt;
use std::sync::Arc;

pub use blob::StaticChargeBlob;
pub use dipole::HertzianDipoleSource;
pub use rotating::{Polarization, RotatingPolarizationSource};

use crate::quadrature::Coordinates;
use crate::{FieldError, Result, SpacetimePoint, Vec3};

/// Charge and current density at one event, with their first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSample {
    /// `ρ, ∂ρ/∂t, ∂²ρ/∂t²` (ρ = j⁰/c).
    pub charge: [f64; 3],
    /// `j, ∂j/∂t, ∂²j/∂t²`.
    pub current: [Vec3; 3],
}

impl SourceSample {
    pub const ZERO: SourceSample = SourceSample {
        charge: [0.0; 3],
        current: [Vec3::new(0.0, 0.0, 0.0); 3],
    };

    pub fn is_zero(&self) -> bool {
        self.charge.iter().all(|&c| c == 0.0) && self.current.iter().all(|j| j.iter().all(|&v| v == 0.0))
    }
}

/// Region outside of which a source vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    Ball {
        center: Vec3,
        radius: f64,
    },
    /// Annular cylinder about the z axis through `center`.
    Cylinder {
        center: Vec3,
        r_min: f64,
        r_max: f64,
        half_height: f64,
    },
}

impl Support {
    pub fn is_empty(&self) -> bool {
        matches!(self, Support::Empty)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        match *self {
            Support::Empty => false,
            Support::Ball { center, radius } => (x - center).norm() <= radius,
            Support::Cylinder {
                center,
                r_min,
                r_max,
                half_height,
            } => {
                let d = x - center;
                let r = d.x.hypot(d.y);
                r >= r_min && r <= r_max && d.z.abs() <= half_height
            }
        }
    }

    /// Smallest ball (about the natural center) that contains the support.
    pub fn bounding_ball(&self) -> Option<(Vec3, f64)> {
        match *self {
            Support::Empty => None,
            Support::Ball { center, radius } => Some((center, radius)),
            Support::Cylinder {
                center,
                r_max,
                half_height,
                ..
            } => Some((center, r_max.hypot(half_height))),
        }
    }

    /// Radius of the bounding ball, 0 for an empty support.
    pub fn radius(&self) -> f64 {
        self.bounding_ball().map_or(0.0, |(_, r)| r)
    }

    pub fn center(&self) -> Vec3 {
        self.bounding_ball().map_or(Vec3::zeros(), |(c, _)| c)
    }

    /// Euclidean distance from `x` to the support (0 inside, infinite when empty).
    pub fn distance_to(&self, x: &Vec3) -> f64 {
        match *self {
            Support::Empty => f64::INFINITY,
            Support::Ball { center, radius } => ((x - center).norm() - radius).max(0.0),
            Support::Cylinder {
                center,
                r_min,
                r_max,
                half_height,
            } => {
                let d = x - center;
                let r = d.x.hypot(d.y);
                let dr = if r < r_min {
                    r_min - r
                } else if r > r_max {
                    r - r_max
                } else {
                    0.0
                };
                let dz = (d.z.abs() - half_height).max(0.0);
                dr.hypot(dz)
            }
        }
    }

    /// Smallest ball containing both supports.
    pub fn union(&self, other: &Support) -> Support {
        match (self.bounding_ball(), other.bounding_ball()) {
            (None, None) => Support::Empty,
            (Some(_), None) => *self,
            (None, Some(_)) => *other,
            (Some((c1, r1)), Some((c2, r2))) => {
                let d = (c2 - c1).norm();
                if d + r2 <= r1 {
                    return Support::Ball { center: c1, radius: r1 };
                }
                if d + r1 <= r2 {
                    return Support::Ball { center: c2, radius: r2 };
                }
                let radius = 0.5 * (d + r1 + r2);
                let center = c1 + (c2 - c1) * ((radius - r1) / d);
                Support::Ball { center, radius }
            }
        }
    }
}

/// C² switch-on ramp: 0 before `start`, quintic smoothstep over `duration`, 1 after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchOn {
    pub start: f64,
    pub duration: f64,
}

impl SwitchOn {
    pub fn new(start: f64, duration: f64) -> Result<Self> {
        if !(start >= 0.0 && start.is_finite() && duration >= 0.0 && duration.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "switch-on needs start >= 0 and duration >= 0, got start={start}, duration={duration}"
            )));
        }
        Ok(SwitchOn { start, duration })
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Ramp value and its first three time derivatives.
    pub fn derivatives(&self, t: f64) -> [f64; 4] {
        if t <= self.start {
            return [0.0; 4];
        }
        if t >= self.end() {
            return [1.0, 0.0, 0.0, 0.0];
        }
        let tau = self.duration;
        let u = (t - self.start) / tau;
        let u2 = u * u;
        [
            u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
            30.0 * u2 * (1.0 - 2.0 * u + u2) / tau,
            60.0 * u * (1.0 - 3.0 * u + 2.0 * u2) / (tau * tau),
            60.0 * (1.0 - 6.0 * u + 6.0 * u2) / (tau * tau * tau),
        ]
    }
}

/// Time derivatives (orders 0..=3) of `cos(Ωt − θ)·ramp(t)` and of its
/// derivative with respect to the phase offset `θ`.
pub(crate) fn ramped_oscillation(omega: f64, theta: f64, t: f64, ramp: &SwitchOn) -> ([f64; 4], [f64; 4]) {
    let r = ramp.derivatives(t);
    if r == [0.0; 4] {
        return ([0.0; 4], [0.0; 4]);
    }
    let (s, c) = (omega * t - theta).sin_cos();
    let w2 = omega * omega;
    // d^k/dt^k cos(x) = Ω^k cos(x + kπ/2); d^k/dt^k sin(x) = Ω^k sin(x + kπ/2)
    let cos_d = [c, -omega * s, -w2 * c, w2 * omega * s];
    // ∂/∂θ cos(Ωt − θ) = sin(Ωt − θ)
    let sin_d = [s, omega * c, -w2 * s, -w2 * omega * c];
    const BINOM: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0],
        [1.0, 3.0, 3.0, 1.0],
    ];
    let mut value = [0.0; 4];
    let mut dtheta = [0.0; 4];
    for n in 0..4 {
        for k in 0..=n {
            value[n] += BINOM[n][k] * cos_d[k] * r[n - k];
            dtheta[n] += BINOM[n][k] * sin_d[k] * r[n - k];
        }
    }
    (value, dtheta)
}

/// A localized charge/current distribution.
///
/// Implementations are immutable after construction and safe to evaluate
/// from any number of threads.
pub trait SourceModel: Send + Sync + fmt::Debug {
    /// `(ρ, j)` and their first two time derivatives at `(x, t)`.
    fn sample(&self, x: &Vec3, t: f64) -> SourceSample;

    /// Analytic `∇×j`, when the model provides one.
    fn curl_current(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        None
    }

    fn has_analytic_curl(&self) -> bool {
        false
    }

    fn support(&self) -> Support;

    /// Time after which the source is in its steady (periodic or static) state.
    fn steady_after(&self) -> f64;

    /// The source vanishes identically for `t <= active_from()`;
    /// `-∞` for sources that have always existed.
    fn active_from(&self) -> f64 {
        0.0
    }

    /// Steady-state angular frequency, `Some(0.0)` for static sources, `None` if not monochromatic.
    fn frequency(&self) -> Option<f64>;

    /// Upper bound on `|j|` and `|ρ|`, used to normalize residuals.
    fn peak_magnitude(&self) -> f64;

    /// Starting node counts for the given volume coordinates.
    fn base_counts(&self, coordinates: Coordinates) -> [usize; 3];

    /// Natural volume coordinates for points away from the support.
    fn preferred_coordinates(&self) -> Coordinates {
        match self.support() {
            Support::Cylinder { .. } => Coordinates::Cylindrical,
            _ => Coordinates::Spherical,
        }
    }

    /// Radiated wavelength `2πc/Ω` in the steady state, if oscillating.
    fn wavelength(&self) -> Option<f64> {
        match self.frequency() {
            Some(w) if w > 0.0 => Some(2.0 * std::f64::consts::PI / w),
            _ => None,
        }
    }
}

/// The source that is zero everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSource;

impl SourceModel for ZeroSource {
    fn sample(&self, _x: &Vec3, _t: f64) -> SourceSample {
        SourceSample::ZERO
    }
    fn curl_current(&self, _x: &Vec3, _t: f64) -> Option<Vec3> {
        Some(Vec3::zeros())
    }
    fn has_analytic_curl(&self) -> bool {
        true
    }
    fn support(&self) -> Support {
        Support::Empty
    }
    fn steady_after(&self) -> f64 {
        0.0
    }
    fn frequency(&self) -> Option<f64> {
        Some(0.0)
    }
    fn peak_magnitude(&self) -> f64 {
        0.0
    }
    fn base_counts(&self, _coordinates: Coordinates) -> [usize; 3] {
        [2, 2, 2]
    }
}

/// Sum of several sources.
#[derive(Debug, Clone)]
pub struct Superposition {
    parts: Vec<Arc<dyn SourceModel>>,
}

impl Superposition {
    pub fn new(parts: Vec<Arc<dyn SourceModel>>) -> Self {
        Superposition { parts }
    }
}

impl SourceModel for Superposition {
    fn sample(&self, x: &Vec3, t: f64) -> SourceSample {
        let mut acc = SourceSample::ZERO;
        for p in &self.parts {
            let s = p.sample(x, t);
            for k in 0..3 {
                acc.charge[k] += s.charge[k];
                acc.current[k] += s.current[k];
            }
        }
        acc
    }

    fn curl_current(&self, x: &Vec3, t: f64) -> Option<Vec3> {
        self.parts
            .iter()
            .try_fold(Vec3::zeros(), |acc, p| p.curl_current(x, t).map(|c| acc + c))
    }

    fn has_analytic_curl(&self) -> bool {
        self.parts.iter().all(|p| p.has_analytic_curl())
    }

    fn support(&self) -> Support {
        let s = self
            .parts
            .iter()
            .fold(Support::Empty, |acc, p| acc.union(&p.support()));
        // a lone part keeps its own shape; a union is always reported as a ball
        match (self.parts.len(), s) {
            (1, s) => s,
            (_, Support::Empty) => Support::Empty,
            (_, s) => {
                let (center, radius) = s.bounding_ball().unwrap();
                Support::Ball { center, radius }
            }
        }
    }

    fn steady_after(&self) -> f64 {
        self.parts.iter().map(|p| p.steady_after()).fold(0.0, f64::max)
    }

    fn active_from(&self) -> f64 {
        self.parts
            .iter()
            .filter(|p| !p.support().is_empty())
            .map(|p| p.active_from())
            .fold(f64::INFINITY, f64::min)
    }

    fn frequency(&self) -> Option<f64> {
        let mut freq: Option<f64> = None;
        for p in &self.parts {
            if p.support().is_empty() {
                continue;
            }
            let f = p.frequency()?;
            match freq {
                None => freq = Some(f),
                Some(g) if (g - f).abs() <= 1e-12 * g.abs().max(1.0) => {}
                Some(_) => return None,
            }
        }
        Some(freq.unwrap_or(0.0))
    }

    fn peak_magnitude(&self) -> f64 {
        self.parts.iter().map(|p| p.peak_magnitude()).sum()
    }

    fn base_counts(&self, coordinates: Coordinates) -> [usize; 3] {
        self.parts.iter().fold([2, 2, 2], |acc, p| {
            let c = p.base_counts(coordinates);
            [acc[0].max(c[0]), acc[1].max(c[1]), acc[2].max(c[2])]
        })
    }

    fn preferred_coordinates(&self) -> Coordinates {
        match self.parts.as_slice() {
            [only] => only.preferred_coordinates(),
            _ => Coordinates::Spherical,
        }
    }
}

/// Current density `j(x, t)`; zero outside the support and before switch-on.
pub fn eval_current(src: &dyn SourceModel, p: &SpacetimePoint) -> Vec3 {
    src.sample(&p.x, p.t).current[0]
}

/// `∇×j` at `p`: analytic when available, otherwise a central difference
/// with step `fallback_step`.
pub fn eval_curl_current(src: &dyn SourceModel, p: &SpacetimePoint, fallback_step: Option<f64>) -> Result<Vec3> {
    if let Some(c) = src.curl_current(&p.x, p.t) {
        return Ok(c);
    }
    let h = match fallback_step {
        Some(h) if h > 0.0 => h,
        Some(h) => {
            return Err(FieldError::InvalidParameter(format!(
                "finite-difference curl step must be positive, got {h}"
            )))
        }
        None => return Err(FieldError::CurlUnavailable),
    };
    Ok(curl_by_differences(src, &p.x, p.t, h))
}

/// Second-order central-difference curl of the current density.
pub fn curl_by_differences(src: &dyn SourceModel, x: &Vec3, t: f64, h: f64) -> Vec3 {
    let mut jac = [[0.0; 3]; 3]; // jac[a][b] = ∂_a j_b
    for a in 0..3 {
        let mut dx = Vec3::zeros();
        dx[a] = h;
        let jp = src.sample(&(x + dx), t).current[0];
        let jm = src.sample(&(x - dx), t).current[0];
        let d = (jp - jm) / (2.0 * h);
        for b in 0..3 {
            jac[a][b] = d[b];
        }
    }
    Vec3::new(jac[1][2] - jac[2][1], jac[2][0] - jac[0][2], jac[0][1] - jac[1][0])
}

/// Region containing every point where the source can be nonzero.
pub fn support_bounds(src: &dyn SourceModel) -> Support {
    src.support()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_is_zero_before_start_and_one_after() {
        let r = SwitchOn::new(1.0, 2.0).unwrap();
        assert_eq!(r.derivatives(1.0), [0.0; 4]);
        assert_eq!(r.derivatives(-3.0), [0.0; 4]);
        assert_eq!(r.derivatives(3.0), [1.0, 0.0, 0.0, 0.0]);
        let mid = r.derivatives(2.0);
        assert!((mid[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ramp_derivatives_match_differences() {
        let r = SwitchOn::new(0.5, 1.7).unwrap();
        let h = 1e-5;
        for &t in &[0.7, 1.1, 1.6, 2.0] {
            let d = r.derivatives(t);
            for k in 0..3 {
                let fd = (r.derivatives(t + h)[k] - r.derivatives(t - h)[k]) / (2.0 * h);
                assert!((fd - d[k + 1]).abs() < 1e-6 * (1.0 + d[k + 1].abs()), "order {k} at {t}");
            }
        }
    }

    #[test]
    fn step_ramp_with_zero_duration() {
        let r = SwitchOn::new(0.0, 0.0).unwrap();
        assert_eq!(r.derivatives(0.0), [0.0; 4]);
        assert_eq!(r.derivatives(1e-9), [1.0, 0.0, 0.0, 0.0]);
        assert!(SwitchOn::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn oscillation_derivatives_match_differences() {
        let ramp = SwitchOn::new(0.0, 2.0).unwrap();
        let (w, th) = (3.1, 0.4);
        let h = 1e-5;
        for &t in &[0.3, 1.2, 2.5] {
            let (v, d) = ramped_oscillation(w, th, t, &ramp);
            for k in 0..3 {
                let fd = (ramped_oscillation(w, th, t + h, &ramp).0[k] - ramped_oscillation(w, th, t - h, &ramp).0[k]) / (2.0 * h);
                assert!((fd - v[k + 1]).abs() < 1e-5 * (1.0 + v[k + 1].abs()));
            }
            let fd = (ramped_oscillation(w, th + h, t, &ramp).0[0] - ramped_oscillation(w, th - h, t, &ramp).0[0]) / (2.0 * h);
            assert!((fd - d[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn support_distance_and_union() {
        let cyl = Support::Cylinder {
            center: Vec3::zeros(),
            r_min: 0.5,
            r_max: 1.0,
            half_height: 0.25,
        };
        assert_eq!(cyl.distance_to(&Vec3::new(0.75, 0.0, 0.0)), 0.0);
        assert!((cyl.distance_to(&Vec3::new(0.0, 0.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((cyl.distance_to(&Vec3::new(4.0, 0.0, 4.25)) - 5.0).abs() < 1e-12);
        let a = Support::Ball { center: Vec3::zeros(), radius: 1.0 };
        let b = Support::Ball { center: Vec3::new(4.0, 0.0, 0.0), radius: 1.0 };
        let u = a.union(&b);
        assert_eq!(u.bounding_ball().unwrap().1, 3.0);
        assert!((u.center() - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(Support::Empty.union(&Support::Empty), Support::Empty);
    }

    #[test]
    fn zero_source_is_zero() {
        let p = SpacetimePoint::new(Vec3::new(0.1, 0.2, 0.3), 5.0);
        assert_eq!(eval_current(&ZeroSource, &p), Vec3::zeros());
        assert!(support_bounds(&ZeroSource).is_empty());
    }
}
