//! Far-field power-law measurements: radial sweeps of the period-maximum
//! field, its gradient, beam solid angles and boundary-term ratios, and the
//! log-log regression that turns them into exponents.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use crate::greens::steady_time;
use crate::greens::{Outputs, RetardedIntegrals, RetardedSampler};
use crate::kirchhoff::{decompose_field, Decomposition, SurfaceOptions};
use crate::parallel::{ordered_map, try_ordered_map};
use crate::quadrature::QuadratureSpec;
use crate::source::SourceModel;
use crate::sphere::{Orientation, SphericalBoundary};
use crate::units::{angles_of, unit_from_angles};
use crate::{FieldError, Flags, Mat3, Result, SpacetimePoint, UnitSystem, Vec3};

/// What a sweep measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Field,
    Gradient,
    BoundaryTerm,
    SolidAngle,
    Other,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Field => "field",
            Quantity::Gradient => "gradient",
            Quantity::BoundaryTerm => "boundary_term",
            Quantity::SolidAngle => "solid_angle",
            Quantity::Other => "other",
        }
    }
}

/// Least-squares power law `y = C·R^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub quantity: Quantity,
    pub exponent: f64,
    pub std_error: f64,
    pub r_squared: f64,
    /// 95% confidence interval on the exponent (Student t).
    pub ci_low: f64,
    pub ci_high: f64,
    pub prefactor: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl ScalingReport {
    pub fn with_quantity(mut self, quantity: Quantity) -> Self {
        self.quantity = quantity;
        self
    }

    /// Whether `alpha` lies inside the 95% interval.
    pub fn consistent_with(&self, alpha: f64) -> bool {
        alpha >= self.ci_low && alpha <= self.ci_high
    }
}

/// Ordinary least squares of `ln y` against `ln R`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<ScalingReport> {
    const MIN_POINTS: usize = 4;
    if samples.len() < MIN_POINTS {
        return Err(FieldError::TooFewSamples {
            required: MIN_POINTS,
            got: samples.len(),
        });
    }
    for (index, &(r, y)) in samples.iter().enumerate() {
        if !(y > 0.0) || !y.is_finite() {
            return Err(FieldError::NonPositiveSample { index, value: y });
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(FieldError::InvalidParameter(format!("radius {r} at index {index} must be positive")));
        }
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FieldError::InvalidParameter("all radii are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = n - 2.0;
    let std_error = (sse / dof / sxx).sqrt();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let t = StudentsT::new(0.0, 1.0, dof)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    let (r_min, r_max) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.0), hi.max(s.0)));
    Ok(ScalingReport {
        quantity: Quantity::Other,
        exponent: slope,
        std_error,
        r_squared,
        ci_low: slope - t * std_error,
        ci_high: slope + t * std_error,
        prefactor: intercept.exp(),
        r_min,
        r_max,
        points: samples.len(),
    })
}

/// Flat component view used by [`period_max`].
pub trait Components {
    fn components(&self) -> &[f64];
}

impl Components for Vec3 {
    fn components(&self) -> &[f64] {
        self.as_slice()
    }
}

impl Components for Mat3 {
    fn components(&self) -> &[f64] {
        self.as_slice()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMax {
    pub value: f64,
    pub flags: Flags,
}

/// Maximum over one period of `|f(t)|` (Euclidean/Frobenius norm) for a
/// signal in its steady state.
///
/// A monochromatic signal is `U cos Ωτ + V sin Ωτ`; sampling at `t0` and
/// `t0 + T/4` gives `U` and `V`, and the maximum of `|f|²` is the larger
/// eigenvalue of the 2×2 Gram matrix. A third sample at `t0 + T/8` checks
/// the harmonic model; a mismatch sets [`Flags::TRANSIENT`]. `Ω = 0` takes a
/// single sample.
pub fn period_max<T: Components>(f: impl Fn(f64) -> T, t0: f64, omega: Option<f64>) -> Result<PeriodMax> {
    let omega = omega.ok_or_else(|| {
        FieldError::InvalidParameter("period maximum needs a monochromatic source".into())
    })?;
    let u = f(t0);
    let u = u.components();
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    if omega == 0.0 {
        return Ok(PeriodMax {
            value: norm2(u).sqrt(),
            flags: Flags::empty(),
        });
    }
    let quarter = 0.5 * PI / omega;
    let v = f(t0 + quarter);
    let v = v.components();
    let (uu, vv) = (norm2(u), norm2(v));
    let uv: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let half = 0.5 * (uu + vv);
    let max2 = half + (0.25 * (uu - vv).powi(2) + uv * uv).sqrt();
    let w = f(t0 + 0.5 * quarter);
    let w = w.components();
    let mismatch: f64 = w
        .iter()
        .zip(u.iter().zip(v))
        .map(|(c, (a, b))| (c - (a + b) * std::f64::consts::FRAC_1_SQRT_2).powi(2))
        .sum::<f64>()
        .sqrt();
    let value = max2.sqrt();
    let flags = if mismatch > 1e-6 * value.max(f64::MIN_POSITIVE) {
        Flags::TRANSIENT
    } else {
        Flags::empty()
    };
    Ok(PeriodMax { value, flags })
}

/// Which volume integral feeds a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    #[default]
    FromPotential,
    SourceTermOnly,
}

/// Field being swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    #[default]
    Magnetic,
    Electric,
}

fn outputs_for(pipeline: Pipeline, observable: Observable, gradient: bool) -> Result<Outputs> {
    match (pipeline, observable, gradient) {
        (Pipeline::FromPotential, Observable::Magnetic, false) => Ok(Outputs::MAGNETIC),
        (Pipeline::FromPotential, Observable::Magnetic, true) => Ok(Outputs {
            magnetic_gradient: true,
            ..Outputs::NONE
        }),
        (Pipeline::FromPotential, Observable::Electric, false) => Ok(Outputs {
            electric: true,
            ..Outputs::NONE
        }),
        (Pipeline::FromPotential, Observable::Electric, true) => Ok(Outputs {
            electric_gradient: true,
            ..Outputs::NONE
        }),
        (Pipeline::SourceTermOnly, Observable::Magnetic, false) => Ok(Outputs {
            source_term: true,
            ..Outputs::NONE
        }),
        _ => Err(FieldError::InvalidParameter(
            "the source-term pipeline only provides the magnetic field".into(),
        )),
    }
}

fn field_of(r: &RetardedIntegrals, pipeline: Pipeline, observable: Observable) -> Vec3 {
    match (pipeline, observable) {
        (Pipeline::SourceTermOnly, _) => r.b_source,
        (_, Observable::Magnetic) => r.b,
        (_, Observable::Electric) => r.e,
    }
}

fn gradient_of(r: &RetardedIntegrals, observable: Observable) -> Mat3 {
    match observable {
        Observable::Magnetic => r.grad_b,
        Observable::Electric => r.grad_e,
    }
}

/// Period-maximum magnitude of a field (or its gradient) at `x`.
///
/// Node counts are calibrated at `x` and held fixed over the time samples.
pub fn period_max_at(src: &dyn SourceModel, x: &Vec3, q: &QuadratureSpec, pipeline: Pipeline, observable: Observable, gradient: bool) -> Result<PeriodMax> {
    let outputs = outputs_for(pipeline, observable, gradient)?;
    let t0 = steady_time(src, x);
    let (sampler, ev) = RetardedSampler::calibrated(src, &SpacetimePoint::new(*x, t0), q, outputs)?;
    period_max_with(&sampler, x, t0, pipeline, observable, gradient).map(|mut m| {
        m.flags |= ev.flags & !Flags::TRANSIENT;
        m
    })
}

fn period_max_with(sampler: &RetardedSampler<'_>, x: &Vec3, t0: f64, pipeline: Pipeline, observable: Observable, gradient: bool) -> Result<PeriodMax> {
    let outputs = outputs_for(pipeline, observable, gradient)?;
    let omega = sampler.source().frequency();
    if gradient {
        period_max(|t| gradient_of(&sampler.integrals(x, t, outputs), observable), t0, omega)
    } else {
        period_max(|t| field_of(&sampler.integrals(x, t, outputs), pipeline, observable), t0, omega)
    }
}

/// Radii along one direction from the support center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSweep {
    pub theta: f64,
    pub phi: f64,
    pub radii: Vec<f64>,
}

impl RadialSweep {
    /// `R_j = r0·g^j`, `j = 0..n`.
    pub fn geometric(theta: f64, phi: f64, r0: f64, ratio: f64, n: usize) -> Result<Self> {
        if !(ratio > 1.0 && ratio <= 2.0) {
            return Err(FieldError::InvalidParameter(format!("progression ratio must lie in (1, 2], got {ratio}")));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(FieldError::InvalidParameter(format!("first radius must be positive, got {r0}")));
        }
        let radii = (0..n).map(|j| r0 * ratio.powi(j as i32)).collect();
        let s = RadialSweep { theta, phi, radii };
        s.check_shape()?;
        Ok(s)
    }

    pub fn direction(&self) -> Vec3 {
        unit_from_angles(self.theta, self.phi)
    }

    fn check_shape(&self) -> Result<()> {
        if self.radii.len() < 4 {
            return Err(FieldError::TooFewSamples {
                required: 4,
                got: self.radii.len(),
            });
        }
        if self.radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FieldError::InvalidParameter("sweep radii must be strictly ascending".into()));
        }
        Ok(())
    }

    /// Shape checks plus the far-zone requirement `R ≥ 10 × support radius`.
    pub fn validate(&self, src: &dyn SourceModel) -> Result<()> {
        self.check_shape()?;
        let a = src.support().radius();
        if let Some(&r) = self.radii.first() {
            if r < 10.0 * a {
                return Err(FieldError::InvalidParameter(format!(
                    "sweep radius {r} is below 10 support radii ({})",
                    10.0 * a
                )));
            }
        }
        Ok(())
    }
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
    /// First observation time used.
    pub t: f64,
    pub value: f64,
    pub flags: Flags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub quantity: Quantity,
    pub samples: Vec<SweepSample>,
}

impl SweepResult {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.radius, s.value)).collect()
    }

    pub fn fit(&self) -> Result<ScalingReport> {
        fit_power_law(&self.pairs()).map(|r| r.with_quantity(self.quantity))
    }

    pub fn flags(&self) -> Flags {
        self.samples.iter().fold(Flags::empty(), |f, s| f | s.flags)
    }
}

fn sweep(src: &dyn SourceModel, sw: &RadialSweep, q: &QuadratureSpec, pipeline: Pipeline, observable: Observable, gradient: bool) -> Result<Vec<SweepSample>> {
    sw.validate(src)?;
    let center = src.support().center();
    let dir = sw.direction();
    try_ordered_map(&sw.radii, |&r| {
        let x = center + dir * r;
        let m = period_max_at(src, &x, q, pipeline, observable, gradient)?;
        Ok(SweepSample {
            radius: r,
            theta: sw.theta,
            phi: sw.phi,
            t: steady_time(src, &x),
            value: m.value,
            flags: m.flags,
        })
    })
}

/// Period-maximum `|B|` (or `|E|`) along the sweep ray.
pub fn sweep_field(src: &dyn SourceModel, sw: &RadialSweep, pipeline: Pipeline, observable: Observable, q: &QuadratureSpec) -> Result<SweepResult> {
    Ok(SweepResult {
        quantity: Quantity::Field,
        samples: sweep(src, sw, q, pipeline, observable, false)?,
    })
}

/// Period-maximum Frobenius norm of `∇B` (or `∇E`) along the sweep ray.
pub fn gradient_sweep(src: &dyn SourceModel, sw: &RadialSweep, observable: Observable, q: &QuadratureSpec) -> Result<SweepResult> {
    Ok(SweepResult {
        quantity: Quantity::Gradient,
        samples: sweep(src, sw, q, Pipeline::FromPotential, observable, true)?,
    })
}

/// Direction and value of the largest period-maximum field on a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPeak {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
    pub flags: Flags,
}

/// Period-max `|B|` at many points at one radius, sharing one calibration.
struct SphereMap<'a> {
    sampler: RetardedSampler<'a>,
    center: Vec3,
    radius: f64,
    t0: f64,
    observable: Observable,
}

impl<'a> SphereMap<'a> {
    fn new(src: &'a dyn SourceModel, radius: f64, observable: Observable, q: &QuadratureSpec) -> Result<Self> {
        let center = src.support().center();
        let x = center + Vec3::new(1.0, 1.0, 1.0).normalize() * radius;
        let t0 = steady_time(src, &x);
        let outputs = outputs_for(Pipeline::FromPotential, observable, false)?;
        let (sampler, _) = RetardedSampler::calibrated(src, &SpacetimePoint::new(x, t0), q, outputs)?;
        Ok(SphereMap {
            sampler,
            center,
            radius,
            t0,
            observable,
        })
    }

    fn at_direction(&self, n: &Vec3) -> PeriodMax {
        let x = self.center + n * self.radius;
        period_max_with(&self.sampler, &x, self.t0, Pipeline::FromPotential, self.observable, false)
            .expect("monochromatic source checked at construction")
    }

    fn at(&self, theta: f64, phi: f64) -> f64 {
        self.at_direction(&unit_from_angles(theta, phi)).value
    }
}

fn check_monochromatic(src: &dyn SourceModel) -> Result<()> {
    match src.frequency() {
        Some(_) => Ok(()),
        None => Err(FieldError::InvalidParameter("beam mapping needs a monochromatic source".into())),
    }
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coarse full-sphere scan (geodesic mesh of the given level) followed by
/// golden-section refinement in `θ` and then `φ`, repeated twice.
pub fn beam_peak_search(src: &dyn SourceModel, radius: f64, level: u32, observable: Observable, q: &QuadratureSpec) -> Result<BeamPeak> {
    check_monochromatic(src)?;
    let map = SphereMap::new(src, radius, observable, q)?;
    let mesh = SphericalBoundary::geodesic(Vec3::zeros(), 1.0, level, Orientation::Outward)?;
    let values = ordered_map(mesh.nodes(), |n| map.at_direction(&n.x));
    let (best, flags) = values
        .iter()
        .enumerate()
        .fold((0usize, Flags::empty()), |(bi, f), (i, v)| {
            (if v.value > values[bi].value { i } else { bi }, f | v.flags)
        });
    let (mut theta, mut phi) = angles_of(&mesh.nodes()[best].x);
    let mut value = values[best].value;
    // cell size of the scan mesh
    let step = (4.0 * PI / mesh.len() as f64).sqrt() * 1.5;
    let mut width = step;
    for _ in 0..2 {
        let lo = (theta - width).max(0.0);
        let hi = (theta + width).min(PI);
        let (t, v) = golden_max(|t| map.at(t, phi), lo, hi, 30);
        if v > value {
            theta = t;
            value = v;
        }
        let dphi = if theta.sin() > 1e-6 { width / theta.sin() } else { PI };
        let dphi = dphi.min(PI);
        let (p, v) = golden_max(|p| map.at(theta, p), phi - dphi, phi + dphi, 30);
        if v > value {
            phi = p;
            value = v;
        }
        width *= 0.25;
    }
    Ok(BeamPeak { theta, phi, value, flags })
}

/// Solid angle of the region where the period-max field is at least
/// `threshold` × its maximum over the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidAngle {
    pub steradians: f64,
    pub cells: usize,
    pub peak: f64,
    pub flags: Flags,
}

/// Minimum mesh cells inside a measured beam.
pub const MIN_BEAM_CELLS: usize = 16;

/// Solid angle above threshold for values given at the nodes of `mesh`.
pub fn solid_angle_of_map(mesh: &SphericalBoundary, values: &[f64], threshold: f64) -> Result<SolidAngle> {
    if values.len() != mesh.len() {
        return Err(FieldError::InvalidParameter(format!(
            "{} values for a mesh of {} nodes",
            values.len(),
            mesh.len()
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(FieldError::InvalidParameter(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let r2 = mesh.radius() * mesh.radius();
    let mut area = 0.0;
    let mut cells = 0;
    for (node, &v) in mesh.nodes().iter().zip(values) {
        if peak > 0.0 && v >= threshold * peak {
            area += node.w;
            cells += 1;
        }
    }
    if cells < MIN_BEAM_CELLS {
        return Err(FieldError::BeamUnderResolved {
            cells,
            required: MIN_BEAM_CELLS,
        });
    }
    Ok(SolidAngle {
        steradians: area / r2,
        cells,
        peak,
        flags: Flags::empty(),
    })
}

/// Beam solid angle of `src` at radius `radius`, mapped on `mesh`'s node
/// directions (the mesh radius is irrelevant).
pub fn beam_solid_angle(src: &dyn SourceModel, radius: f64, threshold: f64, mesh: &SphericalBoundary, observable: Observable, q: &QuadratureSpec) -> Result<SolidAngle> {
    check_monochromatic(src)?;
    let map = SphereMap::new(src, radius, observable, q)?;
    let c = mesh.center();
    let values = ordered_map(mesh.nodes(), |n| map.at_direction(&(n.x - c).normalize()));
    let flags = values.iter().fold(Flags::empty(), |f, v| f | v.flags);
    let plain: Vec<f64> = values.iter().map(|v| v.value).collect();
    let mut out = solid_angle_of_map(mesh, &plain, threshold)?;
    out.flags = flags;
    Ok(out)
}

/// Solid angles at each sweep radius.
pub fn solid_angle_sweep(src: &dyn SourceModel, radii: &[f64], threshold: f64, mesh: &SphericalBoundary, q: &QuadratureSpec) -> Result<SweepResult> {
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let s = beam_solid_angle(src, r, threshold, mesh, Observable::Magnetic, q)?;
        samples.push(SweepSample {
            radius: r,
            theta: f64::NAN,
            phi: f64::NAN,
            t: steady_time(src, &(src.support().center() + Vec3::x() * r)),
            value: s.steradians,
            flags: s.flags,
        });
    }
    Ok(SweepResult {
        quantity: Quantity::SolidAngle,
        samples,
    })
}

/// Decompositions on boundary spheres of the given radii about the support
/// center, each observed at `fraction × R` along the sweep direction at
/// the steady time of its farthest boundary node.
pub fn boundary_term_sweep(
    src: &dyn SourceModel,
    theta: f64,
    phi: f64,
    radii: &[f64],
    fraction: f64,
    q: &QuadratureSpec,
    opts: &SurfaceOptions,
) -> Result<Vec<Decomposition>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(FieldError::InvalidParameter(format!("observer fraction must lie in (0, 1), got {fraction}")));
    }
    let support = src.support();
    let center = support.center();
    let dir = unit_from_angles(theta, phi);
    let k = src.frequency().unwrap_or(0.0) / UnitSystem::C;
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let x = center + dir * (fraction * r);
        let t = steady_time(src, &x) + 2.0 * r / UnitSystem::C;
        let p = SpacetimePoint::new(x, t);
        let bnd = SphericalBoundary::for_observer(center, r, &x, k, support.radius(), Orientation::Outward)?;
        out.push(decompose_field(src, &p, &bnd, q, opts)?);
    }
    Ok(out)
}
