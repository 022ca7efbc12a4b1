//! Time-domain Kirchhoff surface integrals over spheres.
//!
//! For a wavefield `ψ` (each Cartesian component of `B`) and a closed surface
//! with normals pointing out of the volume `V`, the delta-collapsed boundary
//! term at an event `(x_P, t_P)` is
//!
//! ```text
//! (1/4π) ∮ dS [ ∂_nψ/d − (n·R̂) ψ/d² − (n·R̂) ∂_tψ/(c d) ]
//! ```
//!
//! with `d = |x_P − x|`, `R̂ = (x_P − x)/d`, and all data taken at the
//! retarded time `t_P − d/c`. With null initial data the volume-source term
//! plus this boundary term equals `ψ(x_P)` when `x_P ∈ V`, and 0 otherwise.

use crate::field::{field_from_potential, field_source_term, FieldOptions, FieldSample, Provenance};
use crate::greens::{steady_time, Outputs, RetardedSampler};
use crate::parallel::ordered_map;
use crate::quadrature::QuadratureSpec;
use crate::source::{SourceModel, Support};
use crate::sphere::{Orientation, SphericalBoundary};
use crate::{FieldError, Flags, Mat3, Result, SpacetimePoint, UnitSystem, Vec3};

/// A wavefield value with its spatial gradient (`g[(c, k)] = ∂_c ψ_k`) and time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub value: Vec3,
    pub gradient: Mat3,
    pub time_derivative: Vec3,
}

impl WaveSample {
    pub const ZERO: WaveSample = WaveSample {
        value: Vec3::new(0.0, 0.0, 0.0),
        gradient: Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        time_derivative: Vec3::new(0.0, 0.0, 0.0),
    };
}

/// Source of boundary data: anything that can report a vector wavefield
/// with first derivatives at an event.
pub trait FieldSampler: Sync {
    fn wave_sample(&self, x: &Vec3, t: f64) -> WaveSample;

    /// Region containing the sources of this field.
    fn support(&self) -> Support {
        Support::Empty
    }

    /// Earliest time from which the field at `x` is in its steady state.
    fn steady_from(&self, _x: &Vec3) -> f64 {
        f64::NEG_INFINITY
    }
}

/// The magnetic field of the retarded potential at fixed nodes.
impl FieldSampler for RetardedSampler<'_> {
    fn wave_sample(&self, x: &Vec3, t: f64) -> WaveSample {
        let r = self.integrals(x, t, Outputs::MAGNETIC_WAVE);
        WaveSample {
            value: r.b,
            gradient: r.grad_b,
            time_derivative: r.db_dt,
        }
    }

    fn support(&self) -> Support {
        self.source().support()
    }

    fn steady_from(&self, x: &Vec3) -> f64 {
        steady_from(self.source(), x)
    }
}

fn steady_from(src: &dyn SourceModel, x: &Vec3) -> f64 {
    if src.support().is_empty() {
        return f64::NEG_INFINITY;
    }
    steady_time(src, x)
}

/// `ψ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl FieldSampler for ZeroField {
    fn wave_sample(&self, _x: &Vec3, _t: f64) -> WaveSample {
        WaveSample::ZERO
    }
}

/// The scalar potential `A⁰` carried in the first component (others zero).
#[derive(Debug, Clone)]
pub struct ScalarPotential<'a>(pub RetardedSampler<'a>);

impl FieldSampler for ScalarPotential<'_> {
    fn wave_sample(&self, x: &Vec3, t: f64) -> WaveSample {
        let r = self.0.integrals(x, t, Outputs::POTENTIAL);
        let mut gradient = Mat3::zeros();
        gradient.set_column(0, &r.grad_a0);
        WaveSample {
            value: Vec3::new(r.a0, 0.0, 0.0),
            gradient,
            time_derivative: Vec3::new(r.da0_dt, 0.0, 0.0),
        }
    }

    fn support(&self) -> Support {
        self.0.source().support()
    }

    fn steady_from(&self, x: &Vec3) -> f64 {
        steady_from(self.0.source(), x)
    }
}

/// Retarded boundary data at every mesh node, for one observation event.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFieldData {
    pub observation: SpacetimePoint,
    pub values: Vec<Vec3>,
    pub normal_derivatives: Vec<Vec3>,
    pub time_derivatives: Vec<Vec3>,
    pub retarded_times: Vec<f64>,
    /// [`Flags::TRANSIENT`] when any node is sampled before its field is steady.
    pub flags: Flags,
}

impl BoundaryFieldData {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_off_surface(bnd: &SphericalBoundary, x: &Vec3) -> Result<()> {
    if bnd.encloses(x) || bnd.excludes(x) {
        Ok(())
    } else {
        Err(FieldError::GeometryViolation(format!(
            "observation point lies on the sphere of radius {} about ({}, {}, {})",
            bnd.radius(),
            bnd.center().x,
            bnd.center().y,
            bnd.center().z
        )))
    }
}

/// Sample `[ψ]`, `[∂ψ/∂n]` and `[∂ψ/∂t]` at each node's retarded time.
pub fn sample_boundary(bnd: &SphericalBoundary, p: &SpacetimePoint, sampler: &dyn FieldSampler) -> Result<BoundaryFieldData> {
    p.check_finite()?;
    check_off_surface(bnd, &p.x)?;
    let samples = ordered_map(bnd.nodes(), |node| {
        let t_ret = p.t - (p.x - node.x).norm() / UnitSystem::C;
        let w = sampler.wave_sample(&node.x, t_ret);
        let transient = t_ret < sampler.steady_from(&node.x);
        (w.value, w.gradient.transpose() * node.normal, w.time_derivative, t_ret, transient)
    });
    let mut data = BoundaryFieldData {
        observation: *p,
        values: Vec::with_capacity(samples.len()),
        normal_derivatives: Vec::with_capacity(samples.len()),
        time_derivatives: Vec::with_capacity(samples.len()),
        retarded_times: Vec::with_capacity(samples.len()),
        flags: Flags::empty(),
    };
    for (v, dn, dt, t, transient) in samples {
        if transient {
            data.flags |= Flags::TRANSIENT;
        }
        data.values.push(v);
        data.normal_derivatives.push(dn);
        data.time_derivatives.push(dt);
        data.retarded_times.push(t);
    }
    Ok(data)
}

/// The collapsed Kirchhoff boundary integral, per component.
pub fn collapsed_kirchhoff_contribution(data: &BoundaryFieldData, bnd: &SphericalBoundary, p: &SpacetimePoint) -> Result<Vec3> {
    Ok(collapsed_with_magnitude(data, bnd, p)?.0)
}

/// The integral and the sum of its per-node contribution norms.
fn collapsed_with_magnitude(data: &BoundaryFieldData, bnd: &SphericalBoundary, p: &SpacetimePoint) -> Result<(Vec3, f64)> {
    check_off_surface(bnd, &p.x)?;
    if data.len() != bnd.len() {
        return Err(FieldError::InvalidParameter(format!(
            "boundary data has {} nodes, mesh has {}",
            data.len(),
            bnd.len()
        )));
    }
    let mut acc = Vec3::zeros();
    let mut abs = 0.0;
    for (i, node) in bnd.nodes().iter().enumerate() {
        let rv = p.x - node.x;
        let d = rv.norm();
        let cos = node.normal.dot(&rv) / d;
        let term = (data.normal_derivatives[i] - data.values[i] * (cos / d) - data.time_derivatives[i] * (cos / UnitSystem::C)) * (node.w / d);
        abs += term.norm();
        acc += term;
    }
    let k = 1.0 / (4.0 * std::f64::consts::PI);
    Ok((acc * k, abs * k))
}

/// Refinement policy for surface integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceOptions {
    /// Re-evaluate on the refined mesh and compare.
    pub check_refinement: bool,
    /// Allowed relative change between mesh levels.
    pub tolerance: f64,
    /// Field scale used as a floor when the integral itself is small.
    pub scale: Option<f64>,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions {
            check_refinement: false,
            tolerance: 1e-3,
            scale: None,
        }
    }
}

impl SurfaceOptions {
    pub fn checked() -> Self {
        SurfaceOptions {
            check_refinement: true,
            ..Default::default()
        }
    }
}

/// A boundary integral and its mesh-refinement diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTerm {
    pub value: Vec3,
    /// Relative change under mesh refinement, when checked.
    pub change: Option<f64>,
    pub nodes: usize,
    pub flags: Flags,
}

/// Sample and integrate in one step, optionally verifying mesh convergence.
pub fn surface_term(bnd: &SphericalBoundary, p: &SpacetimePoint, sampler: &dyn FieldSampler, opts: &SurfaceOptions) -> Result<SurfaceTerm> {
    let data = sample_boundary(bnd, p, sampler)?;
    let value = collapsed_kirchhoff_contribution(&data, bnd, p)?;
    if !opts.check_refinement {
        return Ok(SurfaceTerm {
            value,
            change: None,
            nodes: bnd.len(),
            flags: data.flags,
        });
    }
    let fine_mesh = bnd.refined()?;
    let fine_data = sample_boundary(&fine_mesh, p, sampler)?;
    let (fine, magnitude) = collapsed_with_magnitude(&fine_data, &fine_mesh, p)?;
    // contributions that cancel to roundoff cannot be resolved any better
    let scale = fine.norm().max(opts.scale.unwrap_or(0.0)).max(1e-9 * magnitude);
    let diff = (fine - value).norm();
    let change = if scale > 0.0 {
        diff / scale
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    if change > opts.tolerance {
        return Err(FieldError::MeshTooCoarse {
            change,
            tolerance: opts.tolerance,
        });
    }
    Ok(SurfaceTerm {
        value: fine,
        change: Some(change),
        nodes: fine_mesh.len(),
        flags: data.flags | fine_data.flags,
    })
}

fn ball_inside(support: &Support, bnd: &SphericalBoundary) -> bool {
    match support.bounding_ball() {
        None => true,
        Some((c, a)) => (c - bnd.center()).norm() + a < bnd.radius(),
    }
}

fn ball_outside(support: &Support, bnd: &SphericalBoundary) -> bool {
    match support.bounding_ball() {
        None => true,
        Some((c, a)) => (c - bnd.center()).norm() - a > bnd.radius(),
    }
}

/// Inner and outer surface terms of a spherical shell, normals pointing
/// out of the shell (toward the center on the inner sphere).
pub fn shell_terms(
    inner: &SphericalBoundary,
    outer: &SphericalBoundary,
    p: &SpacetimePoint,
    sampler: &dyn FieldSampler,
    opts: &SurfaceOptions,
) -> Result<(SurfaceTerm, SurfaceTerm)> {
    if inner.radius() >= outer.radius() {
        return Err(FieldError::GeometryViolation(format!(
            "inner radius {} must be smaller than outer radius {}",
            inner.radius(),
            outer.radius()
        )));
    }
    if (inner.center() - outer.center()).norm() + inner.radius() >= outer.radius() {
        return Err(FieldError::GeometryViolation("inner sphere must lie inside the outer sphere".into()));
    }
    let inner = inner.with_orientation(Orientation::Inward);
    let outer = outer.with_orientation(Orientation::Outward);
    let a = surface_term(&inner, p, sampler, opts)?;
    let b = surface_term(&outer, p, sampler, opts)?;
    Ok((a, b))
}

/// Field inside a source-free shell from its two boundary integrals alone.
pub fn reconstruct_in_shell(
    inner: &SphericalBoundary,
    outer: &SphericalBoundary,
    p: &SpacetimePoint,
    sampler: &dyn FieldSampler,
    opts: &SurfaceOptions,
) -> Result<FieldSample> {
    if !(inner.excludes(&p.x) && outer.encloses(&p.x)) {
        return Err(FieldError::GeometryViolation(format!(
            "observation point at distance {} from the inner center is not inside the shell",
            (p.x - inner.center()).norm()
        )));
    }
    if !ball_inside(&sampler.support(), inner) {
        return Err(FieldError::GeometryViolation("source support must lie inside the inner sphere".into()));
    }
    let (a, b) = shell_terms(inner, outer, p, sampler, opts)?;
    let value = a.value + b.value;
    let error = a.change.unwrap_or(0.0) * a.value.norm() + b.change.unwrap_or(0.0) * b.value.norm();
    Ok(FieldSample {
        point: *p,
        b: value,
        e: None,
        grad_b: None,
        provenance: Provenance::KirchhoffReconstructed,
        error,
        flags: a.flags | b.flags,
    })
}

/// Composite-surface check at an event outside the outer sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancellationReport {
    pub inner: Vec3,
    pub outer: Vec3,
    /// `|inner + outer|`.
    pub residual: f64,
    /// `residual / max(|inner|, |outer|)`, 0 when both vanish.
    pub ratio: f64,
    pub flags: Flags,
}

pub fn exterior_cancellation(
    inner: &SphericalBoundary,
    outer: &SphericalBoundary,
    p: &SpacetimePoint,
    sampler: &dyn FieldSampler,
    opts: &SurfaceOptions,
) -> Result<CancellationReport> {
    if !outer.excludes(&p.x) {
        return Err(FieldError::GeometryViolation(format!(
            "observation point at distance {} is not outside the outer sphere of radius {}",
            (p.x - outer.center()).norm(),
            outer.radius()
        )));
    }
    let (a, b) = shell_terms(inner, outer, p, sampler, opts)?;
    let residual = (a.value + b.value).norm();
    let largest = a.value.norm().max(b.value.norm());
    Ok(CancellationReport {
        inner: a.value,
        outer: b.value,
        residual,
        ratio: if largest > 0.0 { residual / largest } else { 0.0 },
        flags: a.flags | b.flags,
    })
}

/// `B` split into its volume-source part and its boundary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub point: SpacetimePoint,
    pub source_term: Vec3,
    pub boundary_term: Vec3,
    pub direct: Vec3,
    /// `|source + boundary − direct|`.
    pub closure_error: f64,
    pub boundary_nodes: usize,
    pub flags: Flags,
}

impl Decomposition {
    pub fn relative_closure(&self) -> f64 {
        let d = self.direct.norm();
        if d > 0.0 {
            self.closure_error / d
        } else {
            self.closure_error
        }
    }

    /// `|boundary| / |source|`; infinite when the source term vanishes.
    pub fn boundary_ratio(&self) -> f64 {
        self.boundary_term.norm() / self.source_term.norm()
    }
}

/// Volume term + boundary term vs the directly computed field.
///
/// `V` is the side of `bnd` that contains `x_P`, and the boundary normals are
/// oriented out of `V`. The support must lie entirely on one side of the
/// sphere: the source term is the full curl-of-current integral when the
/// support is in `V` and zero otherwise. Boundary data come from the
/// retarded-potential field at node counts calibrated on the sphere, the
/// direct value from an independent adaptive evaluation at `x_P`.
pub fn decompose_field(
    src: &dyn SourceModel,
    p: &SpacetimePoint,
    bnd: &SphericalBoundary,
    q: &QuadratureSpec,
    opts: &SurfaceOptions,
) -> Result<Decomposition> {
    check_off_surface(bnd, &p.x)?;
    let support = src.support();
    let inside = bnd.encloses(&p.x);
    let support_in_v = if inside {
        ball_inside(&support, bnd)
    } else {
        ball_outside(&support, bnd)
    };
    let support_out_v = if inside {
        ball_outside(&support, bnd)
    } else {
        ball_inside(&support, bnd)
    };
    if !support_in_v && !support_out_v {
        return Err(FieldError::GeometryViolation("the boundary sphere cuts through the source support".into()));
    }
    let bnd = bnd.with_orientation(if inside {
        Orientation::Outward
    } else {
        Orientation::Inward
    });

    let direct = field_from_potential(src, p, q, FieldOptions::magnetic_only())?;
    let mut flags = direct.flags;
    let source_term = if support_in_v && !support.is_empty() {
        let s = field_source_term(src, p, q)?;
        flags |= s.flags;
        s.b
    } else {
        Vec3::zeros()
    };

    let toward = (p.x - bnd.center()).try_normalize(0.0).unwrap_or_else(Vec3::z);
    let probe = bnd.center() + toward * bnd.radius();
    let calibration = SpacetimePoint::new(probe, p.t - (p.x - probe).norm() / UnitSystem::C);
    let (sampler, ev) = RetardedSampler::calibrated(src, &calibration, q, Outputs::MAGNETIC_WAVE)?;
    flags |= ev.flags & !Flags::TRANSIENT;
    let opts = SurfaceOptions {
        scale: Some(opts.scale.unwrap_or(0.0).max(direct.b.norm())),
        ..*opts
    };
    let boundary = surface_term(&bnd, p, &sampler, &opts)?;
    flags |= boundary.flags;

    Ok(Decomposition {
        point: *p,
        source_term,
        boundary_term: boundary.value,
        direct: direct.b,
        closure_error: (source_term + boundary.value - direct.b).norm(),
        boundary_nodes: boundary.nodes,
        flags,
    })
}
