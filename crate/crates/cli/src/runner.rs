//! Executes a resolved scenario and collects rows, checks and fits.

use std::f64::consts::PI;

use fieldlab::field::{field_from_potential, field_source_term, FieldOptions};
use fieldlab::greens::{retarded_potential, steady_time, Outputs, RetardedSampler};
use fieldlab::kirchhoff::{exterior_cancellation, reconstruct_in_shell, SurfaceOptions};
use fieldlab::quadrature::QuadratureSpec;
use fieldlab::scaling::{
    beam_peak_search, boundary_term_sweep, fit_power_law, gradient_sweep, period_max_at, solid_angle_sweep, sweep_field,
    Observable, Pipeline, Quantity, RadialSweep, ScalingReport, SweepResult,
};
use fieldlab::source::SourceModel;
use fieldlab::sphere::{Orientation, SphericalBoundary};
use fieldlab::units::{angles_of, unit_from_angles};
use fieldlab::validation::{dalembertian_residual_a, dalembertian_residual_b, initial_condition_check, Residual, ResidualGrid};
use fieldlab::{FieldError, Flags, SpacetimePoint, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scenario::{DifferentiationKind, RunKind, Scenario, SweepQuantity};

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    /// Distance and angles of the observation point from the support center.
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    pub value: [f64; 3],
    pub err: f64,
    pub flags: Flags,
}

/// A pass/fail comparison against a configured tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `below`: pass when `value < tolerance`; `above`: when `value > tolerance`.
    pub sense: &'static str,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            sense: "below",
            passed: value < tolerance,
        }
    }

    fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            sense: "above",
            passed: value > tolerance,
        }
    }
}

/// Everything a run produced, including partial results before an error.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub fits: Vec<ScalingReport>,
    pub direction: Option<(f64, f64)>,
    pub error: Option<FieldError>,
}

impl Outcome {
    pub fn flags(&self) -> Flags {
        self.rows.iter().fold(Flags::empty(), |f, r| f | r.flags)
    }

    /// 0 success, 1 configuration or geometry error, 2 convergence
    /// failure, 3 an identity check outside tolerance.
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return error_exit_code(e);
        }
        if self.flags().is_unconverged() {
            2
        } else if self.checks.iter().any(|c| !c.passed) {
            3
        } else {
            0
        }
    }
}

pub fn error_exit_code(e: &FieldError) -> i32 {
    match e {
        FieldError::MeshTooCoarse { .. } | FieldError::BeamUnderResolved { .. } | FieldError::NonPositiveSample { .. } => 2,
        FieldError::GeometryViolation(_)
        | FieldError::InvalidParameter(_)
        | FieldError::CurlUnavailable
        | FieldError::TooFewSamples { .. } => 1,
    }
}

struct Ctx<'a> {
    s: &'a Scenario,
    src: &'a dyn SourceModel,
    center: Vec3,
    q: QuadratureSpec,
    surface: SurfaceOptions,
}

impl Ctx<'_> {
    fn row(&self, quantity: &str, p: &SpacetimePoint, value: [f64; 3], err: f64, flags: Flags) -> Row {
        let d = p.x - self.center;
        let r = d.norm();
        let (theta, phi) = if r > 0.0 { angles_of(&d) } else { (0.0, 0.0) };
        Row {
            quantity: quantity.to_string(),
            r,
            theta,
            phi,
            t: p.t,
            value,
            err,
            flags,
        }
    }

    fn vrow(&self, quantity: &str, p: &SpacetimePoint, v: &Vec3, err: f64, flags: Flags) -> Row {
        self.row(quantity, p, [v.x, v.y, v.z], err, flags)
    }

    fn steady(&self, x: &Vec3) -> f64 {
        steady_time(self.src, x) + self.s.geometry.time_offset
    }

    /// Listed points followed by seeded random ones.
    fn points(&self) -> Vec<Vec3> {
        let mut out: Vec<Vec3> = self.s.geometry.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        let [lo, hi] = self.s.random_radius(self.src);
        let mut rng = ChaCha8Rng::seed_from_u64(self.s.seed);
        for _ in 0..self.s.random_points() {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let r: f64 = rng.gen_range(lo..=hi);
            let rho = (1.0 - z * z).sqrt();
            out.push(self.center + Vec3::new(rho * phi.cos(), rho * phi.sin(), z) * r);
        }
        out
    }

    fn field_options(&self) -> FieldOptions {
        let o = FieldOptions::default();
        match self.s.numerics.differentiation {
            DifferentiationKind::Analytic => o,
            DifferentiationKind::FiniteDifference => o.finite_difference(self.s.numerics.fd_step),
        }
    }

    /// Observation direction: configured, the beam peak of an oscillating
    /// source with no natural axis, or the equator.
    fn direction(&self, peak_search: bool, radius: f64) -> fieldlab::Result<(f64, f64)> {
        let g = &self.s.geometry;
        if let (Some(t), Some(p)) = (g.theta, g.phi) {
            return Ok((t, p));
        }
        if peak_search && self.s.source.kind() == "rotating" {
            let peak = beam_peak_search(self.src, radius, self.s.numerics.peak_level, self.s.sweep.observable, &self.q)?;
            return Ok((g.theta.unwrap_or(peak.theta), g.phi.unwrap_or(peak.phi)));
        }
        Ok((g.theta.unwrap_or(0.5 * PI), g.phi.unwrap_or(0.0)))
    }

    fn mesh(&self, radius: f64, x: &Vec3) -> fieldlab::Result<SphericalBoundary> {
        let k = self.src.frequency().unwrap_or(0.0);
        SphericalBoundary::for_observer(self.center, radius, x, k, self.src.support().radius(), Orientation::Outward)
    }

    /// `B` sampler calibrated between the two spheres.
    fn boundary_sampler(&self, radius: f64) -> fieldlab::Result<RetardedSampler<'_>> {
        let probe = self.center + Vec3::new(1.0, 0.5, 0.3).normalize() * radius;
        let p = SpacetimePoint::new(probe, steady_time(self.src, &probe));
        Ok(RetardedSampler::calibrated(self.src, &p, &self.q, Outputs::MAGNETIC_WAVE)?.0)
    }
}

/// Run the scenario's kind against its source.
pub fn execute(s: &Scenario) -> Outcome {
    let mut out = Outcome::default();
    let src = match s.source.build() {
        Ok(src) => src,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    let ctx = Ctx {
        s,
        src: src.as_ref(),
        center: src.support().center(),
        q: s.numerics.quadrature(),
        surface: SurfaceOptions {
            check_refinement: s.numerics.check_refinement,
            tolerance: s.numerics.surface_tolerance,
            scale: None,
        },
    };
    let result = match s.run_kind() {
        RunKind::Potential => potential(&ctx, &mut out),
        RunKind::Field => field(&ctx, &mut out),
        RunKind::Decompose => decompose(&ctx, &mut out),
        RunKind::Reconstruct => reconstruct(&ctx, &mut out),
        RunKind::Cancellation => cancellation(&ctx, &mut out),
        RunKind::Scaling => scaling(&ctx, &mut out),
        RunKind::Validate => validate(&ctx, &mut out),
    };
    if let Err(e) = result {
        out.error = Some(e);
    }
    out
}

fn potential(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    for x in c.points() {
        let p = SpacetimePoint::new(x, c.steady(&x));
        let a = retarded_potential(c.src, &p, &c.q)?;
        let scale = a.potential().norm();
        let err = if scale > 0.0 { a.error / scale } else { 0.0 };
        out.rows.push(c.row("A0", &p, [a.a0, 0.0, 0.0], err * a.a0.abs(), a.flags));
        out.rows.push(c.vrow("A", &p, &a.a, err * a.a.norm(), a.flags));
    }
    Ok(())
}

fn field(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    for x in c.points() {
        let p = SpacetimePoint::new(x, c.steady(&x));
        let f = field_from_potential(c.src, &p, &c.q, c.field_options())?;
        out.rows.push(c.vrow("B", &p, &f.b, f.error, f.flags));
        if let Some(e) = f.e {
            let rel = if f.b.norm() > 0.0 { f.error / f.b.norm() } else { 0.0 };
            out.rows.push(c.vrow("E", &p, &e, rel * e.norm(), f.flags));
        }
        if c.src.has_analytic_curl() {
            let s = field_source_term(c.src, &p, &c.q)?;
            out.rows.push(c.vrow("B_source", &p, &s.b, s.error, s.flags));
        }
    }
    Ok(())
}

fn decompose(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    let radii = c.s.boundary_radii(c.src);
    let (theta, phi) = c.direction(true, radii[0])?;
    out.direction = Some((theta, phi));
    let decs = boundary_term_sweep(c.src, theta, phi, &radii, c.s.geometry.observer_fraction, &c.q, &c.surface)?;
    for (d, r) in decs.iter().zip(&radii) {
        let p = d.point;
        out.rows.push(c.vrow("source_term", &p, &d.source_term, 0.0, d.flags));
        out.rows.push(c.vrow("boundary_term", &p, &d.boundary_term, 0.0, d.flags));
        out.rows.push(c.vrow("direct", &p, &d.direct, 0.0, d.flags));
        out.rows.push(c.row("closure", &p, [d.relative_closure(), d.boundary_ratio(), *r], d.closure_error, d.flags));
        out.checks.push(Check::below(
            format!("closure at R_b = {r:.6e}"),
            d.relative_closure(),
            c.s.checks.closure_tolerance,
        ));
    }
    Ok(())
}

fn reconstruct(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    let sh = c.s.shell(c.src);
    let (theta, phi) = c.direction(false, sh.observer)?;
    out.direction = Some((theta, phi));
    let x = c.center + unit_from_angles(theta, phi) * sh.observer;
    let p = SpacetimePoint::new(x, c.steady(&x) + 2.0 * sh.outer);
    let (inner, outer) = (c.mesh(sh.inner, &x)?, c.mesh(sh.outer, &x)?);
    let sampler = c.boundary_sampler(0.5 * (sh.inner + sh.outer))?;
    let r = reconstruct_in_shell(&inner, &outer, &p, &sampler, &c.surface)?;
    let direct = field_from_potential(c.src, &p, &c.q, FieldOptions::magnetic_only())?;
    let diff = r.b - direct.b;
    out.rows.push(c.vrow("reconstructed", &p, &r.b, r.error, r.flags));
    out.rows.push(c.vrow("direct", &p, &direct.b, direct.error, direct.flags));
    out.rows.push(c.vrow("residual", &p, &diff, r.error + direct.error, r.flags | direct.flags));
    let rel = diff.norm() / direct.b.norm();
    out.checks.push(Check::below("reconstruction", rel, c.s.checks.reconstruction_tolerance));
    Ok(())
}

fn cancellation(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    let sh = c.s.shell(c.src);
    let (theta, phi) = c.direction(false, sh.observer)?;
    out.direction = Some((theta, phi));
    let x = c.center + unit_from_angles(theta, phi) * sh.observer;
    let p = SpacetimePoint::new(x, c.steady(&x) + 2.0 * sh.outer);
    let (inner, outer) = (c.mesh(sh.inner, &x)?, c.mesh(sh.outer, &x)?);
    let sampler = c.boundary_sampler(0.5 * (sh.inner + sh.outer))?;
    let rep = exterior_cancellation(&inner, &outer, &p, &sampler, &c.surface)?;
    let local = period_max_at(c.src, &x, &c.q, Pipeline::FromPotential, Observable::Magnetic, false)?;
    out.rows.push(c.vrow("inner_term", &p, &rep.inner, 0.0, rep.flags));
    out.rows.push(c.vrow("outer_term", &p, &rep.outer, 0.0, rep.flags));
    out.rows.push(c.row("residual", &p, [rep.ratio, rep.residual, local.value], 0.0, rep.flags | local.flags));
    out.checks.push(Check::below("cancellation ratio", rep.ratio, c.s.checks.cancellation_tolerance));
    let smallest = rep.inner.norm().min(rep.outer.norm()) / local.value;
    out.checks.push(Check::above("smaller term / local period-max |B|", smallest, 0.1));
    Ok(())
}

fn sweep_rows(out: &mut Outcome, name: &str, res: &SweepResult) {
    for s in &res.samples {
        out.rows.push(Row {
            quantity: name.to_string(),
            r: s.radius,
            theta: s.theta,
            phi: s.phi,
            t: s.t,
            value: [s.value, 0.0, 0.0],
            err: 0.0,
            flags: s.flags,
        });
    }
}

fn scaling(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    let sw_cfg = &c.s.sweep;
    let r0 = c.s.sweep_r0(c.src);
    let (theta, phi) = c.direction(true, r0)?;
    out.direction = Some((theta, phi));
    let sw = RadialSweep::geometric(theta, phi, r0, sw_cfg.ratio, sw_cfg.count)?;
    let fit = match sw_cfg.quantity {
        SweepQuantity::Field => {
            let res = sweep_field(c.src, &sw, c.s.numerics.pipeline, sw_cfg.observable, &c.q)?;
            sweep_rows(out, "field", &res);
            res.fit()?
        }
        SweepQuantity::Gradient => {
            let res = gradient_sweep(c.src, &sw, sw_cfg.observable, &c.q)?;
            sweep_rows(out, "gradient", &res);
            res.fit()?
        }
        SweepQuantity::SolidAngle => {
            let mesh = SphericalBoundary::geodesic(Vec3::zeros(), 1.0, c.s.numerics.mesh_level, Orientation::Outward)?;
            let res = solid_angle_sweep(c.src, &sw.radii, sw_cfg.threshold, &mesh, &c.q)?;
            sweep_rows(out, "solid_angle", &res);
            res.fit()?
        }
        SweepQuantity::BoundaryTerm => {
            let decs = boundary_term_sweep(c.src, theta, phi, &sw.radii, c.s.geometry.observer_fraction, &c.q, &c.surface)?;
            let mut pairs = Vec::new();
            for (d, &r) in decs.iter().zip(&sw.radii) {
                let mut row = c.row("boundary_term", &d.point, [d.boundary_ratio(), d.boundary_term.norm(), d.source_term.norm()], d.closure_error, d.flags);
                row.r = r;
                row.theta = theta;
                row.phi = phi;
                out.rows.push(row);
                pairs.push((r, d.boundary_ratio()));
            }
            fit_power_law(&pairs)?.with_quantity(Quantity::BoundaryTerm)
        }
    };
    if let Some(expected) = c.s.checks.expected_exponent {
        out.checks.push(Check::below(
            format!("exponent vs expected {expected}"),
            (fit.exponent - expected).abs(),
            c.s.checks.exponent_tolerance,
        ));
    }
    out.fits.push(fit);
    Ok(())
}

fn residual_row(c: &Ctx, name: &str, p: &SpacetimePoint, r: &Residual) -> Row {
    c.row(name, p, [r.normalized, r.absolute, r.scale], 0.0, r.flags)
}

fn validate(c: &Ctx, out: &mut Outcome) -> fieldlab::Result<()> {
    let points = c.points();
    let n = &c.s.numerics;
    let tol = c.s.checks.residual_tolerance;
    for x in &points {
        let p = SpacetimePoint::new(*x, c.steady(x));
        let grid = match n.h_x {
            Some(h) => ResidualGrid::new(h, 0.5 * h, n.stencil)?,
            None => ResidualGrid {
                order: n.stencil,
                ..ResidualGrid::for_source(c.src, x)
            },
        };
        let ra = dalembertian_residual_a(c.src, &p, &grid, &c.q)?;
        let rb = dalembertian_residual_b(c.src, &p, &grid, &c.q)?;
        out.rows.push(residual_row(c, "residual_A", &p, &ra));
        out.rows.push(residual_row(c, "residual_B", &p, &rb));
        let at = c.row("", &p, [0.0; 3], 0.0, Flags::empty());
        out.checks.push(Check::below(format!("residual A at R = {:.6e}", at.r), ra.normalized, tol));
        out.checks.push(Check::below(format!("residual B at R = {:.6e}", at.r), rb.normalized, tol));
    }
    let ic = initial_condition_check(c.src, &points, &c.q)?;
    if ic.applicable {
        let matched = ic.onsets.iter().filter(|o| o.matches()).count();
        let p = SpacetimePoint::new(c.center, c.src.active_from());
        out.rows.push(c.row("initial_condition", &p, [ic.max_relative, ic.checked as f64, matched as f64], 0.0, Flags::empty()));
        out.checks.push(Check::below("null initial data", ic.max_relative, c.s.checks.initial_tolerance));
        out.checks.push(Check::below("late signal onsets", (ic.onsets.len() - matched) as f64, 0.5));
    }
    Ok(())
}
