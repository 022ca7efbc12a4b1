//! Magnetic and electric fields from the retarded potential and from the
//! curl-of-current integral, plus gauge transformations.

use serde::{Deserialize, Serialize};

use crate::greens::{
    default_step, evaluate, fd_jacobian, potential_jacobian, FourPotential, Outputs, PotentialField, RetardedSampler,
};
use crate::quadrature::QuadratureSpec;
use crate::source::SourceModel;
use crate::{FieldError, Flags, Mat3, Result, SpacetimePoint, Vec3};

/// How a field value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromPotential,
    SourceTermOnly,
    KirchhoffReconstructed,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::FromPotential => "from_potential",
            Provenance::SourceTermOnly => "source_term_only",
            Provenance::KirchhoffReconstructed => "kirchhoff_reconstructed",
        }
    }
}

/// Field values at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: SpacetimePoint,
    pub b: Vec3,
    pub e: Option<Vec3>,
    /// `grad_b[(c, k)] = ∂_c B_k`.
    pub grad_b: Option<Mat3>,
    pub provenance: Provenance,
    /// Absolute error estimate on `B`.
    pub error: f64,
    pub flags: Flags,
}

impl FieldSample {
    pub fn zero(point: SpacetimePoint, provenance: Provenance) -> Self {
        FieldSample {
            point,
            b: Vec3::zeros(),
            e: None,
            grad_b: None,
            provenance,
            error: 0.0,
            flags: Flags::empty(),
        }
    }
}

/// Differentiation route from `A^μ` to the fields.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Differentiation {
    /// Derivatives taken under the integral sign: the exact derivative of
    /// the discretized potential.
    #[default]
    Analytic,
    /// Richardson-extrapolated central differences of the potential with
    /// step `h` (default `10⁻³ c/Ω`).
    FiniteDifference { step: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    pub differentiation: Differentiation,
    pub electric: bool,
    pub gradient: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            differentiation: Differentiation::Analytic,
            electric: true,
            gradient: false,
        }
    }
}

impl FieldOptions {
    pub fn magnetic_only() -> Self {
        FieldOptions {
            electric: false,
            ..Default::default()
        }
    }

    pub fn with_gradient(mut self) -> Self {
        self.gradient = true;
        self
    }

    pub fn finite_difference(mut self, step: Option<f64>) -> Self {
        self.differentiation = Differentiation::FiniteDifference { step };
        self
    }
}

/// `B = ∇×A` and `E = −∇A⁰ − ∂A/∂t` at `p`.
///
/// In finite-difference mode the gradient of `B` (if requested) is the
/// Richardson central difference of the analytic `B` at fixed nodes.
pub fn field_from_potential(src: &dyn SourceModel, p: &SpacetimePoint, q: &QuadratureSpec, opts: FieldOptions) -> Result<FieldSample> {
    match opts.differentiation {
        Differentiation::Analytic => {
            let outputs = Outputs {
                magnetic: true,
                electric: opts.electric,
                magnetic_gradient: opts.gradient,
                ..Outputs::NONE
            };
            let ev = evaluate(src, p, q, outputs)?;
            let r = &ev.integrals;
            Ok(FieldSample {
                point: *p,
                b: r.b,
                e: opts.electric.then_some(r.e),
                grad_b: opts.gradient.then_some(r.grad_b),
                provenance: Provenance::FromPotential,
                error: ev.relative_error * r.b.norm(),
                flags: ev.flags,
            })
        }
        Differentiation::FiniteDifference { step } => {
            let h = step.unwrap_or_else(|| default_step(src, &p.x));
            let jac = potential_jacobian(src, p, q, h)?;
            let mut sample = FieldSample {
                point: *p,
                b: jac.curl(),
                e: opts.electric.then(|| jac.electric()),
                grad_b: None,
                provenance: Provenance::FromPotential,
                error: 2.0 * jac.error,
                flags: jac.flags,
            };
            if opts.gradient {
                let (sampler, _) = RetardedSampler::calibrated(src, p, q, Outputs::MAGNETIC)?;
                sample.grad_b = Some(fd_field_gradient(&sampler, p, h));
            }
            Ok(sample)
        }
    }
}

fn fd_field_gradient(sampler: &RetardedSampler<'_>, p: &SpacetimePoint, h: f64) -> Mat3 {
    let b = |x: Vec3| sampler.integrals(&x, p.t, Outputs::MAGNETIC).b;
    let mut g = Mat3::zeros();
    for c in 0..3 {
        let mut dx = Vec3::zeros();
        dx[c] = h;
        let coarse = (b(p.x + dx) - b(p.x - dx)) / (2.0 * h);
        let fine = (b(p.x + dx * 0.5) - b(p.x - dx * 0.5)) / h;
        let rich = (fine * 4.0 - coarse) / 3.0;
        g.set_row(c, &rich.transpose());
    }
    g
}

/// `B(x_P, t_P) = (1/c)∫[∇×j]/R d³x`, evaluated exactly as written.
pub fn field_source_term(src: &dyn SourceModel, p: &SpacetimePoint, q: &QuadratureSpec) -> Result<FieldSample> {
    if !src.has_analytic_curl() {
        return Err(FieldError::CurlUnavailable);
    }
    let ev = evaluate(src, p, q, Outputs { source_term: true, ..Outputs::NONE })?;
    Ok(FieldSample {
        point: *p,
        b: ev.integrals.b_source,
        e: None,
        grad_b: None,
        provenance: Provenance::SourceTermOnly,
        error: ev.relative_error * ev.integrals.b_source.norm(),
        flags: ev.flags,
    })
}

/// A homogeneous solution `Λ` of the wave equation used as a gauge function.
pub trait GaugeFunction: Sync {
    fn value(&self, x: &Vec3, t: f64) -> f64;
    fn gradient(&self, x: &Vec3, t: f64) -> Vec3;
    fn time_derivative(&self, x: &Vec3, t: f64) -> f64;
}

/// `Λ = a·sin(k·x − c|k|t + φ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveGauge {
    pub amplitude: f64,
    pub k: Vec3,
    pub phase: f64,
}

impl PlaneWaveGauge {
    pub fn new(amplitude: f64, k: Vec3, phase: f64) -> Self {
        PlaneWaveGauge { amplitude, k, phase }
    }

    /// `Λ ≡ 0`.
    pub fn zero() -> Self {
        PlaneWaveGauge::new(0.0, Vec3::zeros(), 0.0)
    }

    fn argument(&self, x: &Vec3, t: f64) -> f64 {
        self.k.dot(x) - self.k.norm() * t + self.phase
    }

    /// Central-difference `□Λ` at `(x, t)` relative to `a|k|²`.
    pub fn dalembertian_residual(&self, x: &Vec3, t: f64, h: f64) -> f64 {
        let scale = self.amplitude.abs() * self.k.norm_squared();
        if scale == 0.0 {
            return 0.0;
        }
        let f0 = self.value(x, t);
        let mut lap = 0.0;
        for c in 0..3 {
            let mut dx = Vec3::zeros();
            dx[c] = h;
            lap += self.value(&(x + dx), t) - 2.0 * f0 + self.value(&(x - dx), t);
        }
        let tt = self.value(x, t + h) - 2.0 * f0 + self.value(x, t - h);
        ((lap - tt) / (h * h)).abs() / scale
    }
}

impl GaugeFunction for PlaneWaveGauge {
    fn value(&self, x: &Vec3, t: f64) -> f64 {
        self.amplitude * self.argument(x, t).sin()
    }

    fn gradient(&self, x: &Vec3, t: f64) -> Vec3 {
        self.k * (self.amplitude * self.argument(x, t).cos())
    }

    fn time_derivative(&self, x: &Vec3, t: f64) -> f64 {
        -self.k.norm() * self.amplitude * self.argument(x, t).cos()
    }
}

/// `A → A + ∇Λ`, `A⁰ → A⁰ − ∂Λ/∂t` applied on top of another potential.
#[derive(Debug, Clone, Copy)]
pub struct Gauged<'a, P: ?Sized, G> {
    base: &'a P,
    gauge: G,
}

impl<P: PotentialField + ?Sized, G: GaugeFunction> PotentialField for Gauged<'_, P, G> {
    fn potential(&self, x: &Vec3, t: f64) -> FourPotential {
        let a = self.base.potential(x, t);
        FourPotential {
            a0: a.a0 - self.gauge.time_derivative(x, t),
            a: a.a + self.gauge.gradient(x, t),
        }
    }
}

pub fn gauge_transform<P: PotentialField + ?Sized, G: GaugeFunction>(base: &P, gauge: G) -> Gauged<'_, P, G> {
    Gauged { base, gauge }
}

/// Lorenz-condition residual with its natural scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzResidual {
    /// `|∇·A + ∂A⁰/∂t|`.
    pub value: f64,
    /// `|∇·A|`, equal to `value` for a charge-free current.
    pub divergence: f64,
    /// `|∂A⁰/∂t|`.
    pub time_term: f64,
    pub flags: Flags,
}

/// Lorenz residual of any potential by Richardson central differences.
pub fn lorenz_of(field: &dyn PotentialField, p: &SpacetimePoint, h: f64) -> LorenzResidual {
    let jac = fd_jacobian(field, p, h);
    let div = jac.d[0][1] + jac.d[1][2] + jac.d[2][3];
    LorenzResidual {
        value: jac.lorenz().abs(),
        divergence: div.abs(),
        time_term: jac.d[3][0].abs(),
        flags: jac.flags,
    }
}

/// Lorenz residual of the retarded potential of `src` at `p`.
pub fn lorenz_residual(src: &dyn SourceModel, p: &SpacetimePoint, q: &QuadratureSpec, h: f64) -> Result<LorenzResidual> {
    let jac = potential_jacobian(src, p, q, h)?;
    let div = jac.d[0][1] + jac.d[1][2] + jac.d[2][3];
    Ok(LorenzResidual {
        value: jac.lorenz().abs(),
        divergence: div.abs(),
        time_term: jac.d[3][0].abs(),
        flags: jac.flags,
    })
}
