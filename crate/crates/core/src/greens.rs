//! Free-space retarded Green's function and the retarded volume integral.
//!
//! The kernel is `G = δ(t_P − t − R/c)/R`. With the delta collapsed, every
//! quantity is a volume sum over source nodes of the source density at its
//! own retarded time `t_P − R/c`. Spatial and temporal derivatives with
//! respect to the observation event are taken under the integral sign, so
//! at fixed nodes they are the exact derivatives of the discretized
//! potential. [`fd_jacobian`] provides the independent finite-difference
//! route.

use crate::quadrature::{resolve_coordinates, volume_nodes, Coordinates, QuadratureSpec, SourceNode};
use crate::source::SourceModel;
use crate::{Flags, Mat3, Result, SpacetimePoint, UnitSystem, Vec3};

/// Emission time at `x` of a signal observed at `(x_p, t_p)`.
pub fn retarded_time(x_p: &Vec3, x: &Vec3, t_p: f64) -> f64 {
    t_p - (x_p - x).norm() / UnitSystem::C
}

/// Earliest observation time at `x` at which every source point is past
/// its switch-on.
pub fn steady_time(src: &dyn SourceModel, x: &Vec3) -> f64 {
    let s = src.support();
    src.steady_after() + ((x - s.center()).norm() + s.radius()) / UnitSystem::C
}

/// The stateless retarded kernel: amplitude `1/R` on the backward light cone.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RetardedKernel;

impl RetardedKernel {
    pub fn amplitude(&self, separation: f64) -> f64 {
        1.0 / separation
    }

    pub fn emission_time(&self, x_p: &Vec3, x: &Vec3, t_p: f64) -> f64 {
        retarded_time(x_p, x, t_p)
    }
}

/// Which retarded integrals to accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outputs {
    /// `A⁰`, `A`, their time derivatives and spatial Jacobians.
    pub potential: bool,
    pub magnetic: bool,
    pub electric: bool,
    /// `∇B` and `∂B/∂t`.
    pub magnetic_gradient: bool,
    pub electric_gradient: bool,
    /// `∫[∇×j]/R d³x`, the curl-of-current route to `B`.
    pub source_term: bool,
}

impl Outputs {
    pub const POTENTIAL: Outputs = Outputs {
        potential: true,
        magnetic: false,
        electric: false,
        magnetic_gradient: false,
        electric_gradient: false,
        source_term: false,
    };

    pub const MAGNETIC: Outputs = Outputs {
        magnetic: true,
        ..Outputs::NONE
    };

    pub const ELECTRIC: Outputs = Outputs {
        electric: true,
        ..Outputs::NONE
    };

    /// Everything a Kirchhoff surface node needs.
    pub const MAGNETIC_WAVE: Outputs = Outputs {
        magnetic: true,
        magnetic_gradient: true,
        ..Outputs::NONE
    };

    pub const NONE: Outputs = Outputs {
        potential: false,
        magnetic: false,
        electric: false,
        magnetic_gradient: false,
        electric_gradient: false,
        source_term: false,
    };
}

impl std::ops::BitOr for Outputs {
    type Output = Outputs;

    fn bitor(self, o: Outputs) -> Outputs {
        Outputs {
            potential: self.potential || o.potential,
            magnetic: self.magnetic || o.magnetic,
            electric: self.electric || o.electric,
            magnetic_gradient: self.magnetic_gradient || o.magnetic_gradient,
            electric_gradient: self.electric_gradient || o.electric_gradient,
            source_term: self.source_term || o.source_term,
        }
    }
}

/// Accumulated retarded integrals at one observation event.
///
/// Gradient tensors follow `g[(c, k)] = ∂_c F_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetardedIntegrals {
    pub a0: f64,
    pub a: Vec3,
    pub da0_dt: f64,
    pub da_dt: Vec3,
    pub grad_a0: Vec3,
    pub jac_a: Mat3,
    pub b: Vec3,
    pub db_dt: Vec3,
    pub grad_b: Mat3,
    pub e: Vec3,
    pub grad_e: Mat3,
    pub b_source: Vec3,
    /// L1 sums of contribution magnitudes per group, the floor for relative comparisons.
    abs_potential: f64,
    abs_magnetic: f64,
    abs_electric: f64,
    abs_source: f64,
}

impl Default for RetardedIntegrals {
    fn default() -> Self {
        RetardedIntegrals {
            a0: 0.0,
            a: Vec3::zeros(),
            da0_dt: 0.0,
            da_dt: Vec3::zeros(),
            grad_a0: Vec3::zeros(),
            jac_a: Mat3::zeros(),
            b: Vec3::zeros(),
            db_dt: Vec3::zeros(),
            grad_b: Mat3::zeros(),
            e: Vec3::zeros(),
            grad_e: Mat3::zeros(),
            b_source: Vec3::zeros(),
            abs_potential: 0.0,
            abs_magnetic: 0.0,
            abs_electric: 0.0,
            abs_source: 0.0,
        }
    }
}

fn l1(v: &Vec3) -> f64 {
    v.x.abs() + v.y.abs() + v.z.abs()
}

/// Matrix whose row `c` is `u × ê_c`.
fn cross_rows(u: &Vec3) -> Mat3 {
    Mat3::new(0.0, u.z, -u.y, -u.z, 0.0, u.x, u.y, -u.x, 0.0)
}

/// Sum the requested retarded integrals over fixed source nodes.
///
/// Contributions are added in node order, so results are bit-reproducible.
pub fn integrate_nodes(src: &dyn SourceModel, nodes: &[SourceNode], x_p: &Vec3, t_p: f64, outputs: Outputs) -> RetardedIntegrals {
    let mut acc = RetardedIntegrals::default();
    let identity = Mat3::identity();
    for node in nodes {
        let rv = x_p - node.x;
        let r2 = rv.norm_squared();
        if r2 == 0.0 {
            continue;
        }
        let r = r2.sqrt();
        let inv = 1.0 / r;
        let n = rv * inv;
        let tau = t_p - r / UnitSystem::C;
        let s = src.sample(&node.x, tau);
        let w = node.w;
        let [rho, rho_t, rho_tt] = s.charge;
        let [j, j_t, j_tt] = s.current;
        let u = (j_t + j * inv) * inv;
        let u0 = (rho_t + rho * inv) * inv;
        if outputs.potential {
            acc.a0 += w * rho * inv;
            acc.a += j * (w * inv);
            acc.da0_dt += w * rho_t * inv;
            acc.da_dt += j_t * (w * inv);
            acc.grad_a0 -= n * (w * u0);
            acc.jac_a -= (n * w) * u.transpose();
            acc.abs_potential += w.abs() * (rho.abs() + l1(&j)) * inv;
        }
        if outputs.magnetic || outputs.magnetic_gradient {
            let c = u.cross(&n) * w;
            acc.b += c;
            acc.abs_magnetic += l1(&c);
        }
        if outputs.electric || outputs.electric_gradient {
            let c = (n * u0 - j_t * inv) * w;
            acc.e += c;
            acc.abs_electric += l1(&c);
        }
        if outputs.magnetic_gradient || outputs.electric_gradient {
            let v = (j_tt + j_t * inv) * inv;
            if outputs.magnetic_gradient {
                let q = (j_tt + (j_t * 2.0 + j * (2.0 * inv)) * inv) * inv;
                acc.db_dt += v.cross(&n) * w;
                let lead = q.cross(&n) + u.cross(&n) * inv;
                acc.grad_b += (cross_rows(&u) * inv - n * lead.transpose()) * w;
            }
            if outputs.electric_gradient {
                let q0 = (rho_tt + (2.0 * rho_t + 2.0 * rho * inv) * inv) * inv;
                acc.grad_e += (identity * (u0 * inv) - n * n.transpose() * (u0 * inv + q0) + n * v.transpose()) * w;
            }
        }
        if outputs.source_term {
            if let Some(curl) = src.curl_current(&node.x, tau) {
                let c = curl * (w * inv);
                acc.b_source += c;
                acc.abs_source += l1(&c);
            }
        }
    }
    acc
}

/// Largest relative change between two estimates over the requested groups.
fn relative_change(coarse: &RetardedIntegrals, fine: &RetardedIntegrals, outputs: Outputs) -> f64 {
    const FLOOR: f64 = 1e-9;
    let rel = |d: f64, v: f64, abs: f64| {
        let scale = v.max(FLOOR * abs);
        if scale == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / scale
        }
    };
    let mut change: f64 = 0.0;
    if outputs.potential {
        let d = ((fine.a0 - coarse.a0).powi(2) + (fine.a - coarse.a).norm_squared()).sqrt();
        let v = (fine.a0.powi(2) + fine.a.norm_squared()).sqrt();
        change = change.max(rel(d, v, fine.abs_potential));
    }
    if outputs.magnetic || outputs.magnetic_gradient {
        change = change.max(rel((fine.b - coarse.b).norm(), fine.b.norm(), fine.abs_magnetic));
    }
    if outputs.electric || outputs.electric_gradient {
        change = change.max(rel((fine.e - coarse.e).norm(), fine.e.norm(), fine.abs_electric));
    }
    if outputs.source_term {
        change = change.max(rel(
            (fine.b_source - coarse.b_source).norm(),
            fine.b_source.norm(),
            fine.abs_source,
        ));
    }
    change
}

/// Result of an adaptive retarded-integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub integrals: RetardedIntegrals,
    /// Relative change at the last refinement step (0 for fixed evaluations).
    pub relative_error: f64,
    /// Counts at which the tolerance was first met: the coarser of the last
    /// compared pair. Equal to the final counts when not converged.
    pub counts: [usize; 3],
    pub coordinates: Coordinates,
    pub flags: Flags,
}

/// Adaptive evaluation at `p`: doubles all node counts until successive
/// estimates agree to `spec.tolerance`, returning the finer estimate.
pub fn evaluate(src: &dyn SourceModel, p: &SpacetimePoint, spec: &QuadratureSpec, outputs: Outputs) -> Result<Evaluation> {
    spec.validate()?;
    p.check_finite()?;
    let coordinates = resolve_coordinates(spec.coordinates, src, &p.x);
    let mut counts = spec.counts.unwrap_or_else(|| src.base_counts(coordinates));
    let support = src.support();
    let run = |c: [usize; 3]| {
        let nodes = volume_nodes(&support, coordinates, c, &p.x);
        integrate_nodes(src, &nodes, &p.x, p.t, outputs)
    };
    let mut coarse = run(counts);
    let mut flags = Flags::empty();
    if !support.is_empty() && p.t < steady_time(src, &p.x) {
        flags |= Flags::TRANSIENT;
    }
    if spec.max_refinements == 0 || support.is_empty() {
        return Ok(Evaluation {
            integrals: coarse,
            relative_error: 0.0,
            counts,
            coordinates,
            flags,
        });
    }
    let mut change = f64::INFINITY;
    for _ in 0..spec.max_refinements {
        let finer = counts.map(|n| 2 * n);
        let fine = run(finer);
        change = relative_change(&coarse, &fine, outputs);
        if change <= spec.tolerance {
            return Ok(Evaluation {
                integrals: fine,
                relative_error: change,
                counts,
                coordinates,
                flags,
            });
        }
        coarse = fine;
        counts = finer;
    }
    Ok(Evaluation {
        integrals: coarse,
        relative_error: change,
        counts,
        coordinates,
        flags: flags | Flags::QUADRATURE_NOT_CONVERGED,
    })
}

/// The four-potential `(A⁰, A)`; with c = 1, `A⁰` is the scalar potential.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourPotential {
    pub a0: f64,
    pub a: Vec3,
}

impl FourPotential {
    pub fn component(&self, mu: usize) -> f64 {
        if mu == 0 {
            self.a0
        } else {
            self.a[mu - 1]
        }
    }

    pub fn norm(&self) -> f64 {
        (self.a0 * self.a0 + self.a.norm_squared()).sqrt()
    }
}

impl std::ops::Sub for FourPotential {
    type Output = FourPotential;
    fn sub(self, o: FourPotential) -> FourPotential {
        FourPotential {
            a0: self.a0 - o.a0,
            a: self.a - o.a,
        }
    }
}

/// Anything that yields a four-potential at an event.
pub trait PotentialField: Sync {
    fn potential(&self, x: &Vec3, t: f64) -> FourPotential;
}

/// Retarded potential at one event with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPotentialSample {
    pub point: SpacetimePoint,
    pub a0: f64,
    pub a: Vec3,
    /// Absolute error estimate (last refinement change).
    pub error: f64,
    pub counts: [usize; 3],
    pub flags: Flags,
}

impl FourPotentialSample {
    pub fn potential(&self) -> FourPotential {
        FourPotential { a0: self.a0, a: self.a }
    }
}

/// `A^μ(x_P, t_P) = (1/c)∫ j^μ(x, t_P − R/c)/R d³x` by adaptive quadrature.
///
/// Hitting the refinement cap is not an error: the best estimate is returned
/// with [`Flags::QUADRATURE_NOT_CONVERGED`] set.
pub fn retarded_potential(src: &dyn SourceModel, p: &SpacetimePoint, spec: &QuadratureSpec) -> Result<FourPotentialSample> {
    let ev = evaluate(src, p, spec, Outputs::POTENTIAL)?;
    let pot = FourPotential {
        a0: ev.integrals.a0,
        a: ev.integrals.a,
    };
    Ok(FourPotentialSample {
        point: *p,
        a0: pot.a0,
        a: pot.a,
        error: ev.relative_error * pot.norm(),
        counts: ev.counts,
        flags: ev.flags,
    })
}

/// Retarded integrals at fixed node counts.
///
/// With source-centered coordinates the node set is built once and every
/// evaluation sees the same discretized source, so differences between
/// nearby events carry no quadrature noise. Observer-centered grids are
/// rebuilt per event.
#[derive(Debug, Clone)]
pub struct RetardedSampler<'a> {
    src: &'a dyn SourceModel,
    coordinates: Coordinates,
    counts: [usize; 3],
    nodes: Option<Vec<SourceNode>>,
}

impl<'a> RetardedSampler<'a> {
    /// `coordinates` must be concrete; `Auto` is resolved against the support center.
    pub fn new(src: &'a dyn SourceModel, coordinates: Coordinates, counts: [usize; 3]) -> Self {
        let coordinates = match coordinates {
            Coordinates::Auto => src.preferred_coordinates(),
            c => resolve_coordinates(c, src, &src.support().center()),
        };
        let nodes = (coordinates != Coordinates::ObserverCentered)
            .then(|| volume_nodes(&src.support(), coordinates, counts, &Vec3::zeros()));
        RetardedSampler {
            src,
            coordinates,
            counts,
            nodes,
        }
    }

    /// Adaptive evaluation at `p`, then a fixed sampler at the counts that met the tolerance.
    pub fn calibrated(src: &'a dyn SourceModel, p: &SpacetimePoint, spec: &QuadratureSpec, outputs: Outputs) -> Result<(Self, Evaluation)> {
        let ev = evaluate(src, p, spec, outputs)?;
        Ok((RetardedSampler::new(src, ev.coordinates, ev.counts), ev))
    }

    pub fn source(&self) -> &'a dyn SourceModel {
        self.src
    }

    pub fn coordinates(&self) -> Coordinates {
        self.coordinates
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn node_count(&self) -> usize {
        self.nodes
            .as_ref()
            .map_or(self.counts.iter().product(), |n| n.len())
    }

    pub fn integrals(&self, x: &Vec3, t: f64, outputs: Outputs) -> RetardedIntegrals {
        match &self.nodes {
            Some(nodes) => integrate_nodes(self.src, nodes, x, t, outputs),
            None => {
                let nodes = volume_nodes(&self.src.support(), self.coordinates, self.counts, x);
                integrate_nodes(self.src, &nodes, x, t, outputs)
            }
        }
    }
}

impl PotentialField for RetardedSampler<'_> {
    fn potential(&self, x: &Vec3, t: f64) -> FourPotential {
        let r = self.integrals(x, t, Outputs::POTENTIAL);
        FourPotential { a0: r.a0, a: r.a }
    }
}

/// `∂_ν A^μ` with `ν ∈ {x, y, z, t}` (first index) and `μ ∈ {0, 1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialJacobian {
    pub d: [[f64; 4]; 4],
    /// Largest |Richardson − fine-step| difference over all entries.
    pub error: f64,
    pub flags: Flags,
}

impl PotentialJacobian {
    /// `B = ∇×A`.
    pub fn curl(&self) -> Vec3 {
        let d = &self.d;
        Vec3::new(d[1][3] - d[2][2], d[2][1] - d[0][3], d[0][2] - d[1][1])
    }

    /// `E = −∇A⁰ − ∂A/∂t`.
    pub fn electric(&self) -> Vec3 {
        let d = &self.d;
        Vec3::new(-d[0][0] - d[3][1], -d[1][0] - d[3][2], -d[2][0] - d[3][3])
    }

    /// `∇·A + ∂A⁰/∂t`.
    pub fn lorenz(&self) -> f64 {
        let d = &self.d;
        d[0][1] + d[1][2] + d[2][3] + d[3][0]
    }

    pub fn grad_a0(&self) -> Vec3 {
        Vec3::new(self.d[0][0], self.d[1][0], self.d[2][0])
    }

    pub fn time_derivative(&self) -> FourPotential {
        FourPotential {
            a0: self.d[3][0],
            a: Vec3::new(self.d[3][1], self.d[3][2], self.d[3][3]),
        }
    }
}

/// Central differences in `x` and `t` at steps `h` and `h/2`, combined by
/// Richardson extrapolation (fourth order).
pub fn fd_jacobian(field: &dyn PotentialField, p: &SpacetimePoint, h: f64) -> PotentialJacobian {
    let eval = |nu: usize, step: f64| {
        let (mut xp, mut xm) = (p.x, p.x);
        let (mut tp, mut tm) = (p.t, p.t);
        if nu < 3 {
            xp[nu] += step;
            xm[nu] -= step;
        } else {
            tp += step;
            tm -= step;
        }
        let diff = field.potential(&xp, tp) - field.potential(&xm, tm);
        [diff.a0, diff.a.x, diff.a.y, diff.a.z].map(|v| v / (2.0 * step))
    };
    let mut d = [[0.0; 4]; 4];
    let mut error: f64 = 0.0;
    for (nu, row) in d.iter_mut().enumerate() {
        let coarse = eval(nu, h);
        let fine = eval(nu, 0.5 * h);
        for mu in 0..4 {
            let rich = (4.0 * fine[mu] - coarse[mu]) / 3.0;
            error = error.max((rich - fine[mu]).abs());
            row[mu] = rich;
        }
    }
    PotentialJacobian {
        d,
        error,
        flags: Flags::empty(),
    }
}

/// Differencing step: `10⁻³ c/Ω` for oscillating sources, `10⁻³` of the
/// distance to the source center (at least its radius) for static ones.
pub fn default_step(src: &dyn SourceModel, x: &Vec3) -> f64 {
    match src.frequency() {
        Some(w) if w > 0.0 => 1e-3 * UnitSystem::C / w,
        _ => {
            let s = src.support();
            1e-3 * (x - s.center()).norm().max(s.radius()).max(1e-12)
        }
    }
}

/// Finite-difference Jacobian of the retarded potential at `p`.
///
/// Node counts are calibrated once at `p` and held fixed over the stencil.
pub fn potential_jacobian(src: &dyn SourceModel, p: &SpacetimePoint, spec: &QuadratureSpec, h: f64) -> Result<PotentialJacobian> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(crate::FieldError::InvalidParameter(format!(
            "differencing step must be positive, got {h}"
        )));
    }
    let (sampler, ev) = RetardedSampler::calibrated(src, p, spec, Outputs::POTENTIAL)?;
    let mut jac = fd_jacobian(&sampler, p, h);
    jac.flags |= ev.flags;
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{HertzianDipoleSource, StaticChargeBlob, ZeroSource};

    #[test]
    fn retarded_time_examples() {
        let x = Vec3::new(1.0, -2.0, 0.5);
        assert_eq!(retarded_time(&x, &x, 5.0), 5.0);
        assert_eq!(retarded_time(&Vec3::new(3.0, 4.0, 0.0), &Vec3::zeros(), 7.0), 2.0);
        let v = Vec3::new(10.0, -3.0, 2.5);
        let a = retarded_time(&Vec3::new(3.0, 4.0, 0.0), &Vec3::zeros(), 7.0);
        let b = retarded_time(&(Vec3::new(3.0, 4.0, 0.0) + v), &v, 7.0);
        assert!((a - b).abs() < 1e-14);
        assert_eq!(RetardedKernel.amplitude(4.0), 0.25);
    }

    #[test]
    fn zero_source_gives_zero_potential() {
        let p = SpacetimePoint::new(Vec3::new(3.0, 0.0, 0.0), 10.0);
        let s = retarded_potential(&ZeroSource, &p, &QuadratureSpec::default()).unwrap();
        assert_eq!(s.potential(), FourPotential::default());
        assert!(s.flags.is_empty());
    }

    #[test]
    fn coulomb_potential_of_blob() {
        let blob = StaticChargeBlob::new(1.0, 0.2).unwrap();
        let p = SpacetimePoint::new(Vec3::new(0.0, 6.0, 8.0), 3.0);
        let s = retarded_potential(&blob, &p, &QuadratureSpec::default()).unwrap();
        assert!((s.a0 * 10.0 - 1.0).abs() < 1e-6, "{}", s.a0);
        assert_eq!(s.a, Vec3::zeros());
        assert!(!s.flags.is_unconverged());
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let d = HertzianDipoleSource::unit_wavelength()
            .with_axis(Vec3::new(0.3, 0.1, 1.0))
            .unwrap();
        let p = SpacetimePoint::new(Vec3::new(2.0, -1.5, 3.0), 12.0);
        let sampler = RetardedSampler::new(&d, Coordinates::Spherical, [16, 12, 16]);
        let exact = sampler.integrals(&p.x, p.t, Outputs::POTENTIAL);
        let fd = fd_jacobian(&sampler, &p, 1e-3 / d.omega());
        let scale = exact.jac_a.norm() + exact.grad_a0.norm();
        for c in 0..3 {
            assert!((fd.d[c][0] - exact.grad_a0[c]).abs() < 1e-8 * scale);
            for k in 0..3 {
                assert!((fd.d[c][k + 1] - exact.jac_a[(c, k)]).abs() < 1e-8 * scale);
            }
        }
        assert!((fd.d[3][0] - exact.da0_dt).abs() < 1e-8 * scale);
        assert!((fd.time_derivative().a - exact.da_dt).norm() < 1e-8 * scale);
    }

    #[test]
    fn field_gradients_match_finite_differences_of_fields() {
        let d = HertzianDipoleSource::unit_wavelength()
            .with_axis(Vec3::new(1.0, 0.0, 1.0))
            .unwrap();
        let sampler = RetardedSampler::new(&d, Coordinates::Spherical, [16, 12, 16]);
        let x = Vec3::new(1.2, 0.7, -0.9);
        let t = 6.3;
        let all = Outputs {
            magnetic: true,
            electric: true,
            magnetic_gradient: true,
            electric_gradient: true,
            ..Outputs::NONE
        };
        let r = sampler.integrals(&x, t, all);
        let h = 1e-4;
        let scale_b = r.grad_b.norm();
        let scale_e = r.grad_e.norm();
        for c in 0..3 {
            let mut dx = Vec3::zeros();
            dx[c] = h;
            let p = sampler.integrals(&(x + dx), t, all);
            let m = sampler.integrals(&(x - dx), t, all);
            for k in 0..3 {
                let fb = (p.b[k] - m.b[k]) / (2.0 * h);
                assert!((fb - r.grad_b[(c, k)]).abs() < 1e-6 * scale_b, "dB {c}{k}");
                let fe = (p.e[k] - m.e[k]) / (2.0 * h);
                assert!((fe - r.grad_e[(c, k)]).abs() < 1e-6 * scale_e, "dE {c}{k}");
            }
        }
        let p = sampler.integrals(&x, t + h, all);
        let m = sampler.integrals(&x, t - h, all);
        assert!(((p.b - m.b) / (2.0 * h) - r.db_dt).norm() < 1e-6 * r.db_dt.norm());
    }
}
