//! Residual checks: d'Alembertian of computed potentials and fields by
//! finite differences, and null initial data.

use serde::{Deserialize, Serialize};

use crate::greens::{Outputs, RetardedIntegrals, RetardedSampler};
use crate::parallel::ordered_map;
use crate::quadrature::{volume_nodes, Coordinates, QuadratureSpec};
use crate::source::{curl_by_differences, SourceModel};
use crate::{FieldError, Flags, Result, SpacetimePoint, UnitSystem, Vec3};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Finite-difference accuracy of the second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StencilOrder {
    /// Three points per axis.
    Second,
    /// Five points per axis (the axis lines of a 5×5×5×5 block).
    #[default]
    Fourth,
}

/// Stencil spacings around a probe event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualGrid {
    pub h_x: f64,
    pub h_t: f64,
    pub order: StencilOrder,
}

impl ResidualGrid {
    /// Requires `c·h_t ≤ h_x/2`.
    pub fn new(h_x: f64, h_t: f64, order: StencilOrder) -> Result<Self> {
        if !(h_x > 0.0 && h_t > 0.0 && h_x.is_finite() && h_t.is_finite()) {
            return Err(FieldError::InvalidParameter(format!(
                "stencil spacings must be positive, got h_x={h_x}, h_t={h_t}"
            )));
        }
        if UnitSystem::C * h_t > 0.5 * h_x * (1.0 + 1e-12) {
            return Err(FieldError::InvalidParameter(format!(
                "stencil needs c*h_t <= h_x/2, got h_x={h_x}, h_t={h_t}"
            )));
        }
        Ok(ResidualGrid { h_x, h_t, order })
    }

    /// `h_x = λ/60` (for static sources 1/60 of the distance to the source
    /// center, at least 1/60 of the support radius) and `h_t = h_x/(2c)`.
    pub fn for_source(src: &dyn SourceModel, probe: &Vec3) -> Self {
        let s = src.support();
        let h_x = match src.wavelength() {
            Some(l) => l / 60.0,
            None => (probe - s.center()).norm().max(s.radius()).max(1e-12) / 60.0,
        };
        ResidualGrid {
            h_x,
            h_t: 0.5 * h_x / UnitSystem::C,
            order: StencilOrder::Fourth,
        }
    }

    fn offsets(&self) -> &'static [(f64, f64)] {
        // (multiple of h, weight); divide by h² (and 12 for fourth order)
        match self.order {
            StencilOrder::Second => &[(-1.0, 1.0), (1.0, 1.0)],
            StencilOrder::Fourth => &[(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)],
        }
    }

    fn center_weight(&self) -> f64 {
        match self.order {
            StencilOrder::Second => -2.0,
            StencilOrder::Fourth => -30.0,
        }
    }

    fn denominator(&self) -> f64 {
        match self.order {
            StencilOrder::Second => 1.0,
            StencilOrder::Fourth => 12.0,
        }
    }

    /// Stencil events and, in parallel, the `□` weights applied to them.
    fn events(&self, p: &SpacetimePoint) -> Vec<(SpacetimePoint, f64)> {
        let c2 = UnitSystem::C * UnitSystem::C;
        let sx = 1.0 / (self.denominator() * self.h_x * self.h_x);
        let st = 1.0 / (self.denominator() * self.h_t * self.h_t * c2);
        let mut out = vec![(*p, self.center_weight() * (3.0 * sx - st))];
        for axis in 0..4 {
            for &(k, w) in self.offsets() {
                let mut q = *p;
                if axis < 3 {
                    q.x[axis] += k * self.h_x;
                    out.push((q, w * sx));
                } else {
                    q.t += k * self.h_t;
                    out.push((q, -w * st));
                }
            }
        }
        out
    }
}

/// A normalized wave-equation residual at one probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub probe_x: [f64; 3],
    pub probe_t: f64,
    /// `absolute / scale`.
    pub normalized: f64,
    /// Norm over components of `□ψ − (source term)`.
    pub absolute: f64,
    pub scale: f64,
    pub inside_support: bool,
    pub flags: Flags,
}

fn apply_stencil<const N: usize>(grid: &ResidualGrid, p: &SpacetimePoint, f: impl Fn(&SpacetimePoint) -> [f64; N] + Sync + Send) -> ([f64; N], [f64; N]) {
    let events = grid.events(p);
    let values = ordered_map(&events, |(q, _)| f(q));
    let mut box_ = [0.0; N];
    for ((_, w), v) in events.iter().zip(&values) {
        for k in 0..N {
            box_[k] += w * v[k];
        }
    }
    (box_, values[0])
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn exterior_scale(src: &dyn SourceModel, x: &Vec3, value: f64) -> f64 {
    let dist = (x - src.support().center()).norm();
    let l = src.wavelength().map_or(dist, |l| l.min(dist)).max(1e-300);
    value / (l * l)
}

fn probe_sampler<'a>(src: &'a dyn SourceModel, p: &SpacetimePoint, q: &QuadratureSpec, outputs: Outputs) -> Result<(RetardedSampler<'a>, Flags)> {
    let (s, ev) = RetardedSampler::calibrated(src, p, q, outputs)?;
    Ok((s, ev.flags & !Flags::TRANSIENT))
}

fn finish(src: &dyn SourceModel, p: &SpacetimePoint, absolute: f64, source_norm: f64, value_norm: f64, flags: Flags) -> Residual {
    let inside = src.support().contains(&p.x);
    let scale = if inside && source_norm > 0.0 {
        FOUR_PI * source_norm
    } else {
        exterior_scale(src, &p.x, value_norm)
    };
    let normalized = if scale > 0.0 {
        absolute / scale
    } else if absolute == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Residual {
        probe_x: [p.x.x, p.x.y, p.x.z],
        probe_t: p.t,
        normalized,
        absolute,
        scale,
        inside_support: inside,
        flags,
    }
}

/// `|□A^μ + 4π j^μ|` from differenced retarded potentials.
pub fn dalembertian_residual_a(src: &dyn SourceModel, probe: &SpacetimePoint, grid: &ResidualGrid, q: &QuadratureSpec) -> Result<Residual> {
    probe.check_finite()?;
    let (sampler, flags) = probe_sampler(src, probe, q, Outputs::POTENTIAL)?;
    let (boxed, center) = apply_stencil(grid, probe, |e| {
        let r: RetardedIntegrals = sampler.integrals(&e.x, e.t, Outputs::POTENTIAL);
        [r.a0, r.a.x, r.a.y, r.a.z]
    });
    let s = src.sample(&probe.x, probe.t);
    let j = [s.charge[0], s.current[0].x, s.current[0].y, s.current[0].z];
    let mut res = [0.0; 4];
    for k in 0..4 {
        res[k] = boxed[k] + FOUR_PI * j[k] / UnitSystem::C;
    }
    Ok(finish(src, probe, norm(&res), norm(&j), norm(&center), flags))
}

/// `|□B + 4π ∇×j|` from differenced retarded fields.
pub fn dalembertian_residual_b(src: &dyn SourceModel, probe: &SpacetimePoint, grid: &ResidualGrid, q: &QuadratureSpec) -> Result<Residual> {
    probe.check_finite()?;
    let (sampler, flags) = probe_sampler(src, probe, q, Outputs::MAGNETIC)?;
    let (boxed, center) = apply_stencil(grid, probe, |e| {
        let b = sampler.integrals(&e.x, e.t, Outputs::MAGNETIC).b;
        [b.x, b.y, b.z]
    });
    let curl = src
        .curl_current(&probe.x, probe.t)
        .unwrap_or_else(|| curl_by_differences(src, &probe.x, probe.t, 1e-3 * grid.h_x));
    let c = [curl.x, curl.y, curl.z];
    let mut res = [0.0; 3];
    for k in 0..3 {
        res[k] = boxed[k] + FOUR_PI * c[k] / UnitSystem::C;
    }
    Ok(finish(src, probe, norm(&res), norm(&c), norm(&center), flags))
}

/// First nonzero response at a point outside the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Onset {
    pub point: [f64; 3],
    /// Switch-on time plus light travel time from the nearest active quadrature node.
    pub expected: f64,
    /// First scanned time with a nonzero potential.
    pub observed: f64,
    pub step: f64,
}

impl Onset {
    pub fn matches(&self) -> bool {
        self.observed > self.expected - 1e-12 * self.expected.abs().max(1.0) && self.observed <= self.expected + self.step * (1.0 + 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionReport {
    /// Largest `max(|A^μ|, |B|)` over points outside every forward light
    /// cone, relative to `peak·a²` (a = support radius).
    pub max_relative: f64,
    pub checked: usize,
    pub onsets: Vec<Onset>,
    /// False when the source has no switch-on (it has always existed).
    pub applicable: bool,
}

impl InitialConditionReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        !self.applicable || (self.max_relative < tolerance && self.onsets.iter().all(Onset::matches))
    }
}

/// Null-initial-data check at `t = t_on` and `t = t_on + τ_on/10`, plus the
/// arrival time of the first signal at each point.
pub fn initial_condition_check(src: &dyn SourceModel, points: &[Vec3], q: &QuadratureSpec) -> Result<InitialConditionReport> {
    let t_on = src.active_from();
    let support = src.support();
    if !t_on.is_finite() || support.is_empty() {
        return Ok(InitialConditionReport {
            max_relative: 0.0,
            checked: 0,
            onsets: Vec::new(),
            applicable: false,
        });
    }
    let tau_on = (src.steady_after() - t_on).max(0.0);
    let a = support.radius();
    let scale = src.peak_magnitude() * a * a;
    let coords = match src.preferred_coordinates() {
        Coordinates::Cylindrical => Coordinates::Cylindrical,
        _ => Coordinates::Spherical,
    };
    let probe = SpacetimePoint::new(support.center() + Vec3::x() * (3.0 * a.max(1e-12)), src.steady_after() + 4.0 * a);
    let (sampler, _) = RetardedSampler::calibrated(src, &probe, &q.with_coordinates(coords), Outputs::POTENTIAL)?;
    let outputs = Outputs {
        potential: true,
        magnetic: true,
        ..Outputs::NONE
    };

    let mut max_relative: f64 = 0.0;
    let mut checked = 0;
    for t in [t_on, t_on + 0.1 * tau_on] {
        for x in points {
            if support.distance_to(x) <= UnitSystem::C * (t - t_on) {
                continue;
            }
            let r = sampler.integrals(x, t, outputs);
            let m = (r.a0.abs()).max(r.a.norm()).max(r.b.norm());
            max_relative = max_relative.max(if scale > 0.0 { m / scale } else { m });
            checked += 1;
        }
    }

    let nodes = volume_nodes(&support, sampler.coordinates(), sampler.counts(), &Vec3::zeros());
    let t_probe = src.steady_after().max(t_on) + 0.37 * tau_on.max(1e-3);
    let active: Vec<Vec3> = nodes
        .iter()
        .filter(|n| !src.sample(&n.x, t_probe).is_zero())
        .map(|n| n.x)
        .collect();
    let grid_step = src.wavelength().map_or(a / 60.0, |l| l / 120.0) / UnitSystem::C;
    let mut onsets = Vec::new();
    for x in points {
        if support.distance_to(x) <= 0.0 || active.is_empty() {
            continue;
        }
        let d_min = active.iter().map(|n| (x - n).norm()).fold(f64::INFINITY, f64::min);
        let expected = t_on + d_min / UnitSystem::C;
        let mut t = expected - 3.0 * grid_step;
        let mut observed = f64::NAN;
        for _ in 0..64 {
            let r = sampler.integrals(x, t, Outputs::POTENTIAL);
            if r.a0 != 0.0 || r.a.norm() != 0.0 {
                observed = t;
                break;
            }
            t += grid_step;
        }
        onsets.push(Onset {
            point: [x.x, x.y, x.z],
            expected,
            observed,
            step: grid_step,
        });
    }
    Ok(InitialConditionReport {
        max_relative,
        checked,
        onsets,
        applicable: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{HertzianDipoleSource, StaticChargeBlob, ZeroSource};

    #[test]
    fn grid_ordering_enforced() {
        assert!(ResidualGrid::new(0.1, 0.05, StencilOrder::Fourth).is_ok());
        assert!(ResidualGrid::new(0.1, 0.06, StencilOrder::Fourth).is_err());
        assert!(ResidualGrid::new(0.0, 0.0, StencilOrder::Second).is_err());
    }

    #[test]
    fn stencil_is_exact_for_quadratics() {
        let g = ResidualGrid::new(0.1, 0.05, StencilOrder::Fourth).unwrap();
        let p = SpacetimePoint::new(Vec3::new(0.3, -0.2, 1.0), 2.0);
        // □(x² + 2y² − z² + 3t²) = 2 + 4 − 2 − 6 = −2
        let (b, _) = apply_stencil(&g, &p, |e| [e.x.x.powi(2) + 2.0 * e.x.y.powi(2) - e.x.z.powi(2) + 3.0 * e.t.powi(2)]);
        assert!((b[0] + 2.0).abs() < 1e-9);
        let g = ResidualGrid::new(0.1, 0.05, StencilOrder::Second).unwrap();
        let (b, _) = apply_stencil(&g, &p, |e| [e.x.x.powi(2) + 2.0 * e.x.y.powi(2) - e.x.z.powi(2) + 3.0 * e.t.powi(2)]);
        assert!((b[0] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_source_has_zero_residual() {
        let p = SpacetimePoint::new(Vec3::new(1.0, 0.0, 0.0), 3.0);
        let g = ResidualGrid::new(0.1, 0.05, StencilOrder::Fourth).unwrap();
        let q = QuadratureSpec::default();
        assert_eq!(dalembertian_residual_a(&ZeroSource, &p, &g, &q).unwrap().absolute, 0.0);
        assert_eq!(dalembertian_residual_b(&ZeroSource, &p, &g, &q).unwrap().normalized, 0.0);
    }

    #[test]
    fn coulomb_exterior_is_harmonic() {
        let blob = StaticChargeBlob::new(1.0, 0.2).unwrap();
        let p = SpacetimePoint::new(Vec3::new(3.0, 1.0, -2.0), 1.0);
        let g = ResidualGrid::for_source(&blob, &p.x);
        let r = dalembertian_residual_a(&blob, &p, &g, &QuadratureSpec::default()).unwrap();
        assert!(!r.inside_support);
        assert!(r.normalized < 1e-3, "{r:?}");
    }

    #[test]
    fn dipole_initial_data_is_null() {
        let d = HertzianDipoleSource::unit_wavelength();
        let pts = [Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 3.0)];
        let r = initial_condition_check(&d, &pts, &QuadratureSpec::default()).unwrap();
        assert!(r.applicable);
        assert!(r.checked >= 2);
        assert_eq!(r.max_relative, 0.0);
        for o in &r.onsets {
            assert!(o.matches(), "{o:?}");
        }
        let blob = StaticChargeBlob::new(1.0, 0.2).unwrap();
        assert!(!initial_condition_check(&blob, &pts, &QuadratureSpec::default()).unwrap().applicable);
    }
}
