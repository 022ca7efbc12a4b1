use super::{periodic_trapezoid, Coordinates, GaussLegendre};
use crate::source::{SourceModel, Support};
use crate::Vec3;

/// A source-volume quadrature node: position and weight (volume element included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceNode {
    pub x: Vec3,
    pub w: f64,
}

/// Concrete coordinate system for an observation point.
///
/// `Auto` resolves to observer-centered coordinates for points inside the
/// support's bounding ball and to the source's own system elsewhere. A
/// cylindrical request on a non-cylindrical support falls back to spherical.
pub fn resolve_coordinates(requested: Coordinates, src: &dyn SourceModel, observer: &Vec3) -> Coordinates {
    let support = src.support();
    let coords = match requested {
        Coordinates::Auto => match support.bounding_ball() {
            Some((c, a)) if (observer - c).norm() < a => Coordinates::ObserverCentered,
            _ => src.preferred_coordinates(),
        },
        other => other,
    };
    match (coords, support) {
        (Coordinates::Cylindrical, Support::Cylinder { .. }) => Coordinates::Cylindrical,
        (Coordinates::Cylindrical, _) => Coordinates::Spherical,
        (c, _) => c,
    }
}

/// Quadrature nodes covering the support. `observer` is only used by
/// observer-centered grids.
pub fn volume_nodes(support: &Support, coordinates: Coordinates, counts: [usize; 3], observer: &Vec3) -> Vec<SourceNode> {
    let Some((center, radius)) = support.bounding_ball() else {
        return Vec::new();
    };
    match (coordinates, support) {
        (
            Coordinates::Cylindrical,
            &Support::Cylinder {
                center,
                r_min,
                r_max,
                half_height,
            },
        ) => cylindrical(center, r_min, r_max, half_height, counts),
        (Coordinates::ObserverCentered, _) => observer_centered(center, radius, observer, counts),
        _ => spherical(center, radius, counts),
    }
}

fn cylindrical(center: Vec3, r_min: f64, r_max: f64, half_height: f64, counts: [usize; 3]) -> Vec<SourceNode> {
    let gr = GaussLegendre::new(counts[0]);
    let gz = GaussLegendre::new(counts[2]);
    let azimuth: Vec<(f64, f64, f64)> = periodic_trapezoid(counts[1])
        .map(|(phi, w)| {
            let (s, c) = phi.sin_cos();
            (c, s, w)
        })
        .collect();
    let mut nodes = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
    for (r, wr) in gr.on(r_min, r_max) {
        for &(c, s, wp) in &azimuth {
            for (z, wz) in gz.on(-half_height, half_height) {
                nodes.push(SourceNode {
                    x: center + Vec3::new(r * c, r * s, z),
                    w: wr * r * wp * wz,
                });
            }
        }
    }
    nodes
}

fn spherical(center: Vec3, radius: f64, counts: [usize; 3]) -> Vec<SourceNode> {
    let gr = GaussLegendre::new(counts[0]);
    let gu = GaussLegendre::new(counts[1]);
    let directions = sphere_directions(&gu, counts[2], &Frame::standard());
    let mut nodes = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
    for (r, wr) in gr.on(0.0, radius) {
        for &(n, wd) in &directions {
            nodes.push(SourceNode {
                x: center + n * r,
                w: wr * r * r * wd,
            });
        }
    }
    nodes
}

/// `x = observer + s·n̂` for every ray direction, `s` spanning the chord
/// through the bounding ball. The `s²` Jacobian removes the `1/R` and `1/R²`
/// kernel singularities at the observer.
fn observer_centered(center: Vec3, radius: f64, observer: &Vec3, counts: [usize; 3]) -> Vec<SourceNode> {
    let gs = GaussLegendre::new(counts[0]);
    let gu = GaussLegendre::new(counts[1]);
    let q = observer - center;
    let frame = match q.try_normalize(1e-300) {
        Some(axis) => Frame::with_axis(&axis),
        None => Frame::standard(),
    };
    let directions = sphere_directions(&gu, counts[2], &frame);
    let mut nodes = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
    let q2 = q.norm_squared();
    for &(n, wd) in &directions {
        let b = n.dot(&q);
        let disc = b * b - q2 + radius * radius;
        if disc <= 0.0 {
            continue;
        }
        let root = disc.sqrt();
        let s_lo = (-b - root).max(0.0);
        let s_hi = -b + root;
        if s_hi <= s_lo {
            continue;
        }
        for (s, ws) in gs.on(s_lo, s_hi) {
            nodes.push(SourceNode {
                x: observer + n * s,
                w: ws * s * s * wd,
            });
        }
    }
    nodes
}

/// Orthonormal frame `(e1, e2, axis)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub axis: Vec3,
}

impl Frame {
    pub fn standard() -> Self {
        Frame {
            e1: Vec3::x(),
            e2: Vec3::y(),
            axis: Vec3::z(),
        }
    }

    pub fn with_axis(axis: &Vec3) -> Self {
        let axis = axis.normalize();
        let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (helper - axis * helper.dot(&axis)).normalize();
        let e2 = axis.cross(&e1);
        Frame { e1, e2, axis }
    }

    pub fn direction(&self, cos_polar: f64, azimuth: f64) -> Vec3 {
        let sin_polar = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
        let (s, c) = azimuth.sin_cos();
        self.axis * cos_polar + (self.e1 * c + self.e2 * s) * sin_polar
    }
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` about the
/// frame axis times the periodic trapezoid rule in azimuth.
pub(crate) fn sphere_directions(polar: &GaussLegendre, n_azimuth: usize, frame: &Frame) -> Vec<(Vec3, f64)> {
    let azimuth: Vec<(f64, f64)> = periodic_trapezoid(n_azimuth).collect();
    let mut out = Vec::with_capacity(polar.len() * n_azimuth);
    for (u, wu) in polar.on(-1.0, 1.0) {
        for &(b, wb) in &azimuth {
            out.push((frame.direction(u, b), wu * wb));
        }
    }
    out
}
