//! Quadrature meshes on spheres.
//!
//! Two families: icosahedral geodesic meshes (one node per spherical
//! triangle, weight = exact triangle area) for full-sphere scans, and
//! product meshes aligned with an observation point (Gauss–Legendre in the
//! polar cosine about the observer axis, periodic trapezoid in azimuth) for
//! oscillatory surface integrals, where the retardation phase depends on the
//! polar angle only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::volume::{sphere_directions, Frame};
use crate::quadrature::GaussLegendre;
use crate::{FieldError, Result, Vec3};

/// Normal direction relative to the sphere center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Normals point away from the center (outward from the enclosed ball).
    Outward,
    /// Normals point toward the center (outward from the exterior region).
    Inward,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceNode {
    pub x: Vec3,
    /// Unit normal, already oriented.
    pub normal: Vec3,
    pub w: f64,
}

/// How a mesh was built, so that it can be refined.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshKind {
    Geodesic {
        level: u32,
        /// Directions and angular radius of locally refined caps.
        refine_axes: Vec<Vec3>,
        refine_radius: f64,
    },
    Aligned {
        axis: Vec3,
        n_polar: usize,
        n_azimuth: usize,
    },
}

/// A sphere with quadrature nodes, weights (summing to `4πR²`) and oriented normals.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalBoundary {
    center: Vec3,
    radius: f64,
    orientation: Orientation,
    nodes: Vec<SurfaceNode>,
    kind: MeshKind,
}

type Triangle = [Vec3; 3];

fn icosahedron() -> Vec<Triangle> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let v: Vec<Vec3> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    const FACES: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    FACES.iter().map(|f| [v[f[0]], v[f[1]], v[f[2]]]).collect()
}

fn split(t: &Triangle) -> [Triangle; 4] {
    let [a, b, c] = *t;
    let ab = (a + b).normalize();
    let bc = (b + c).normalize();
    let ca = (c + a).normalize();
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
}

/// Solid angle of a spherical triangle with unit-vector corners.
fn spherical_area(t: &Triangle) -> f64 {
    let [a, b, c] = *t;
    let num = a.dot(&b.cross(&c)).abs();
    let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * num.atan2(den)
}

fn geodesic_triangles(level: u32, axes: &[Vec3], cap: f64) -> Vec<Triangle> {
    let mut tris = icosahedron();
    for _ in 0..level {
        tris = tris.iter().flat_map(split).collect();
    }
    if axes.is_empty() {
        return tris;
    }
    let cos_cap = cap.min(PI).cos();
    tris.iter()
        .flat_map(|t| {
            let c = (t[0] + t[1] + t[2]).normalize();
            if axes.iter().any(|a| a.dot(&c) >= cos_cap) {
                split(t).to_vec()
            } else {
                vec![*t]
            }
        })
        .collect()
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(FieldError::InvalidParameter(format!("sphere radius must be positive, got {radius}")))
    }
}

impl SphericalBoundary {
    /// Geodesic mesh with `20·4^level` cells.
    pub fn geodesic(center: Vec3, radius: f64, level: u32, orientation: Orientation) -> Result<Self> {
        Self::geodesic_refined(center, radius, level, orientation, &[], 0.0)
    }

    /// Geodesic mesh whose cells within angular distance `cap` of any of
    /// `axes` are split once more (four times the node density).
    pub fn geodesic_refined(center: Vec3, radius: f64, level: u32, orientation: Orientation, axes: &[Vec3], cap: f64) -> Result<Self> {
        check_radius(radius)?;
        if level > 9 {
            return Err(FieldError::InvalidParameter(format!("geodesic level {level} exceeds 9")));
        }
        let axes: Vec<Vec3> = axes.iter().filter_map(|a| a.try_normalize(0.0)).collect();
        let r2 = radius * radius;
        let s = orientation.sign();
        let nodes = geodesic_triangles(level, &axes, cap)
            .iter()
            .map(|t| {
                let n = (t[0] + t[1] + t[2]).normalize();
                SurfaceNode {
                    x: center + n * radius,
                    normal: n * s,
                    w: spherical_area(t) * r2,
                }
            })
            .collect();
        Ok(SphericalBoundary {
            center,
            radius,
            orientation,
            nodes,
            kind: MeshKind::Geodesic {
                level,
                refine_axes: axes,
                refine_radius: cap,
            },
        })
    }

    /// Product mesh with polar axis `axis` (through the center).
    pub fn aligned(center: Vec3, radius: f64, axis: Vec3, n_polar: usize, n_azimuth: usize, orientation: Orientation) -> Result<Self> {
        check_radius(radius)?;
        if n_polar < 2 || n_azimuth < 2 {
            return Err(FieldError::InvalidParameter(format!(
                "aligned mesh needs at least 2x2 nodes, got {n_polar}x{n_azimuth}"
            )));
        }
        let axis = axis.try_normalize(0.0).unwrap_or_else(Vec3::z);
        let gl = GaussLegendre::new(n_polar);
        let s = orientation.sign();
        let r2 = radius * radius;
        let nodes = sphere_directions(&gl, n_azimuth, &Frame::with_axis(&axis))
            .into_iter()
            .map(|(n, w)| SurfaceNode {
                x: center + n * radius,
                normal: n * s,
                w: w * r2,
            })
            .collect();
        Ok(SphericalBoundary {
            center,
            radius,
            orientation,
            nodes,
            kind: MeshKind::Aligned {
                axis,
                n_polar,
                n_azimuth,
            },
        })
    }

    /// Aligned mesh sized for a monochromatic field of wavenumber `k`
    /// radiated by a source of extent `source_extent` (distance from the
    /// sphere center to the farthest source point), observed at `x_p`.
    ///
    /// The retardation phase `k·|x_P − x|` varies along the polar angle at
    /// rate up to `kRρ/d_min`; the field's own angular content is bounded by
    /// `L ≈ k·extent + 10`.
    pub fn for_observer(center: Vec3, radius: f64, x_p: &Vec3, k: f64, source_extent: f64, orientation: Orientation) -> Result<Self> {
        check_radius(radius)?;
        let q = x_p - center;
        let rho = q.norm();
        let d_min = (rho - radius).abs();
        if d_min <= 1e-9 * radius {
            return Err(FieldError::GeometryViolation(format!(
                "observation point lies on the sphere of radius {radius}"
            )));
        }
        let l = k.abs() * source_extent + 10.0;
        let phase_rate = k.abs() * radius * rho / d_min;
        let geometric = radius.max(rho) / d_min;
        let alpha = phase_rate + l + 4.0 * geometric;
        let n_polar = ((alpha + 10.0 * alpha.cbrt()) / 2.0).ceil() as usize + 10;
        let n_azimuth = 2 * l.ceil() as usize + 8;
        let axis = if rho > 0.0 { q / rho } else { Vec3::z() };
        Self::aligned(center, radius, axis, n_polar, n_azimuth, orientation)
    }

    /// The same sphere at twice the linear node density.
    pub fn refined(&self) -> Result<Self> {
        match &self.kind {
            MeshKind::Geodesic {
                level,
                refine_axes,
                refine_radius,
            } => Self::geodesic_refined(self.center, self.radius, level + 1, self.orientation, refine_axes, *refine_radius),
            MeshKind::Aligned {
                axis,
                n_polar,
                n_azimuth,
            } => Self::aligned(self.center, self.radius, *axis, 2 * n_polar, 2 * n_azimuth, self.orientation),
        }
    }

    /// Same nodes with normals flipped as needed.
    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        if orientation == self.orientation {
            return self.clone();
        }
        let mut out = self.clone();
        out.orientation = orientation;
        for n in &mut out.nodes {
            n.normal = -n.normal;
        }
        out
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn nodes(&self) -> &[SurfaceNode] {
        &self.nodes
    }

    pub fn kind(&self) -> &MeshKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.w).sum()
    }

    /// Signed distance of `x` from the sphere (negative inside).
    pub fn signed_distance(&self, x: &Vec3) -> f64 {
        (x - self.center).norm() - self.radius
    }

    /// Strictly inside, with a relative margin of `10⁻⁹ R`.
    pub fn encloses(&self, x: &Vec3) -> bool {
        self.signed_distance(x) < -1e-9 * self.radius
    }

    pub fn excludes(&self, x: &Vec3) -> bool {
        self.signed_distance(x) > 1e-9 * self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_weights_sum_to_sphere_area() {
        for level in 0..5 {
            let s = SphericalBoundary::geodesic(Vec3::new(1.0, 0.0, 0.0), 3.0, level, Orientation::Outward).unwrap();
            assert_eq!(s.len(), 20 * 4usize.pow(level));
            let area = 4.0 * PI * 9.0;
            assert!((s.total_weight() / area - 1.0).abs() < 1e-10);
            for n in s.nodes() {
                assert!((n.normal.norm() - 1.0).abs() < 1e-14);
                assert!(((n.x - s.center()).norm() - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn local_refinement_keeps_area_and_adds_nodes() {
        let axis = Vec3::new(0.0, 1.0, 1.0);
        let s = SphericalBoundary::geodesic_refined(Vec3::zeros(), 2.0, 3, Orientation::Outward, &[axis], 0.3).unwrap();
        assert!(s.len() > 1280);
        assert!((s.total_weight() / (16.0 * PI) - 1.0).abs() < 1e-10);
        let fine = s.refined().unwrap();
        assert!(fine.len() > 4 * 1280);
    }

    #[test]
    fn aligned_mesh_integrates_harmonics() {
        let axis = Vec3::new(1.0, 1.0, 0.0);
        let s = SphericalBoundary::aligned(Vec3::zeros(), 1.0, axis, 12, 16, Orientation::Inward).unwrap();
        assert!((s.total_weight() - 4.0 * PI).abs() < 1e-12);
        // ∮ z² dΩ = 4π/3, independent of the mesh axis
        let z2: f64 = s.nodes().iter().map(|n| n.w * n.x.z * n.x.z).sum();
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!(s.nodes().iter().all(|n| (n.normal + n.x).norm() < 1e-14));
    }

    #[test]
    fn orientation_flip() {
        let s = SphericalBoundary::geodesic(Vec3::zeros(), 1.0, 1, Orientation::Outward).unwrap();
        let f = s.with_orientation(Orientation::Inward);
        for (a, b) in s.nodes().iter().zip(f.nodes()) {
            assert_eq!(a.normal, -b.normal);
        }
    }

    #[test]
    fn observer_on_sphere_rejected() {
        let r = SphericalBoundary::for_observer(Vec3::zeros(), 2.0, &Vec3::new(0.0, 2.0, 0.0), 1.0, 1.0, Orientation::Outward);
        assert!(matches!(r, Err(FieldError::GeometryViolation(_))));
        assert!(SphericalBoundary::geodesic(Vec3::zeros(), -1.0, 2, Orientation::Outward).is_err());
    }
}
