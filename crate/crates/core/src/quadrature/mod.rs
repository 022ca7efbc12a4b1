//! One-dimensional rules and the volume grids built from them.

pub(crate) mod volume;

use serde::{Deserialize, Serialize};

pub use volume::{resolve_coordinates, volume_nodes, SourceNode};

use crate::{FieldError, Result};

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Tricomi initial guess; weights `2 / ((1 − x²) P_n'(x)²)`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equal-weight rule for periodic integrands on `[0, 2π)`.
pub fn periodic_trapezoid(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(move |j| (j as f64 * h, h))
}

/// Volume coordinate system used to place source quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinates {
    /// Observer-centered inside the support, the source's natural system outside.
    #[default]
    Auto,
    /// Gauss–Legendre in `r` and `z`, trapezoid in `φ`, aligned with the rotation axis.
    Cylindrical,
    /// Gauss–Legendre in radius and `cos θ`, trapezoid in `φ`, about the support center.
    Spherical,
    /// Spherical about the observation point; absorbs the `1/R` singularity.
    ObserverCentered,
}

/// Node counts, coordinates and refinement policy for the retarded volume integral.
///
/// Refinement doubles every count until two successive estimates differ by
/// less than `tolerance` relative to the finer one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub coordinates: Coordinates,
    /// Starting counts; the source's own hint when `None`.
    pub counts: Option<[usize; 3]>,
    pub tolerance: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            coordinates: Coordinates::Auto,
            counts: None,
            tolerance: 1e-6,
            max_refinements: 3,
        }
    }
}

impl QuadratureSpec {
    /// A single evaluation at exactly these counts.
    pub fn fixed(coordinates: Coordinates, counts: [usize; 3]) -> Self {
        QuadratureSpec {
            coordinates,
            counts: Some(counts),
            tolerance: f64::INFINITY,
            max_refinements: 0,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_counts(mut self, counts: [usize; 3]) -> Self {
        self.counts = Some(counts);
        self
    }

    pub fn with_coordinates(mut self, coordinates: Coordinates) -> Self {
        self.coordinates = coordinates;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.counts {
            if c.iter().any(|&n| n < 2) {
                return Err(FieldError::InvalidParameter(format!(
                    "quadrature node counts must be >= 2, got {c:?}"
                )));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(FieldError::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}
