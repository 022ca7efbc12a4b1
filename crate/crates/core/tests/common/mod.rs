//! Independent reference values for integration and acceptance tests.
//!
//! Nothing here calls into the quadrature or kernel code of the library; the
//! oracles are closed-form fields written out from scratch.

#![allow(dead_code)]

use fieldlab::field::PlaneWaveGauge;
use fieldlab::Vec3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Analytic fields of a Gaussian-smeared oscillating dipole
/// `p(t) = p₀ sin(ωt) â`, valid outside the smearing after switch-on.
///
/// A spherically symmetric smearing only multiplies the exterior field of
/// the point dipole by its form factor `exp(−k²σ²/2)`.
#[derive(Debug, Clone, Copy)]
pub struct DipoleOracle {
    pub moment: f64,
    pub omega: f64,
    pub sigma: f64,
    pub axis: Vec3,
    pub center: Vec3,
}

pub struct DipoleFields {
    pub a0: f64,
    pub a: Vec3,
    pub e: Vec3,
    pub b: Vec3,
}

impl DipoleOracle {
    pub fn new(moment: f64, omega: f64, sigma: f64, axis: Vec3, center: Vec3) -> Self {
        DipoleOracle {
            moment,
            omega,
            sigma,
            axis: axis.normalize(),
            center,
        }
    }

    fn form_factor(&self) -> f64 {
        (-0.5 * (self.omega * self.sigma).powi(2)).exp()
    }

    /// `p, ṗ, p̈` at time `t`.
    fn moments(&self, t: f64) -> [Vec3; 3] {
        let a = self.moment * self.form_factor();
        let w = self.omega;
        let (s, c) = (w * t).sin_cos();
        [self.axis * (a * s), self.axis * (a * w * c), self.axis * (-a * w * w * s)]
    }

    pub fn fields(&self, x: &Vec3, t: f64) -> DipoleFields {
        let d = x - self.center;
        let r = d.norm();
        let n = d / r;
        let [p, pd, pdd] = self.moments(t - r);
        let r2 = r * r;
        let r3 = r2 * r;
        DipoleFields {
            a0: n.dot(&p) / r2 + n.dot(&pd) / r,
            a: pd / r,
            e: (n * (3.0 * n.dot(&p)) - p) / r3 + (n * (3.0 * n.dot(&pd)) - pd) / r2 + n.cross(&n.cross(&pdd)) / r,
            b: (pd / r2 + pdd / r).cross(&n),
        }
    }

    pub fn b(&self, x: &Vec3, t: f64) -> Vec3 {
        self.fields(x, t).b
    }

    /// Radiation-zone amplitude of `|B|`, `F p₀ ω² sinθ / r`.
    pub fn far_zone_b_amplitude(&self, x: &Vec3) -> f64 {
        let d = x - self.center;
        let r = d.norm();
        let sin = self.axis.cross(&(d / r)).norm();
        self.form_factor() * self.moment * self.omega * self.omega * sin / r
    }

    /// Period maximum of `|B(x, ·)|` from the exact field, by dense sampling.
    pub fn b_period_max(&self, x: &Vec3) -> f64 {
        let n = 2000;
        let period = 2.0 * std::f64::consts::PI / self.omega;
        (0..n)
            .map(|i| self.b(x, 100.0 * period + period * i as f64 / n as f64).norm())
            .fold(0.0, f64::max)
    }

    /// `∂_c B_k` by Richardson-extrapolated central differences of the exact field.
    pub fn grad_b(&self, x: &Vec3, t: f64) -> [[f64; 3]; 3] {
        let h = 1e-3 * (x - self.center).norm().min(1.0 / self.omega);
        let mut g = [[0.0; 3]; 3];
        for (c, row) in g.iter_mut().enumerate() {
            let mut e = Vec3::zeros();
            e[c] = 1.0;
            let diff = |s: f64| (self.b(&(x + e * s), t) - self.b(&(x - e * s), t)) / (2.0 * s);
            let rich = (diff(0.5 * h) * 4.0 - diff(h)) / 3.0;
            for k in 0..3 {
                row[k] = rich[k];
            }
        }
        g
    }
}

/// Electric field of a point charge (also the exterior field of a spherical blob).
pub fn coulomb_e(q: f64, center: &Vec3, x: &Vec3) -> Vec3 {
    let d = x - center;
    d * (q / d.norm().powi(3))
}

/// Frobenius norm of `∇E` for a point charge: `√6 |q| / r³`.
pub fn coulomb_grad_e_norm(q: f64, r: f64) -> f64 {
    6f64.sqrt() * q.abs() / r.powi(3)
}

/// `c·R^α` on a geometric grid with multiplicative noise of relative size `noise`.
pub fn planted_power_law(alpha: f64, prefactor: f64, r0: f64, ratio: f64, n: usize, noise: f64, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let r = r0 * ratio.powi(i as i32);
            let eps: f64 = rng.gen_range(-1.0..1.0) * noise;
            (r, prefactor * r.powf(alpha) * (1.0 + eps))
        })
        .collect()
}

/// A vacuum plane-wave gauge function with random amplitude, direction and phase.
pub fn random_gauge(rng: &mut impl Rng, k_max: f64, amplitude_max: f64) -> PlaneWaveGauge {
    let k = random_unit(rng) * rng.gen_range(0.1 * k_max..k_max);
    PlaneWaveGauge::new(
        rng.gen_range(0.1 * amplitude_max..amplitude_max),
        k,
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn rel_vec(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm() / b.norm()
}
