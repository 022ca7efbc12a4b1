mod common;

use common::{random_gauge, rel_vec, DipoleOracle};
use fieldlab::field::{
    field_from_potential, field_source_term, gauge_transform, lorenz_of, lorenz_residual, FieldOptions, GaugeFunction,
    Provenance,
};
use fieldlab::greens::{default_step, fd_jacobian, steady_time, Outputs, RetardedSampler};
use fieldlab::quadrature::QuadratureSpec;
use fieldlab::source::{HertzianDipoleSource, RotatingPolarizationSource, SourceModel, SourceSample, Support};
use fieldlab::{FieldError, SpacetimePoint, Vec3};
use proptest::prelude::*;

#[test]
fn analytic_and_differenced_fields_agree() {
    let d = HertzianDipoleSource::unit_wavelength().with_axis(Vec3::new(1.0, 1.0, 0.2)).unwrap();
    let o = DipoleOracle::new(1.0, d.omega(), d.sigma(), d.axis(), Vec3::zeros());
    let x = Vec3::new(2.0, -1.0, 0.5);
    let p = SpacetimePoint::new(x, steady_time(&d, &x) + 0.21);
    let q = QuadratureSpec::default();
    let analytic = field_from_potential(&d, &p, &q, FieldOptions::default().with_gradient()).unwrap();
    let fd = field_from_potential(&d, &p, &q, FieldOptions::default().finite_difference(None)).unwrap();
    let exact = o.fields(&x, p.t);
    assert_eq!(analytic.provenance, Provenance::FromPotential);
    assert!(rel_vec(&analytic.b, &exact.b) < 1e-6);
    assert!(rel_vec(&fd.b, &exact.b) < 1e-6);
    assert!(rel_vec(&analytic.e.unwrap(), &exact.e) < 1e-6);
    assert!(rel_vec(&fd.e.unwrap(), &exact.e) < 1e-6);

    let g = analytic.grad_b.unwrap();
    let oracle = o.grad_b(&x, p.t);
    let scale = g.norm();
    for c in 0..3 {
        for k in 0..3 {
            assert!((g[(c, k)] - oracle[c][k]).abs() < 1e-5 * scale, "dB at ({c},{k})");
        }
    }
}

#[test]
fn source_term_matches_potential_route_for_dipole() {
    let d = HertzianDipoleSource::unit_wavelength();
    let q = QuadratureSpec::default();
    let mut rng = common::rng(7);
    for _ in 0..5 {
        let x = common::random_unit(&mut rng) * 6.0;
        let p = SpacetimePoint::new(x, steady_time(&d, &x) + 0.4);
        let a = field_from_potential(&d, &p, &q, FieldOptions::magnetic_only()).unwrap();
        let b = field_source_term(&d, &p, &q).unwrap();
        assert_eq!(b.provenance, Provenance::SourceTermOnly);
        assert!(b.e.is_none());
        assert!(rel_vec(&b.b, &a.b) < 1e-6);
    }
}

#[test]
fn source_term_matches_potential_route_for_superluminal_source() {
    let s = RotatingPolarizationSource::desk_scale();
    assert!(s.is_superluminal());
    let q = QuadratureSpec::default();
    let x = Vec3::new(3.0, 1.0, 2.0);
    let p = SpacetimePoint::new(x, steady_time(&s, &x) + 0.1);
    let a = field_from_potential(&s, &p, &q, FieldOptions::magnetic_only()).unwrap();
    let b = field_source_term(&s, &p, &q).unwrap();
    assert!(rel_vec(&b.b, &a.b) < 1e-6, "{:?} vs {:?}", b.b, a.b);
}

#[derive(Debug)]
struct NoCurl(HertzianDipoleSource);

impl SourceModel for NoCurl {
    fn sample(&self, x: &Vec3, t: f64) -> SourceSample {
        self.0.sample(x, t)
    }
    fn support(&self) -> Support {
        self.0.support()
    }
    fn steady_after(&self) -> f64 {
        self.0.steady_after()
    }
    fn frequency(&self) -> Option<f64> {
        self.0.frequency()
    }
    fn peak_magnitude(&self) -> f64 {
        self.0.peak_magnitude()
    }
    fn base_counts(&self, c: fieldlab::quadrature::Coordinates) -> [usize; 3] {
        self.0.base_counts(c)
    }
}

#[test]
fn source_term_needs_an_analytic_curl() {
    let s = NoCurl(HertzianDipoleSource::unit_wavelength());
    let p = SpacetimePoint::new(Vec3::new(3.0, 0.0, 0.0), 10.0);
    assert!(matches!(
        field_source_term(&s, &p, &QuadratureSpec::default()),
        Err(FieldError::CurlUnavailable)
    ));
}

#[test]
fn retarded_potential_satisfies_lorenz_condition() {
    let d = HertzianDipoleSource::unit_wavelength().with_axis(Vec3::new(0.2, 1.0, 0.0)).unwrap();
    let x = Vec3::new(0.9, 0.4, -0.3);
    let p = SpacetimePoint::new(x, steady_time(&d, &x) + 0.33);
    let q = QuadratureSpec::default().with_tolerance(1e-10);
    let l = lorenz_residual(&d, &p, &q, default_step(&d, &x)).unwrap();
    assert!(l.value < 1e-6 * l.divergence, "{l:?}");
}

#[test]
fn random_gauges_leave_fields_unchanged() {
    let d = HertzianDipoleSource::unit_wavelength();
    let x = Vec3::new(1.2, -0.7, 2.1);
    let p = SpacetimePoint::new(x, steady_time(&d, &x) + 0.17);
    let q = QuadratureSpec::default();
    let (sampler, _) = RetardedSampler::calibrated(&d, &p, &q, Outputs::POTENTIAL).unwrap();
    let h = default_step(&d, &x);
    let base = fd_jacobian(&sampler, &p, h);
    let base_lorenz = lorenz_of(&sampler, &p, h);
    let mut rng = common::rng(2024);
    for _ in 0..10 {
        let g = random_gauge(&mut rng, 2.0 * d.omega(), 1.0);
        assert!(g.dalembertian_residual(&x, p.t, 1e-3) < 1e-5);
        let gauged = gauge_transform(&sampler, g);
        let jac = fd_jacobian(&gauged, &p, h);
        assert!(rel_vec(&jac.curl(), &base.curl()) < 1e-6);
        assert!(rel_vec(&jac.electric(), &base.electric()) < 1e-6);
        let l = lorenz_of(&gauged, &p, h);
        assert!((l.value - base_lorenz.value).abs() < 1e-8);
        // the gauge term itself is not small
        assert!(g.gradient(&x, p.t).norm() + g.time_derivative(&x, p.t).abs() > 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_invariance_of_b(ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in -1.0f64..1.0, k in 0.5f64..20.0, amp in 0.01f64..10.0, phase in 0.0f64..6.3) {
        let dir = Vec3::new(ax, ay, az);
        prop_assume!(dir.norm() > 0.1);
        let d = HertzianDipoleSource::unit_wavelength();
        let x = Vec3::new(-1.5, 0.3, 0.8);
        let p = SpacetimePoint::new(x, steady_time(&d, &x) + 0.5);
        let sampler = RetardedSampler::new(&d, fieldlab::quadrature::Coordinates::Spherical, [24, 12, 16]);
        let g = fieldlab::field::PlaneWaveGauge::new(amp, dir.normalize() * k, phase);
        let h = default_step(&d, &x);
        let b0 = fd_jacobian(&sampler, &p, h).curl();
        let b1 = fd_jacobian(&gauge_transform(&sampler, g), &p, h).curl();
        prop_assert!((b1 - b0).norm() <= 1e-6 * b0.norm());
    }
}
