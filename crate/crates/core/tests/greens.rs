mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{rel, rel_vec, DipoleOracle};
use fieldlab::greens::{evaluate, retarded_potential, retarded_time, steady_time, Outputs};
use fieldlab::quadrature::QuadratureSpec;
use fieldlab::source::{HertzianDipoleSource, StaticChargeBlob, Superposition, ZeroSource};
use fieldlab::{Flags, SpacetimePoint, Vec3};
use proptest::prelude::*;

fn dipole() -> (HertzianDipoleSource, DipoleOracle) {
    let axis = Vec3::new(0.3, -0.2, 1.0);
    let d = HertzianDipoleSource::new(1.3, 2.0 * PI, 0.05).unwrap().with_axis(axis).unwrap();
    let o = DipoleOracle::new(1.3, 2.0 * PI, 0.05, axis, Vec3::zeros());
    (d, o)
}

#[test]
fn dipole_potential_and_fields_match_oracle() {
    let (d, o) = dipole();
    let q = QuadratureSpec::default();
    for (x, dt) in [
        (Vec3::new(0.7, 0.2, -0.4), 0.13),
        (Vec3::new(-2.0, 3.0, 1.0), 0.61),
        (Vec3::new(10.0, -4.0, 6.0), 0.37),
    ] {
        let t = steady_time(&d, &x) + dt;
        let ev = evaluate(&d, &SpacetimePoint::new(x, t), &q, Outputs::POTENTIAL | Outputs::MAGNETIC | Outputs::ELECTRIC).unwrap();
        assert!(!ev.flags.is_unconverged());
        let exact = o.fields(&x, t);
        let i = &ev.integrals;
        let scale = exact.a.norm().max(exact.a0.abs());
        assert!((i.a - exact.a).norm() < 1e-6 * scale, "A at {x:?}");
        assert!((i.a0 - exact.a0).abs() < 1e-6 * scale, "A0 at {x:?}");
        assert!(rel_vec(&i.b, &exact.b) < 1e-6, "B at {x:?}: {:?} vs {:?}", i.b, exact.b);
        assert!(rel_vec(&i.e, &exact.e) < 1e-6, "E at {x:?}");
    }
}

#[test]
fn blob_is_coulomb_outside() {
    let center = Vec3::new(0.5, -1.0, 2.0);
    let blob = StaticChargeBlob::new(-2.5, 0.2).unwrap().with_center(center);
    let q = QuadratureSpec::default();
    for x in [Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.5, -1.0, 2.0 + 2.0 * blob.truncation_radius())] {
        let ev = evaluate(&blob, &SpacetimePoint::new(x, 0.0), &q, Outputs::POTENTIAL | Outputs::MAGNETIC | Outputs::ELECTRIC).unwrap();
        let exact = common::coulomb_e(-2.5, &center, &x);
        assert!(rel_vec(&ev.integrals.e, &exact) < 1e-8);
        assert!(rel(ev.integrals.a0, -2.5 / (x - center).norm()) < 1e-8);
        assert_eq!(ev.integrals.b, Vec3::zeros());
        assert_eq!(ev.integrals.a, Vec3::zeros());
    }
}

#[test]
fn causality_before_first_light() {
    let (d, _) = dipole();
    let x = Vec3::new(5.0, 0.0, 0.0);
    let earliest = (x.norm() - d.truncation_radius()).max(0.0);
    for t in [-1.0, 0.0, 0.5 * earliest, earliest - 1e-9] {
        let s = retarded_potential(&d, &SpacetimePoint::new(x, t), &QuadratureSpec::default()).unwrap();
        assert_eq!(s.a0, 0.0);
        assert_eq!(s.a, Vec3::zeros());
    }
    let s = retarded_potential(&d, &SpacetimePoint::new(x, earliest + 0.5), &QuadratureSpec::default()).unwrap();
    assert!(s.a.norm() > 0.0);
}

#[test]
fn zero_source_vanishes_without_flags() {
    let ev = evaluate(
        &ZeroSource,
        &SpacetimePoint::new(Vec3::new(1.0, 2.0, 3.0), 4.0),
        &QuadratureSpec::default(),
        Outputs::POTENTIAL | Outputs::MAGNETIC,
    )
    .unwrap();
    assert_eq!(ev.integrals.a, Vec3::zeros());
    assert_eq!(ev.integrals.b, Vec3::zeros());
    assert_eq!(ev.flags, Flags::empty());
}

#[test]
fn early_evaluation_is_flagged_transient() {
    let (d, _) = dipole();
    let x = Vec3::new(3.0, 0.0, 0.0);
    let early = evaluate(&d, &SpacetimePoint::new(x, 3.5), &QuadratureSpec::default(), Outputs::POTENTIAL).unwrap();
    assert!(early.flags.contains(Flags::TRANSIENT));
    let late = evaluate(&d, &SpacetimePoint::new(x, steady_time(&d, &x)), &QuadratureSpec::default(), Outputs::POTENTIAL).unwrap();
    assert!(!late.flags.contains(Flags::TRANSIENT));
}

#[test]
fn retarded_time_is_light_travel() {
    let a = Vec3::new(1.0, 2.0, 2.0);
    assert_eq!(retarded_time(&a, &Vec3::zeros(), 10.0), 7.0);
}

#[test]
fn superposition_is_linear() {
    let a = HertzianDipoleSource::unit_wavelength();
    let b = HertzianDipoleSource::unit_wavelength()
        .with_axis(Vec3::x())
        .unwrap()
        .with_center(Vec3::new(0.0, 0.3, 0.0));
    let sum = Superposition::new(vec![Arc::new(a.clone()), Arc::new(b.clone())]);
    let x = Vec3::new(4.0, -3.0, 2.0);
    let p = SpacetimePoint::new(x, steady_time(&sum, &x) + 0.2);
    let q = QuadratureSpec::default().with_tolerance(1e-9);
    let ea = evaluate(&a, &p, &q, Outputs::MAGNETIC).unwrap().integrals.b;
    let eb = evaluate(&b, &p, &q, Outputs::MAGNETIC).unwrap().integrals.b;
    let es = evaluate(&sum, &p, &q, Outputs::MAGNETIC).unwrap().integrals.b;
    assert!((es - ea - eb).norm() < 1e-8 * es.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn steady_state_is_periodic(theta in 0.1f64..3.0, phi in -3.0f64..3.0, r in 2.0f64..20.0, dt in 0.0f64..1.0) {
        let d = HertzianDipoleSource::unit_wavelength();
        let x = fieldlab::units::unit_from_angles(theta, phi) * r;
        let t = steady_time(&d, &x) + dt;
        let q = QuadratureSpec::default();
        let b0 = evaluate(&d, &SpacetimePoint::new(x, t), &q, Outputs::MAGNETIC).unwrap().integrals.b;
        let b1 = evaluate(&d, &SpacetimePoint::new(x, t + 1.0), &q, Outputs::MAGNETIC).unwrap().integrals.b;
        prop_assert!((b0 - b1).norm() <= 1e-7 * b0.norm().max(1e-12));
    }

    #[test]
    fn potential_scales_with_moment(s in -5.0f64..5.0) {
        prop_assume!(s.abs() > 1e-3);
        let base = HertzianDipoleSource::unit_wavelength();
        let scaled = HertzianDipoleSource::new(s, 2.0 * PI, 0.05).unwrap();
        let x = Vec3::new(1.5, 0.5, -2.0);
        let p = SpacetimePoint::new(x, steady_time(&base, &x) + 0.3);
        let q = QuadratureSpec::default();
        let a = retarded_potential(&base, &p, &q).unwrap();
        let b = retarded_potential(&scaled, &p, &q).unwrap();
        prop_assert!((b.a - a.a * s).norm() <= 1e-12 * (a.a * s).norm());
        prop_assert!((b.a0 - a.a0 * s).abs() <= 1e-12 * (a.a0 * s).abs().max(1e-300));
    }

    #[test]
    fn rigid_translation_commutes(dx in -2.0f64..2.0, dy in -2.0f64..2.0, dz in -2.0f64..2.0) {
        let shift = Vec3::new(dx, dy, dz);
        let d = HertzianDipoleSource::unit_wavelength();
        let moved = HertzianDipoleSource::unit_wavelength().with_center(shift);
        let x = Vec3::new(3.0, 1.0, -1.0);
        let t = steady_time(&d, &x) + 0.4;
        let q = QuadratureSpec::default();
        let a = evaluate(&d, &SpacetimePoint::new(x, t), &q, Outputs::MAGNETIC).unwrap().integrals.b;
        let b = evaluate(&moved, &SpacetimePoint::new(x + shift, t), &q, Outputs::MAGNETIC).unwrap().integrals.b;
        prop_assert!((a - b).norm() <= 1e-7 * a.norm());
    }
}
