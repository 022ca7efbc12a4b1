mod common;

use fieldlab::greens::steady_time;
use fieldlab::quadrature::QuadratureSpec;
use fieldlab::source::{HertzianDipoleSource, RotatingPolarizationSource, SourceModel, StaticChargeBlob, SwitchOn, ZeroSource};
use fieldlab::validation::{dalembertian_residual_a, dalembertian_residual_b, initial_condition_check, ResidualGrid, StencilOrder};
use fieldlab::{SpacetimePoint, Vec3};

fn at_steady(src: &dyn SourceModel, x: Vec3, dt: f64) -> SpacetimePoint {
    SpacetimePoint::new(x, steady_time(src, &x) + dt)
}

#[test]
fn coulomb_exterior_satisfies_laplace() {
    let blob = StaticChargeBlob::new(1.0, 0.2).unwrap();
    let p = SpacetimePoint::new(Vec3::new(2.0, 1.0, -0.5), 3.0);
    let grid = ResidualGrid::for_source(&blob, &p.x);
    let r = dalembertian_residual_a(&blob, &p, &grid, &QuadratureSpec::default()).unwrap();
    assert!(!r.inside_support);
    assert!(r.normalized < 1e-3, "{r:?}");
}

#[test]
fn dipole_interior_residuals() {
    let d = HertzianDipoleSource::unit_wavelength();
    let p = at_steady(&d, Vec3::new(0.03, -0.02, 0.05), 0.21);
    let grid = ResidualGrid::for_source(&d, &p.x);
    let q = QuadratureSpec::default();
    let a = dalembertian_residual_a(&d, &p, &grid, &q).unwrap();
    let b = dalembertian_residual_b(&d, &p, &grid, &q).unwrap();
    assert!(a.inside_support && b.inside_support);
    assert!(a.normalized < 1e-2, "{a:?}");
    assert!(b.normalized < 1e-2, "{b:?}");
}

#[test]
fn zero_source_residual_vanishes() {
    let p = SpacetimePoint::new(Vec3::new(1.0, 0.0, 0.0), 2.0);
    let grid = ResidualGrid::new(0.1, 0.05, StencilOrder::Fourth).unwrap();
    let q = QuadratureSpec::default();
    assert_eq!(dalembertian_residual_a(&ZeroSource, &p, &grid, &q).unwrap().absolute, 0.0);
    assert_eq!(dalembertian_residual_b(&ZeroSource, &p, &grid, &q).unwrap().absolute, 0.0);
}

#[test]
fn superluminal_exterior_field_solves_its_wave_equation() {
    let s = RotatingPolarizationSource::desk_scale();
    let p = at_steady(&s, Vec3::new(3.0, -1.0, 1.5), 0.3);
    let grid = ResidualGrid::for_source(&s, &p.x);
    let r = dalembertian_residual_b(&s, &p, &grid, &QuadratureSpec::default()).unwrap();
    assert!(!r.inside_support);
    assert!(r.normalized < 1e-2, "{r:?}");
}

#[test]
fn second_order_stencil_converges_at_second_order() {
    let d = HertzianDipoleSource::unit_wavelength();
    let p = at_steady(&d, Vec3::new(1.3, 0.4, -0.8), 0.1);
    let q = QuadratureSpec::default().with_tolerance(1e-10);
    let mut prev = None;
    for h in [0.2, 0.1, 0.05] {
        let grid = ResidualGrid::new(h, 0.5 * h, StencilOrder::Second).unwrap();
        let r = dalembertian_residual_a(&d, &p, &grid, &q).unwrap().absolute;
        if let Some(coarse) = prev {
            assert!(coarse / r >= 3.5, "halving {h}: {coarse} -> {r}");
        }
        prev = Some(r);
    }
}

#[test]
fn stencil_spacing_rule_enforced() {
    assert!(ResidualGrid::new(0.1, 0.06, StencilOrder::Second).is_err());
    assert!(ResidualGrid::new(0.1, 0.05, StencilOrder::Second).is_ok());
    assert!(ResidualGrid::new(0.0, 0.0, StencilOrder::Second).is_err());
}

#[test]
fn null_initial_data_and_onset_timing() {
    let d = HertzianDipoleSource::unit_wavelength().with_switch_on(SwitchOn::new(2.0, 1.0).unwrap());
    let points = [Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.0, -5.0, 2.0), Vec3::new(1.0, 1.0, 1.0)];
    let report = initial_condition_check(&d, &points, &QuadratureSpec::default()).unwrap();
    assert!(report.applicable);
    assert!(report.checked > 0);
    assert!(report.max_relative < 1e-10);
    assert_eq!(report.onsets.len(), 3);
    assert!(report.passed(1e-10), "{report:?}");
}

#[test]
fn initial_check_not_applicable_to_eternal_sources() {
    let blob = StaticChargeBlob::new(1.0, 0.2).unwrap();
    let r = initial_condition_check(&blob, &[Vec3::new(2.0, 0.0, 0.0)], &QuadratureSpec::default()).unwrap();
    assert!(!r.applicable);
    assert!(r.passed(1e-10));
}
