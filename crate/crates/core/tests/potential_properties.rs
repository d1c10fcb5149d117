//! General-formula vs closed-form identities for the potentials and the
//! thickness correction.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use thinlayer::em::FieldConfig;
use thinlayer::geometry::{
    builtin_chart, curvature, fundamental_forms, BuiltinSurface, ChartPoint,
};
use thinlayer::potentials::{
    geometric_potential, hprime_coefficients_at, hprime_consistency, modified_geometric_potential,
    torus_hprime_coefficients, torus_modified_potential, PhysicalScale, ThicknessParams,
};

const SCALE: PhysicalScale = PhysicalScale { kinetic_coeff: 1.0, charge_coeff: 1.0 };

#[test]
fn modified_potential_matches_torus_closed_form_at_1000_points() {
    // V_g (1 - 4 M q3) and the printed torus expression are the same
    // polynomial; they must agree to 1e-12 relative.
    let (a, r0) = (10.0, 15.0);
    let chart =
        builtin_chart(BuiltinSurface::Torus { minor_radius: a, major_radius: r0 }).unwrap();
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..1000 {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q3 = rng.gen_range(-0.5..0.5);
        let curv = curvature(&fundamental_forms(&chart, ChartPoint::new(theta, 0.0)).unwrap());
        let general =
            modified_geometric_potential(&curv, &SCALE, ThicknessParams::new(q3)).unwrap();
        let closed = torus_modified_potential(a, r0, theta, q3, &SCALE).unwrap();
        let tol = 1e-12 * closed.abs().max(1e-300);
        assert!(
            (general - closed).abs() <= tol,
            "theta = {theta}, q3 = {q3}: {general:e} vs {closed:e}"
        );
    }
}

#[test]
fn geometric_potential_is_never_positive() {
    let charts = [
        builtin_chart(BuiltinSurface::Torus { minor_radius: 1.0, major_radius: 2.5 }).unwrap(),
        builtin_chart(BuiltinSurface::Sphere { radius: 3.0 }).unwrap(),
        builtin_chart(BuiltinSurface::Cylinder { radius: 0.5, length: 2.0 }).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(31);
    for chart in &charts {
        for _ in 0..200 {
            let d = chart.domain();
            let p = ChartPoint::new(
                d[0].lo + (0.05 + 0.9 * rng.gen::<f64>()) * d[0].span(),
                d[1].lo + (0.05 + 0.9 * rng.gen::<f64>()) * d[1].span(),
            );
            let curv = curvature(&fundamental_forms(chart, p).unwrap());
            // M^2 >= K holds exactly; numerically the difference can sit a
            // few ulps above zero on umbilical surfaces.
            let roundoff = 1e-13 * (curv.mean * curv.mean).max(curv.gaussian.abs());
            assert!(geometric_potential(&curv, &SCALE) <= roundoff);
        }
    }
}

#[test]
fn thickness_correction_is_odd_in_the_offset() {
    let chart =
        builtin_chart(BuiltinSurface::Torus { minor_radius: 10.0, major_radius: 15.0 }).unwrap();
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..100 {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q3 = rng.gen_range(0.0..0.5);
        let curv = curvature(&fundamental_forms(&chart, ChartPoint::new(theta, 0.0)).unwrap());
        let base = geometric_potential(&curv, &SCALE);
        let plus =
            modified_geometric_potential(&curv, &SCALE, ThicknessParams::new(q3)).unwrap();
        let minus =
            modified_geometric_potential(&curv, &SCALE, ThicknessParams::new(-q3)).unwrap();
        assert!(((plus - base) + (minus - base)).abs() <= 1e-15 * base.abs());
    }
}

#[test]
fn hprime_second_order_block_matches_closed_form_everywhere() {
    let (a, r0) = (10.0, 15.0);
    let chart =
        builtin_chart(BuiltinSurface::Torus { minor_radius: a, major_radius: r0 }).unwrap();
    let field = FieldConfig::zero();
    let q3 = 0.5;
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..100 {
        let p = ChartPoint::new(
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let general =
            hprime_coefficients_at(&chart, p, &field, ThicknessParams::new(q3), &SCALE).unwrap();
        let closed =
            torus_hprime_coefficients(a, r0, p.q1, p.q2, 0.0, 0.0, q3, &SCALE).unwrap();
        let block_scale = closed.second_order.abs().max();
        for i in 0..2 {
            for j in 0..2 {
                let g = general.second_order[(i, j)];
                let c = closed.second_order[(i, j)];
                assert!(
                    (g - c).abs() <= 1e-10 * c.abs().max(block_scale),
                    "({i},{j}) at {p}: {g:e} vs {c:e}"
                );
            }
        }
    }
}

#[test]
fn consistency_report_shape_and_field_blocks() {
    // With the field on, the imaginary parts of the first-order and
    // zeroth-order blocks must also match the closed form (the mismatch is
    // confined to the real d_theta part).
    let points: Vec<ChartPoint> = {
        let mut rng = StdRng::seed_from_u64(4);
        (0..64)
            .map(|_| {
                ChartPoint::new(
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                )
            })
            .collect()
    };
    let report = hprime_consistency(10.0, 15.0, &points, 0.8, -0.6, 0.5, &SCALE).unwrap();
    assert_eq!(report.sample_count, 64);

    for block in report.second_order_blocks() {
        assert!(block.relative_discrepancy() <= 1e-10, "{}", block.block);
    }
    // Field-coupled imaginary parts agree: the recorded discrepancy of the
    // phi first-order block (purely imaginary) is numeric noise only.
    let phi_block = report.block("first_order_2").unwrap();
    assert!(phi_block.relative_discrepancy() < 1e-8, "{}", phi_block.max_abs_discrepancy);
    // The theta block carries the genuine closed-form difference
    // q3 R0 |sin t| / (2 a^2 W^2) at its maximizer.
    let theta_block = report.block("first_order_1").unwrap();
    assert!(theta_block.max_abs_discrepancy > 1e-7);
}

proptest! {
    #[test]
    fn all_potentials_scale_linearly_in_kinetic_coeff(
        theta in -std::f64::consts::PI..std::f64::consts::PI,
        q3 in -0.4f64..0.4,
        exponent in -3i32..4,
    ) {
        // Power-of-two factors make the scaling exact in floating point, so
        // the identity can be asserted bitwise.
        let factor = 2f64.powi(exponent);
        let chart = builtin_chart(BuiltinSurface::Torus {
            minor_radius: 10.0,
            major_radius: 15.0,
        }).unwrap();
        let curv = curvature(&fundamental_forms(&chart, ChartPoint::new(theta, 0.0)).unwrap());
        let s1 = PhysicalScale::default();
        let s2 = PhysicalScale::new(factor, 1.0).unwrap();
        let t = ThicknessParams::new(q3);

        prop_assert_eq!(
            factor * geometric_potential(&curv, &s1),
            geometric_potential(&curv, &s2)
        );
        prop_assert_eq!(
            factor * modified_geometric_potential(&curv, &s1, t).unwrap(),
            modified_geometric_potential(&curv, &s2, t).unwrap()
        );

        let p = ChartPoint::new(theta, 1.0);
        let c1 = hprime_coefficients_at(&chart, p, &FieldConfig::zero(), t, &s1).unwrap();
        let c2 = hprime_coefficients_at(&chart, p, &FieldConfig::zero(), t, &s2).unwrap();
        prop_assert_eq!(c1.second_order * factor, c2.second_order);
        prop_assert_eq!(c1.first_order * num_complex::Complex64::from(factor), c2.first_order);
        prop_assert_eq!(c1.zeroth_order * factor, c2.zeroth_order);
    }
}
