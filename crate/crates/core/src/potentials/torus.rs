//! Closed-form torus expressions for the thickness-corrected potential and
//! kinetic correction, used to cross-validate the general pipeline.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::{OperatorCoefficients, PhysicalScale};
use crate::error::{Error, Result};

fn check_torus(minor: f64, major: f64) -> Result<()> {
    if minor.is_finite() && major.is_finite() && minor > 0.0 && minor < major {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!(
            "torus requires 0 < minor radius < major radius, got a = {minor}, R0 = {major}"
        )))
    }
}

/// Thickness-corrected geometric potential on the torus,
///
/// `V_g' = -kappa R0^2/(4 a^2 W^2) + kappa R0^2 (W + a cos t)/(2 a^3 W^3) q3`
///
/// with `W = R0 + a cos(theta)` and `kappa = hbar^2/2m`. Identical to
/// `V_g (1 - 4 M q3)` with the torus curvatures inserted.
pub fn torus_modified_potential(
    minor_radius: f64,
    major_radius: f64,
    theta: f64,
    q3: f64,
    scale: &PhysicalScale,
) -> Result<f64> {
    check_torus(minor_radius, major_radius)?;
    let (a, r0) = (minor_radius, major_radius);
    let kappa = scale.kinetic_coeff;
    let w = r0 + a * theta.cos();
    let base = -kappa * r0 * r0 / (4.0 * a * a * w * w);
    let correction = kappa * r0 * r0 * (w + a * theta.cos()) / (2.0 * a * a * a * w * w * w) * q3;
    Ok(base + correction)
}

/// The torus thickness correction to the kinetic term, term by term as
/// derived for the toroidal layer:
///
/// ```text
/// H' = kappa q3 [ (5W + a cos t)/(2 a^3 W) d_t^2
///               + (W + 5a cos t)/(2 a W^3) d_p^2
///               + (R0 sin t/(2 a^2 W^2) - 3 sin t/(a^2 W)) d_t
///               + i gamma (5W + a cos t)/(a W) B1 sin p d_t
///               + i gamma (W + 5a cos t)/(a W^2) (B0 W - B1 a sin t cos p) d_p
///               - R0 (a + R0 cos t)/(2 a^2 W^3)
///               - i gamma (R0 sin t/W^2) B1 sin p
///               - gamma^2 (5W + a cos t)/(2W) B1^2 a sin^2 p
///               - gamma^2 (W + 5a cos t)/(2 a W) (B0 W - B1 a sin t cos p)^2 ]
/// ```
///
/// with `gamma = e/hbar`. Note the zeroth- and first-order blocks are *not*
/// symmetrized; this is the raw operator.
#[allow(clippy::too_many_arguments)]
pub fn torus_hprime_coefficients(
    minor_radius: f64,
    major_radius: f64,
    theta: f64,
    phi: f64,
    b0: f64,
    b1: f64,
    q3: f64,
    scale: &PhysicalScale,
) -> Result<OperatorCoefficients> {
    check_torus(minor_radius, major_radius)?;
    let (a, r0) = (minor_radius, major_radius);
    let kq3 = scale.kinetic_coeff * q3;
    let gamma = scale.charge_coeff;

    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let w = r0 + a * ct;

    let c2 = Matrix2::new(
        kq3 * (5.0 * w + a * ct) / (2.0 * a * a * a * w),
        0.0,
        0.0,
        kq3 * (w + 5.0 * a * ct) / (2.0 * a * w * w * w),
    );

    let flux_phi = b0 * w - b1 * a * st * cp;
    let c1_theta = Complex64::new(
        kq3 * (r0 * st / (2.0 * a * a * w * w) - 3.0 * st / (a * a * w)),
        kq3 * gamma * (5.0 * w + a * ct) / (a * w) * b1 * sp,
    );
    let c1_phi = Complex64::new(0.0, kq3 * gamma * (w + 5.0 * a * ct) / (a * w * w) * flux_phi);

    let c0 = Complex64::new(
        kq3 * (-r0 * (a + r0 * ct) / (2.0 * a * a * w * w * w)
            - gamma * gamma * (5.0 * w + a * ct) / (2.0 * w) * b1 * b1 * a * sp * sp
            - gamma * gamma * (w + 5.0 * a * ct) / (2.0 * a * w) * flux_phi * flux_phi),
        kq3 * (-gamma * r0 * st / (w * w) * b1 * sp),
    );

    Ok(OperatorCoefficients {
        second_order: c2,
        first_order: Vector2::new(c1_theta, c1_phi),
        zeroth_order: c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALE: PhysicalScale = PhysicalScale { kinetic_coeff: 1.0, charge_coeff: 1.0 };

    #[test]
    fn rejects_bad_shapes() {
        assert!(torus_modified_potential(10.0, 5.0, 0.0, 0.0, &SCALE).is_err());
        assert!(torus_hprime_coefficients(0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.1, &SCALE).is_err());
    }

    #[test]
    fn modified_potential_fig3_values() {
        let v0 = 1.0 / 400.0;
        let pi = std::f64::consts::PI;
        // a = 10, R0 = 15 at the inner equator.
        let v = torus_modified_potential(10.0, 15.0, pi, 0.5, &SCALE).unwrap();
        assert!((v / v0 + 9.9).abs() < 1e-12);
        let v = torus_modified_potential(10.0, 15.0, pi, -0.5, &SCALE).unwrap();
        assert!((v / v0 + 8.1).abs() < 1e-12);
        // R0 = 2a: correction vanishes at theta = pi.
        let v = torus_modified_potential(10.0, 20.0, pi, 0.0, &SCALE).unwrap();
        assert!((v / v0 + 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_offset_gives_zero_operator() {
        let c = torus_hprime_coefficients(10.0, 15.0, 1.0, 2.0, 1.5, -0.7, 0.0, &SCALE).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn field_free_constant_term() {
        // theta = pi/2, a = 10, R0 = 15: c0 = kq3 * (-R0 a / (2 a^2 W^3)), W = 15.
        let q3 = 0.5;
        let c = torus_hprime_coefficients(
            10.0,
            15.0,
            std::f64::consts::FRAC_PI_2,
            0.3,
            0.0,
            0.0,
            q3,
            &SCALE,
        )
        .unwrap();
        let expect = q3 * (-15.0 * 10.0 / (2.0 * 100.0 * 3375.0));
        assert!((c.zeroth_order.re - expect).abs() < 1e-15);
        assert_eq!(c.zeroth_order.im, 0.0);
    }

    #[test]
    fn field_free_first_order_term() {
        // d_theta coefficient at theta = pi/2 with B1 = 0:
        // kq3 (R0/(2 a^2 W^2) - 3/(a^2 W)) sin(theta), sin = 1.
        let q3 = 0.25;
        let c = torus_hprime_coefficients(
            10.0,
            15.0,
            std::f64::consts::FRAC_PI_2,
            1.0,
            2.0,
            0.0,
            q3,
            &SCALE,
        )
        .unwrap();
        let w = 15.0;
        let expect = q3 * (15.0 / (2.0 * 100.0 * w * w) - 3.0 / (100.0 * w));
        assert!((c.first_order.x.re - expect).abs() < 1e-16);
        assert_eq!(c.first_order.x.im, 0.0); // B1 = 0
    }
}
