//! First and second fundamental forms and the unit normal.

use nalgebra::{Matrix2, Vector3};

use super::chart::{ChartPoint, SurfaceChart};
use crate::error::{Error, Result};

/// Relative threshold below which the tangent cross product counts as
/// degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// First (`metric`) and second (`curvature`) fundamental forms at a chart
/// point, plus the area element `sqrt(det g)`.
#[derive(Debug, Clone, Copy)]
pub struct FundamentalForms {
    /// Metric g_ab = d_a r . d_b r.
    pub metric: Matrix2<f64>,
    /// Second fundamental form h_ab = n . d_a d_b r (orientation applied).
    pub curvature_form: Matrix2<f64>,
    /// Area element sqrt(det g).
    pub sqrt_det_metric: f64,
}

impl FundamentalForms {
    pub fn det_metric(&self) -> f64 {
        self.sqrt_det_metric * self.sqrt_det_metric
    }

    /// Inverse metric g^{ab}.
    pub fn inverse_metric(&self) -> Matrix2<f64> {
        let g = &self.metric;
        let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det
    }
}

struct TangentFrame {
    d1: Vector3<f64>,
    d2: Vector3<f64>,
    cross: Vector3<f64>,
    cross_norm: f64,
}

fn tangent_frame(chart: &SurfaceChart, p: ChartPoint) -> Result<TangentFrame> {
    let [d1, d2] = chart.tangents(p);
    let cross = d1.cross(&d2);
    let cross_norm = cross.norm();
    let scale = d1.norm() * d2.norm();
    if cross_norm <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateChart { q1: p.q1, q2: p.q2, cross_norm });
    }
    Ok(TangentFrame { d1, d2, cross, cross_norm })
}

/// Unit normal `orientation * (d1 r x d2 r) / |d1 r x d2 r|`.
pub fn unit_normal(chart: &SurfaceChart, p: ChartPoint) -> Result<Vector3<f64>> {
    let p = chart.check_domain(p)?;
    let frame = tangent_frame(chart, p)?;
    Ok(chart.orientation() * frame.cross / frame.cross_norm)
}

/// Evaluates both fundamental forms at `p`.
pub fn fundamental_forms(chart: &SurfaceChart, p: ChartPoint) -> Result<FundamentalForms> {
    let p = chart.check_domain(p)?;
    let frame = tangent_frame(chart, p)?;
    let TangentFrame { d1, d2, cross, cross_norm } = frame;

    let metric = Matrix2::new(d1.dot(&d1), d1.dot(&d2), d2.dot(&d1), d2.dot(&d2));
    let normal = chart.orientation() * cross / cross_norm;

    let [d11, d12, d22] = chart.second_derivatives(p);
    let h11 = normal.dot(&d11);
    let h12 = normal.dot(&d12);
    let h22 = normal.dot(&d22);
    // The mixed derivative is a single evaluator, so h is symmetric exactly.
    let curvature_form = Matrix2::new(h11, h12, h12, h22);

    let det = metric[(0, 0)] * metric[(1, 1)] - metric[(0, 1)] * metric[(1, 0)];
    Ok(FundamentalForms { metric, curvature_form, sqrt_det_metric: det.sqrt() })
}

/// Partial derivatives of the metric, `[d g_ab / d q1, d g_ab / d q2]`.
///
/// Analytic charts assemble them from first and second embedding
/// derivatives (`d_c g_ab = d_c d_a r . d_b r + d_a r . d_c d_b r`);
/// numeric charts difference the metric directly.
pub fn metric_derivatives(chart: &SurfaceChart, p: ChartPoint) -> Result<[Matrix2<f64>; 2]> {
    use super::chart::{DerivativeSource, DEFAULT_RELATIVE_STEP};
    use super::numdiff;

    let p = chart.check_domain(p)?;
    match chart.source() {
        DerivativeSource::Analytic => {
            let [d1, d2] = chart.tangents(p);
            let [d11, d12, d22] = chart.second_derivatives(p);
            let tangents = [d1, d2];
            // seconds[a][b] = d_a d_b r
            let seconds = [[d11, d12], [d12, d22]];
            let mut out = [Matrix2::zeros(); 2];
            for c in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        out[c][(a, b)] = seconds[c][a].dot(&tangents[b])
                            + tangents[a].dot(&seconds[c][b]);
                    }
                }
            }
            Ok(out)
        }
        DerivativeSource::Numeric { .. } => {
            let h1 = DEFAULT_RELATIVE_STEP * chart.domain()[0].span();
            let h2 = DEFAULT_RELATIVE_STEP * chart.domain()[1].span();
            let metric_at = |q: ChartPoint| -> Matrix2<f64> {
                let [d1, d2] = chart.tangents(q);
                Matrix2::new(d1.dot(&d1), d1.dot(&d2), d2.dot(&d1), d2.dot(&d2))
            };
            let dg1 = numdiff::derivative1(|q1| metric_at(ChartPoint::new(q1, p.q2)), p.q1, h1);
            let dg2 = numdiff::derivative1(|q2| metric_at(ChartPoint::new(p.q1, q2)), p.q2, h2);
            Ok([dg1, dg2])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{builtin_chart, BuiltinSurface};

    fn torus() -> SurfaceChart {
        builtin_chart(BuiltinSurface::Torus { minor_radius: 10.0, major_radius: 15.0 }).unwrap()
    }

    #[test]
    fn plane_forms_are_flat() {
        let plane = builtin_chart(BuiltinSurface::Plane { l1: 4.0, l2: 4.0 }).unwrap();
        let f = fundamental_forms(&plane, ChartPoint::new(1.0, 2.0)).unwrap();
        assert_eq!(f.metric, Matrix2::identity());
        assert_eq!(f.curvature_form, Matrix2::zeros());
        assert_eq!(f.sqrt_det_metric, 1.0);
    }

    #[test]
    fn plane_normal_is_z() {
        let plane = builtin_chart(BuiltinSurface::Plane { l1: 4.0, l2: 4.0 }).unwrap();
        let n = unit_normal(&plane, ChartPoint::new(0.3, 0.7)).unwrap();
        assert_eq!(n, Vector3::z());
    }

    #[test]
    fn torus_metric_matches_closed_form() {
        let chart = torus();
        for &theta in &[0.0, 0.7, 2.0, -1.3] {
            let f = fundamental_forms(&chart, ChartPoint::new(theta, 0.4)).unwrap();
            let w = 15.0 + 10.0 * theta.cos();
            assert!((f.metric[(0, 0)] - 100.0).abs() < 1e-10);
            assert!((f.metric[(1, 1)] - w * w).abs() < 1e-9 * w * w);
            assert!(f.metric[(0, 1)].abs() < 1e-10);
            assert!((f.sqrt_det_metric - 10.0 * w).abs() < 1e-9 * 10.0 * w);
        }
    }

    #[test]
    fn torus_normal_is_outward() {
        // Fixed so offsets along n reproduce diag((a+q3)^2, (W+q3 cos t)^2).
        let chart = torus();
        let p = ChartPoint::new(0.8, -2.1);
        let n = unit_normal(&chart, p).unwrap();
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        let expect = Vector3::new(ct * cp, ct * sp, st);
        assert!((n - expect).norm() < 1e-12);
        assert!((n.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_normal_near_pole_is_z() {
        let sphere = builtin_chart(BuiltinSurface::Sphere { radius: 2.0 }).unwrap();
        let n = unit_normal(&sphere, ChartPoint::new(1e-3, 0.3)).unwrap();
        assert!((n - Vector3::z()).norm() < 2e-3);
    }

    #[test]
    fn sphere_metric_at_pi_third() {
        let sphere = builtin_chart(BuiltinSurface::Sphere { radius: 2.0 }).unwrap();
        let f = fundamental_forms(&sphere, ChartPoint::new(std::f64::consts::PI / 3.0, 1.0)).unwrap();
        assert!((f.metric[(0, 0)] - 4.0).abs() < 1e-12);
        assert!((f.metric[(1, 1)] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_pole_is_degenerate() {
        let sphere = builtin_chart(BuiltinSurface::Sphere { radius: 2.0 }).unwrap();
        assert!(matches!(
            fundamental_forms(&sphere, ChartPoint::new(0.0, 0.0)),
            Err(Error::DegenerateChart { .. })
        ));
    }

    #[test]
    fn normal_is_orthogonal_to_tangents() {
        let chart = torus();
        let p = ChartPoint::new(1.2, 0.5);
        let n = unit_normal(&chart, p).unwrap();
        let [d1, d2] = chart.tangents(p);
        assert!(n.dot(&d1).abs() < 1e-10);
        assert!(n.dot(&d2).abs() < 1e-10);
    }

    #[test]
    fn metric_derivatives_match_numeric() {
        let chart = torus();
        let numeric = chart.with_numeric_derivatives();
        let p = ChartPoint::new(0.6, -0.9);
        let analytic = metric_derivatives(&chart, p).unwrap();
        let differenced = metric_derivatives(&numeric, p).unwrap();
        for c in 0..2 {
            assert!((analytic[c] - differenced[c]).norm() < 1e-6);
        }
    }
}
