//! Metric of the offset surface `R = r + q3 n` (the thin-layer volume).

use nalgebra::Matrix2;

use super::chart::{ChartPoint, SurfaceChart};
use super::curvature::{curvature, f_factor, CurvatureData};
use super::forms::{fundamental_forms, FundamentalForms};
use crate::error::Result;

/// Offset-layer metric data at a chart point and offset `q3`.
#[derive(Debug, Clone, Copy)]
pub struct OffsetMetric {
    /// G_ab at offset q3.
    pub metric: Matrix2<f64>,
    /// G^{ab}, inverse of `metric`.
    pub inverse: Matrix2<f64>,
    /// First-order coefficient of G^{ab} in q3 (the inverse-metric expansion
    /// `G^{ab} = g^{ab} + q3 * first_order_inverse + ...`).
    pub first_order_inverse: Matrix2<f64>,
    /// Volume factor f = 1 + 2 M q3 + K q3^2.
    pub layer_factor: f64,
}

/// Exact offset metric via the Weingarten identity
/// `d_a R = (I + q3 alpha)_a^b d_b r`, so `G = (I + q3 a) g (I + q3 a)^T`.
///
/// The first-order inverse coefficient is
/// `-(alpha^T g^{-1} + g^{-1} alpha) = 2 g^{-1} h g^{-1}`, the q3-derivative
/// of `G^{ab}` at q3 = 0.
pub fn offset_metric(chart: &SurfaceChart, p: ChartPoint, q3: f64) -> Result<OffsetMetric> {
    let forms = fundamental_forms(chart, p)?;
    let curv = curvature(&forms);
    offset_metric_from(&forms, &curv, q3)
}

/// Same as [`offset_metric`] when forms and curvature are already at hand.
pub fn offset_metric_from(
    forms: &FundamentalForms,
    curv: &CurvatureData,
    q3: f64,
) -> Result<OffsetMetric> {
    let layer_factor = f_factor(curv, q3)?;

    let shift = Matrix2::identity() + q3 * curv.weingarten;
    let metric = shift * forms.metric * shift.transpose();
    let inverse = metric.try_inverse().expect("positive layer factor implies invertible G");

    let ginv = forms.inverse_metric();
    let first_order_inverse = -(curv.weingarten.transpose() * ginv + ginv * curv.weingarten);

    Ok(OffsetMetric { metric, inverse, first_order_inverse, layer_factor })
}
