//! Weingarten map, mean/Gaussian curvature and the thin-layer volume factor.

use nalgebra::Matrix2;

use super::forms::FundamentalForms;
use crate::error::{Error, Result};

/// Shape-operator data at a chart point.
///
/// `weingarten` satisfies `d_a n = alpha_a^b d_b r`; with the built-in
/// orientations a sphere of radius R gets mean curvature `+1/R`, so offsets
/// along the normal grow the surface.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureData {
    /// Weingarten curvature matrix alpha.
    pub weingarten: Matrix2<f64>,
    /// Mean curvature, Tr(alpha)/2.
    pub mean: f64,
    /// Gaussian curvature, det(alpha).
    pub gaussian: f64,
}

impl CurvatureData {
    /// Thin-layer volume factor `f(q3) = 1 + 2 M q3 + K q3^2`, equal to
    /// `det(I + q3 alpha)`.
    pub fn layer_factor(&self, q3: f64) -> f64 {
        1.0 + 2.0 * self.mean * q3 + self.gaussian * q3 * q3
    }
}

/// Weingarten matrix and curvatures from the fundamental forms.
///
/// The element formulas are the classical ones,
/// `alpha_11 = (g_12 h_21 - g_22 h_11)/det g` and so on; in matrix form
/// `alpha = -(h g^{-1})` for symmetric forms.
pub fn curvature(forms: &FundamentalForms) -> CurvatureData {
    let g = &forms.metric;
    let h = &forms.curvature_form;
    let det = forms.det_metric();

    let a11 = (g[(0, 1)] * h[(1, 0)] - g[(1, 1)] * h[(0, 0)]) / det;
    let a12 = (g[(1, 0)] * h[(0, 0)] - g[(0, 0)] * h[(1, 0)]) / det;
    let a21 = (g[(0, 1)] * h[(1, 1)] - g[(1, 1)] * h[(0, 1)]) / det;
    let a22 = (g[(1, 0)] * h[(0, 1)] - g[(0, 0)] * h[(1, 1)]) / det;
    let weingarten = Matrix2::new(a11, a12, a21, a22);

    CurvatureData {
        weingarten,
        mean: 0.5 * (a11 + a22),
        gaussian: a11 * a22 - a12 * a21,
    }
}

/// Volume factor `f = 1 + 2 M q3 + K q3^2`, rejecting offsets past the focal
/// set where the factor stops being positive.
pub fn f_factor(curv: &CurvatureData, q3: f64) -> Result<f64> {
    let f = curv.layer_factor(q3);
    if f > 0.0 {
        Ok(f)
    } else {
        Err(Error::NonPositiveF { f, q3 })
    }
}
