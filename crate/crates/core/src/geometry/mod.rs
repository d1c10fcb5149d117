//! Surface differential geometry for thin-layer quantization.
//!
//! Everything a layer Hamiltonian needs from the embedding: fundamental
//! forms, the Weingarten map with mean/Gaussian curvature, the unit normal,
//! and the offset-volume metric `G_ab` with its first-order inverse
//! expansion. Built-in analytic charts cover the plane, cylinder, sphere and
//! torus; any other embedding runs through fourth-order numeric
//! differentiation, which doubles as the oracle for the analytic paths.

pub mod chart;
pub mod curvature;
pub mod forms;
pub mod numdiff;
pub mod offset;

pub use chart::{
    builtin_chart, BuiltinSurface, ChartPoint, CoordRange, DerivativeSource, Embedding,
    FnEmbedding, Periodicity, SurfaceChart,
};
pub use curvature::{curvature, f_factor, CurvatureData};
pub use forms::{fundamental_forms, metric_derivatives, unit_normal, FundamentalForms};
pub use offset::{offset_metric, offset_metric_from, OffsetMetric};

use nalgebra::Vector2;

use crate::error::Result;

/// Gradient of the mean curvature over the chart, `(d M/d q1, d M/d q2)`.
///
/// Uses the chart's analytic expression when the built-in provides one,
/// otherwise fourth-order differencing of M.
pub fn mean_curvature_gradient(chart: &SurfaceChart, p: ChartPoint) -> Result<Vector2<f64>> {
    let p = chart.check_domain(p)?;
    if let Some(grad) = chart.analytic_mean_curvature_gradient(p) {
        return Ok(grad);
    }
    let h1 = chart::DEFAULT_RELATIVE_STEP * chart.domain()[0].span();
    let h2 = chart::DEFAULT_RELATIVE_STEP * chart.domain()[1].span();
    let mean_at = |q: ChartPoint| -> Result<f64> {
        Ok(curvature(&fundamental_forms(chart, q)?).mean)
    };
    // Propagate evaluation errors from the worst stencil point eagerly.
    mean_at(ChartPoint::new(p.q1 - 2.0 * h1, p.q2))?;
    mean_at(ChartPoint::new(p.q1 + 2.0 * h1, p.q2))?;
    let d1 = numdiff::derivative1(
        |q1| mean_at(ChartPoint::new(q1, p.q2)).unwrap_or(f64::NAN),
        p.q1,
        h1,
    );
    let d2 = numdiff::derivative1(
        |q2| mean_at(ChartPoint::new(p.q1, q2)).unwrap_or(f64::NAN),
        p.q2,
        h2,
    );
    Ok(Vector2::new(d1, d2))
}
