//! Covariant vector potentials on surface charts and the surface
//! Coulomb-gauge check.
//!
//! Only fields with vanishing normal component are representable: the
//! separation of the layer dynamics into surface and normal parts requires
//! `A3 = 0`, so the type simply has no normal slot. With that restriction
//! the 3D Coulomb gauge reduces on the surface to
//! `div A = (1/sqrt(g)) d_a (sqrt(g) g^{ab} A_b) = 0`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;

use crate::error::Result;
use crate::geometry::chart::DEFAULT_RELATIVE_STEP;
use crate::geometry::{fundamental_forms, metric_derivatives, numdiff, ChartPoint, SurfaceChart};
use crate::solver::GridSpec;

type ScalarField = Arc<dyn Fn(ChartPoint) -> f64 + Send + Sync>;
type GradientField = Arc<dyn Fn(ChartPoint) -> Vector2<f64> + Send + Sync>;

/// Covariant field values at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    /// Covariant components (A_1, A_2).
    pub covariant: Vector2<f64>,
    /// Scalar potential A_0.
    pub scalar: f64,
}

/// A vector potential on a chart: covariant components `A_1`, `A_2` (the
/// normal component is identically zero by construction), an optional scalar
/// potential `A_0` (default 0), and the uniform-field parameters the torus
/// gauge was built from.
#[derive(Clone)]
pub struct FieldConfig {
    a1: ScalarField,
    a2: ScalarField,
    a0: ScalarField,
    // Analytic partials (d1 A_b, d2 A_b), used instead of numeric stencils
    // when present.
    grad_a1: Option<GradientField>,
    grad_a2: Option<GradientField>,
    /// Uniform field component normal to the major circle (torus gauge).
    pub b0: f64,
    /// Uniform field component in the major-circle plane (torus gauge).
    pub b1: f64,
}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldConfig")
            .field("b0", &self.b0)
            .field("b1", &self.b1)
            .field("analytic_partials", &self.grad_a1.is_some())
            .finish()
    }
}

impl FieldConfig {
    /// The zero field.
    pub fn zero() -> Self {
        Self::from_fns(|_| 0.0, |_| 0.0)
            .with_analytic_partials(|_| Vector2::zeros(), |_| Vector2::zeros())
    }

    /// Field from covariant component closures, differentiated numerically
    /// unless analytic partials are attached.
    pub fn from_fns(
        a1: impl Fn(ChartPoint) -> f64 + Send + Sync + 'static,
        a2: impl Fn(ChartPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            a1: Arc::new(a1),
            a2: Arc::new(a2),
            a0: Arc::new(|_| 0.0),
            grad_a1: None,
            grad_a2: None,
            b0: 0.0,
            b1: 0.0,
        }
    }

    pub fn with_scalar_potential(
        mut self,
        a0: impl Fn(ChartPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.a0 = Arc::new(a0);
        self
    }

    /// Attaches closed-form partial derivatives `(d1 A_b, d2 A_b)`.
    pub fn with_analytic_partials(
        mut self,
        grad_a1: impl Fn(ChartPoint) -> Vector2<f64> + Send + Sync + 'static,
        grad_a2: impl Fn(ChartPoint) -> Vector2<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad_a1 = Some(Arc::new(grad_a1));
        self.grad_a2 = Some(Arc::new(grad_a2));
        self
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.grad_a1.is_some() && self.grad_a2.is_some()
    }

    /// Covariant components at `p`.
    pub fn covariant(&self, p: ChartPoint) -> Vector2<f64> {
        Vector2::new((self.a1)(p), (self.a2)(p))
    }

    pub fn scalar_potential(&self, p: ChartPoint) -> f64 {
        (self.a0)(p)
    }

    pub fn sample(&self, p: ChartPoint) -> FieldSample {
        FieldSample { covariant: self.covariant(p), scalar: self.scalar_potential(p) }
    }

    /// Partial derivatives `d_a A_b` as a matrix with rows indexed by the
    /// derivative direction `a`.
    fn partials(&self, chart: &SurfaceChart, p: ChartPoint) -> nalgebra::Matrix2<f64> {
        match (&self.grad_a1, &self.grad_a2) {
            (Some(g1), Some(g2)) => {
                let d_a1 = g1(p);
                let d_a2 = g2(p);
                nalgebra::Matrix2::new(d_a1.x, d_a2.x, d_a1.y, d_a2.y)
            }
            _ => {
                let h1 = DEFAULT_RELATIVE_STEP * chart.domain()[0].span();
                let h2 = DEFAULT_RELATIVE_STEP * chart.domain()[1].span();
                let d1 = numdiff::derivative1(
                    |q1| self.covariant(ChartPoint::new(q1, p.q2)),
                    p.q1,
                    h1,
                );
                let d2 = numdiff::derivative1(
                    |q2| self.covariant(ChartPoint::new(p.q1, q2)),
                    p.q2,
                    h2,
                );
                nalgebra::Matrix2::new(d1.x, d1.y, d2.x, d2.y)
            }
        }
    }
}

/// The Coulomb-gauge vector potential for a torus in a uniform field
/// `B = B0 + B1`:
///
/// `A_theta = B1 a^2 sin(phi)`,
/// `A_phi = B0 W^2 - B1 a W sin(theta) cos(phi)`, with `W = R0 + a cos(theta)`.
///
/// Carries analytic partial derivatives; its surface divergence vanishes
/// identically.
pub fn torus_vector_potential(
    minor_radius: f64,
    major_radius: f64,
    b0: f64,
    b1: f64,
) -> Result<FieldConfig> {
    // Reuse the shape validation from the chart constructor.
    crate::geometry::builtin_chart(crate::geometry::BuiltinSurface::Torus {
        minor_radius,
        major_radius,
    })?;
    let (a, r0) = (minor_radius, major_radius);

    let a1 = move |p: ChartPoint| b1 * a * a * p.q2.sin();
    let a2 = move |p: ChartPoint| {
        let w = r0 + a * p.q1.cos();
        b0 * w * w - b1 * a * w * p.q1.sin() * p.q2.cos()
    };
    let grad_a1 = move |p: ChartPoint| Vector2::new(0.0, b1 * a * a * p.q2.cos());
    let grad_a2 = move |p: ChartPoint| {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        let w = r0 + a * ct;
        let dw = -a * st;
        Vector2::new(
            2.0 * b0 * w * dw - b1 * a * cp * (dw * st + w * ct),
            b1 * a * w * st * sp,
        )
    };

    let mut field = FieldConfig::from_fns(a1, a2).with_analytic_partials(grad_a1, grad_a2);
    field.b0 = b0;
    field.b1 = b1;
    Ok(field)
}

/// Surface Coulomb-gauge divergence
/// `(1/sqrt(g)) d_a (sqrt(g) g^{ab} A_b)` at one point.
pub fn surface_gauge_divergence(
    chart: &SurfaceChart,
    field: &FieldConfig,
    p: ChartPoint,
) -> Result<f64> {
    let p = chart.check_domain(p)?;
    let forms = fundamental_forms(chart, p)?;
    let ginv = forms.inverse_metric();
    let sqrt_g = forms.sqrt_det_metric;

    // d_c (sqrt(g) g^{ab}) from the metric derivatives:
    // d_c sqrt(g) = sqrt(g)/2 tr(g^{-1} d_c g), d_c g^{-1} = -g^{-1} (d_c g) g^{-1}.
    let dg = metric_derivatives(chart, p)?;
    let d_partials = field.partials(chart, p);
    let a_cov = field.covariant(p);

    let mut div = 0.0;
    for c in 0..2 {
        let tr = (ginv * dg[c]).trace();
        let d_sqrt_g = 0.5 * sqrt_g * tr;
        let d_ginv = -ginv * dg[c] * ginv;
        let d_coeff = d_sqrt_g * ginv + sqrt_g * d_ginv; // d_c (sqrt(g) g^{ab})
        for b in 0..2 {
            div += d_coeff[(c, b)] * a_cov[b] + sqrt_g * ginv[(c, b)] * d_partials[(c, b)];
        }
    }
    Ok(div / sqrt_g)
}

/// Gauge diagnostics over a grid of chart points.
#[derive(Debug, Clone, Copy)]
pub struct GaugeReport {
    pub max_abs: f64,
    pub rms: f64,
    pub worst_point: ChartPoint,
}

/// Max-abs and RMS of the surface Coulomb divergence over all grid nodes.
pub fn gauge_check(
    chart: &SurfaceChart,
    field: &FieldConfig,
    grid: GridSpec,
) -> Result<GaugeReport> {
    let points = grid.points(chart)?;
    let mut max_abs = 0.0_f64;
    let mut worst = points[0];
    let mut sum_sq = 0.0;
    for &p in &points {
        let div = surface_gauge_divergence(chart, field, p)?;
        sum_sq += div * div;
        if div.abs() > max_abs {
            max_abs = div.abs();
            worst = p;
        }
    }
    Ok(GaugeReport { max_abs, rms: (sum_sq / points.len() as f64).sqrt(), worst_point: worst })
}
