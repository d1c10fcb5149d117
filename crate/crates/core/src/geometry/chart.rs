//! Parametrized surface charts.
//!
//! A [`SurfaceChart`] is an embedding map `(q1, q2) -> R^3` together with a
//! coordinate domain, a derivative source (analytic closures or numeric
//! stencils) and a normal orientation sign. The built-in charts (plane,
//! cylinder, sphere, torus) ship analytic derivatives; any embedding can be
//! used with numeric differentiation instead.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Vector2, Vector3};

use super::numdiff;
use crate::error::{Error, Result};

/// A point in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub q1: f64,
    pub q2: f64,
}

impl ChartPoint {
    pub const fn new(q1: f64, q2: f64) -> Self {
        Self { q1, q2 }
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q1, self.q2)
    }
}

/// How a coordinate closes up, if at all.
///
/// `Geometric` periodicity means the embedding itself repeats,
/// `r(q + period) = r(q)`; `Identified` marks a coordinate that is periodic
/// by fiat (the flat-box debug surface identifies opposite edges without the
/// embedding closing up). The grid solver accepts either; the closure
/// invariant is only checked for `Geometric`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    None,
    Geometric,
    Identified,
}

/// One coordinate range of a chart domain.
#[derive(Debug, Clone, Copy)]
pub struct CoordRange {
    pub lo: f64,
    pub hi: f64,
    pub periodicity: Periodicity,
}

impl CoordRange {
    pub fn bounded(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodicity: Periodicity::None }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodicity: Periodicity::Geometric }
    }

    pub fn identified(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodicity: Periodicity::Identified }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_periodic(&self) -> bool {
        self.periodicity != Periodicity::None
    }

    pub fn period(&self) -> Option<f64> {
        self.is_periodic().then(|| self.span())
    }

    /// Wraps periodic coordinates into `[lo, hi)`; bounded ones pass through.
    pub fn reduce(&self, q: f64) -> f64 {
        if self.is_periodic() {
            self.lo + (q - self.lo).rem_euclid(self.span())
        } else {
            q
        }
    }

    pub fn contains(&self, q: f64) -> bool {
        self.is_periodic() || (q >= self.lo && q <= self.hi)
    }
}

/// The embedding map of a chart, with optional analytic derivatives.
///
/// Implementations must be evaluable in a small neighbourhood of the declared
/// domain so that numeric stencils near the boundary stay well-defined.
pub trait Embedding: Send + Sync {
    fn position(&self, p: ChartPoint) -> Vector3<f64>;

    /// `[d r/d q1, d r/d q2]`, if available in closed form.
    fn first_derivatives(&self, _p: ChartPoint) -> Option<[Vector3<f64>; 2]> {
        None
    }

    /// `[d11 r, d12 r, d22 r]`, if available in closed form.
    fn second_derivatives(&self, _p: ChartPoint) -> Option<[Vector3<f64>; 3]> {
        None
    }
}

/// Closure-backed embedding for ad-hoc charts; always differentiated
/// numerically.
pub struct FnEmbedding<F>(pub F);

impl<F> Embedding for FnEmbedding<F>
where
    F: Fn(ChartPoint) -> Vector3<f64> + Send + Sync,
{
    fn position(&self, p: ChartPoint) -> Vector3<f64> {
        (self.0)(p)
    }
}

/// Derivative source for a chart: closed-form derivatives from the embedding,
/// or fourth-order central differences with per-coordinate steps.
#[derive(Debug, Clone, Copy)]
pub enum DerivativeSource {
    Analytic,
    Numeric { h1: f64, h2: f64 },
}

/// Relative step used when deriving numeric-differentiation steps from the
/// coordinate span.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

type GradMFn = dyn Fn(ChartPoint) -> Vector2<f64> + Send + Sync;

/// A parametrized surface: embedding, derivative source, domain and normal
/// orientation.
#[derive(Clone)]
pub struct SurfaceChart {
    embedding: Arc<dyn Embedding>,
    source: DerivativeSource,
    domain: [CoordRange; 2],
    orientation: f64,
    grad_mean_curvature: Option<Arc<GradMFn>>,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("source", &self.source)
            .field("domain", &self.domain)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl SurfaceChart {
    pub fn new(
        embedding: Arc<dyn Embedding>,
        source: DerivativeSource,
        domain: [CoordRange; 2],
        orientation: f64,
    ) -> Self {
        assert!(orientation == 1.0 || orientation == -1.0, "orientation must be +1 or -1");
        Self { embedding, source, domain, orientation, grad_mean_curvature: None }
    }

    /// Chart over an arbitrary embedding closure, differentiated numerically
    /// with the default step of `1e-4` times each coordinate span.
    pub fn from_fn<F>(embedding: F, domain: [CoordRange; 2], orientation: f64) -> Self
    where
        F: Fn(ChartPoint) -> Vector3<f64> + Send + Sync + 'static,
    {
        let h1 = DEFAULT_RELATIVE_STEP * domain[0].span();
        let h2 = DEFAULT_RELATIVE_STEP * domain[1].span();
        Self::new(
            Arc::new(FnEmbedding(embedding)),
            DerivativeSource::Numeric { h1, h2 },
            domain,
            orientation,
        )
    }

    /// Same chart with all derivatives taken numerically (drops analytic
    /// shortcuts, including any mean-curvature gradient). Used as an
    /// independent oracle for the analytic built-ins.
    pub fn with_numeric_derivatives(&self) -> Self {
        let mut chart = self.clone();
        chart.source = DerivativeSource::Numeric {
            h1: DEFAULT_RELATIVE_STEP * self.domain[0].span(),
            h2: DEFAULT_RELATIVE_STEP * self.domain[1].span(),
        };
        chart.grad_mean_curvature = None;
        chart
    }

    pub(crate) fn with_grad_mean_curvature(mut self, grad: Arc<GradMFn>) -> Self {
        self.grad_mean_curvature = Some(grad);
        self
    }

    pub fn domain(&self) -> &[CoordRange; 2] {
        &self.domain
    }

    pub fn source(&self) -> DerivativeSource {
        self.source
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn is_doubly_periodic(&self) -> bool {
        self.domain.iter().all(CoordRange::is_periodic)
    }

    /// Analytic chart-level gradient of the mean curvature, when the built-in
    /// provides one (the torus does). `None` means callers fall back to
    /// numeric differentiation of M.
    pub fn analytic_mean_curvature_gradient(&self, p: ChartPoint) -> Option<Vector2<f64>> {
        self.grad_mean_curvature.as_ref().map(|f| f(self.reduce(p)))
    }

    /// Wraps periodic coordinates into their principal range.
    pub fn reduce(&self, p: ChartPoint) -> ChartPoint {
        ChartPoint::new(self.domain[0].reduce(p.q1), self.domain[1].reduce(p.q2))
    }

    /// Reduces `p` and rejects points outside bounded coordinate ranges.
    pub fn check_domain(&self, p: ChartPoint) -> Result<ChartPoint> {
        let p = self.reduce(p);
        if self.domain[0].contains(p.q1) && self.domain[1].contains(p.q2) {
            Ok(p)
        } else {
            Err(Error::OutOfDomain { q1: p.q1, q2: p.q2 })
        }
    }

    pub fn position(&self, p: ChartPoint) -> Vector3<f64> {
        self.embedding.position(p)
    }

    /// Tangent vectors `[d1 r, d2 r]`.
    pub fn tangents(&self, p: ChartPoint) -> [Vector3<f64>; 2] {
        match self.source {
            DerivativeSource::Analytic => self
                .embedding
                .first_derivatives(p)
                .expect("analytic chart must supply first derivatives"),
            DerivativeSource::Numeric { h1, h2 } => [
                numdiff::derivative1(
                    |q1| self.embedding.position(ChartPoint::new(q1, p.q2)),
                    p.q1,
                    h1,
                ),
                numdiff::derivative1(
                    |q2| self.embedding.position(ChartPoint::new(p.q1, q2)),
                    p.q2,
                    h2,
                ),
            ],
        }
    }

    /// Second derivatives `[d11 r, d12 r, d22 r]`. The mixed derivative is a
    /// single evaluator, so the second fundamental form is symmetric by
    /// construction.
    pub fn second_derivatives(&self, p: ChartPoint) -> [Vector3<f64>; 3] {
        match self.source {
            DerivativeSource::Analytic => self
                .embedding
                .second_derivatives(p)
                .expect("analytic chart must supply second derivatives"),
            DerivativeSource::Numeric { h1, h2 } => {
                let r = |q1: f64, q2: f64| self.embedding.position(ChartPoint::new(q1, q2));
                let d11 = numdiff::derivative2(|q1| r(q1, p.q2), p.q1, h1);
                let d22 = numdiff::derivative2(|q2| r(p.q1, q2), p.q2, h2);
                let d12 = numdiff::derivative1(
                    |q2| numdiff::derivative1(|q1| r(q1, q2), p.q1, h1),
                    p.q2,
                    h2,
                );
                [d11, d12, d22]
            }
        }
    }
}

/// Shape parameters for the built-in charts.
///
/// `FlatBox` is the doubly identified plane used as the solver's
/// free-particle debug surface; the four geometric kinds follow the usual
/// conventions (see each constructor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinSurface {
    /// `r = (q1, q2, 0)` on `[0, l1] x [0, l2]`, bounded.
    Plane { l1: f64, l2: f64 },
    /// Same embedding as `Plane`, but both coordinates identified with
    /// periods `l1`, `l2`.
    FlatBox { l1: f64, l2: f64 },
    /// Radius-`radius` cylinder along z: `(phi, z)` with `phi` periodic.
    Cylinder { radius: f64, length: f64 },
    /// Radius-`radius` sphere in colatitude/azimuth coordinates.
    Sphere { radius: f64 },
    /// Ring torus, minor radius `minor_radius`, major radius `major_radius`,
    /// coordinates `(theta, phi)`, both periodic.
    Torus { minor_radius: f64, major_radius: f64 },
}

/// Builds a built-in chart with analytic derivatives.
///
/// Normal orientations are fixed so that offsetting along the normal grows
/// the surface: outward on cylinder, sphere and torus, `+z` on the plane. In
/// particular the torus reproduces the offset metric
/// `diag((a+q3)^2, (W+q3 cos(theta))^2)`.
pub fn builtin_chart(kind: BuiltinSurface) -> Result<SurfaceChart> {
    let positive = |v: f64, name: &str| -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidShape(format!("{name} must be positive and finite, got {v}")))
        }
    };

    match kind {
        BuiltinSurface::Plane { l1, l2 } => {
            let l1 = positive(l1, "l1")?;
            let l2 = positive(l2, "l2")?;
            Ok(SurfaceChart::new(
                Arc::new(PlaneEmbedding),
                DerivativeSource::Analytic,
                [CoordRange::bounded(0.0, l1), CoordRange::bounded(0.0, l2)],
                1.0,
            ))
        }
        BuiltinSurface::FlatBox { l1, l2 } => {
            let l1 = positive(l1, "l1")?;
            let l2 = positive(l2, "l2")?;
            Ok(SurfaceChart::new(
                Arc::new(PlaneEmbedding),
                DerivativeSource::Analytic,
                [CoordRange::identified(0.0, l1), CoordRange::identified(0.0, l2)],
                1.0,
            ))
        }
        BuiltinSurface::Cylinder { radius, length } => {
            let radius = positive(radius, "radius")?;
            let length = positive(length, "length")?;
            Ok(SurfaceChart::new(
                Arc::new(CylinderEmbedding { radius }),
                DerivativeSource::Analytic,
                [
                    CoordRange::periodic(-std::f64::consts::PI, std::f64::consts::PI),
                    CoordRange::bounded(0.0, length),
                ],
                1.0,
            ))
        }
        BuiltinSurface::Sphere { radius } => {
            let radius = positive(radius, "radius")?;
            Ok(SurfaceChart::new(
                Arc::new(SphereEmbedding { radius }),
                DerivativeSource::Analytic,
                [
                    CoordRange::bounded(0.0, std::f64::consts::PI),
                    CoordRange::periodic(-std::f64::consts::PI, std::f64::consts::PI),
                ],
                1.0,
            ))
        }
        BuiltinSurface::Torus { minor_radius, major_radius } => {
            let a = positive(minor_radius, "minor radius")?;
            let r0 = positive(major_radius, "major radius")?;
            if a >= r0 {
                return Err(Error::InvalidShape(format!(
                    "torus requires minor radius < major radius (self-intersecting otherwise), got a = {a}, R0 = {r0}"
                )));
            }
            let pi = std::f64::consts::PI;
            // The raw cross-product normal for (theta, phi) ordering points
            // inward; flip it so offsets match the closed-form offset metric.
            let chart = SurfaceChart::new(
                Arc::new(TorusEmbedding { minor: a, major: r0 }),
                DerivativeSource::Analytic,
                [CoordRange::periodic(-pi, pi), CoordRange::periodic(-pi, pi)],
                -1.0,
            );
            Ok(chart.with_grad_mean_curvature(Arc::new(move |p: ChartPoint| {
                let w = r0 + a * p.q1.cos();
                Vector2::new(-r0 * p.q1.sin() / (2.0 * w * w), 0.0)
            })))
        }
    }
}

struct PlaneEmbedding;

impl Embedding for PlaneEmbedding {
    fn position(&self, p: ChartPoint) -> Vector3<f64> {
        Vector3::new(p.q1, p.q2, 0.0)
    }

    fn first_derivatives(&self, _p: ChartPoint) -> Option<[Vector3<f64>; 2]> {
        Some([Vector3::x(), Vector3::y()])
    }

    fn second_derivatives(&self, _p: ChartPoint) -> Option<[Vector3<f64>; 3]> {
        Some([Vector3::zeros(); 3])
    }
}

struct CylinderEmbedding {
    radius: f64,
}

impl Embedding for CylinderEmbedding {
    fn position(&self, p: ChartPoint) -> Vector3<f64> {
        let (s, c) = p.q1.sin_cos();
        Vector3::new(self.radius * c, self.radius * s, p.q2)
    }

    fn first_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 2]> {
        let (s, c) = p.q1.sin_cos();
        Some([Vector3::new(-self.radius * s, self.radius * c, 0.0), Vector3::z()])
    }

    fn second_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 3]> {
        let (s, c) = p.q1.sin_cos();
        Some([
            Vector3::new(-self.radius * c, -self.radius * s, 0.0),
            Vector3::zeros(),
            Vector3::zeros(),
        ])
    }
}

struct SphereEmbedding {
    radius: f64,
}

impl Embedding for SphereEmbedding {
    fn position(&self, p: ChartPoint) -> Vector3<f64> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        self.radius * Vector3::new(st * cp, st * sp, ct)
    }

    fn first_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 2]> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        Some([
            self.radius * Vector3::new(ct * cp, ct * sp, -st),
            self.radius * Vector3::new(-st * sp, st * cp, 0.0),
        ])
    }

    fn second_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 3]> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        Some([
            -self.radius * Vector3::new(st * cp, st * sp, ct),
            self.radius * Vector3::new(-ct * sp, ct * cp, 0.0),
            self.radius * Vector3::new(-st * cp, -st * sp, 0.0),
        ])
    }
}

struct TorusEmbedding {
    minor: f64,
    major: f64,
}

impl Embedding for TorusEmbedding {
    fn position(&self, p: ChartPoint) -> Vector3<f64> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        let w = self.major + self.minor * ct;
        Vector3::new(w * cp, w * sp, self.minor * st)
    }

    fn first_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 2]> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        let a = self.minor;
        let w = self.major + a * ct;
        Some([
            Vector3::new(-a * st * cp, -a * st * sp, a * ct),
            Vector3::new(-w * sp, w * cp, 0.0),
        ])
    }

    fn second_derivatives(&self, p: ChartPoint) -> Option<[Vector3<f64>; 3]> {
        let (st, ct) = p.q1.sin_cos();
        let (sp, cp) = p.q2.sin_cos();
        let a = self.minor;
        let w = self.major + a * ct;
        Some([
            Vector3::new(-a * ct * cp, -a * ct * sp, -a * st),
            Vector3::new(a * st * sp, -a * st * cp, 0.0),
            Vector3::new(-w * cp, -w * sp, 0.0),
        ])
    }
}
