//! Periodic grids over doubly periodic charts, with per-node metric data.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::geometry::{fundamental_forms, ChartPoint, SurfaceChart};

/// Number of nodes per periodic coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 >= 8 && n2 >= 8 {
            Ok(Self { n1, n2 })
        } else {
            Err(Error::InvalidRequest(format!(
                "grid must have at least 8 points per coordinate, got {n1} x {n2}"
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All node coordinates of the periodic grid over `chart`, row-major in
    /// the first coordinate (no endpoint duplication).
    pub fn points(&self, chart: &SurfaceChart) -> Result<Vec<ChartPoint>> {
        if !chart.is_doubly_periodic() {
            return Err(Error::ChartNotPeriodic);
        }
        let d = chart.domain();
        let (dq1, dq2) = (d[0].span() / self.n1 as f64, d[1].span() / self.n2 as f64);
        let mut points = Vec::with_capacity(self.len());
        for i1 in 0..self.n1 {
            let q1 = d[0].lo + i1 as f64 * dq1;
            for i2 in 0..self.n2 {
                points.push(ChartPoint::new(q1, d[1].lo + i2 as f64 * dq2));
            }
        }
        Ok(points)
    }
}

/// A [`GridSpec`] sampled over a chart: node coordinates, metric data and
/// the quadrature measure `sqrt(g) dq1 dq2` that defines the solver's inner
/// product.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    chart: SurfaceChart,
    spec: GridSpec,
    spacing: [f64; 2],
    points: Vec<ChartPoint>,
    sqrt_g: Vec<f64>,
    inverse_metric: Vec<Matrix2<f64>>,
    has_offdiagonal_metric: bool,
}

impl SurfaceGrid {
    pub fn sample(chart: &SurfaceChart, spec: GridSpec) -> Result<Self> {
        let points = spec.points(chart)?;
        let d = chart.domain();
        let spacing = [d[0].span() / spec.n1 as f64, d[1].span() / spec.n2 as f64];

        let mut sqrt_g = Vec::with_capacity(points.len());
        let mut inverse_metric = Vec::with_capacity(points.len());
        let mut has_offdiagonal_metric = false;
        for &p in &points {
            let forms = fundamental_forms(chart, p)?;
            sqrt_g.push(forms.sqrt_det_metric);
            let ginv = forms.inverse_metric();
            if ginv[(0, 1)].abs() > 1e-14 * ginv.norm() {
                has_offdiagonal_metric = true;
            }
            inverse_metric.push(ginv);
        }

        Ok(Self {
            chart: chart.clone(),
            spec,
            spacing,
            points,
            sqrt_g,
            inverse_metric,
            has_offdiagonal_metric,
        })
    }

    pub fn chart(&self) -> &SurfaceChart {
        &self.chart
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn points(&self) -> &[ChartPoint] {
        &self.points
    }

    pub fn sqrt_g(&self) -> &[f64] {
        &self.sqrt_g
    }

    pub fn inverse_metric(&self) -> &[Matrix2<f64>] {
        &self.inverse_metric
    }

    pub fn has_offdiagonal_metric(&self) -> bool {
        self.has_offdiagonal_metric
    }

    /// Quadrature weights `sqrt(g) dq1 dq2` per node.
    pub fn measure(&self) -> Vec<f64> {
        let cell = self.spacing[0] * self.spacing[1];
        self.sqrt_g.iter().map(|s| s * cell).collect()
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.spec.n2 + i2
    }

    /// Node index shifted periodically by (s1, s2) grid steps.
    pub fn shifted(&self, idx: usize, s1: isize, s2: isize) -> usize {
        let (n1, n2) = (self.spec.n1 as isize, self.spec.n2 as isize);
        let i1 = (idx / self.spec.n2) as isize;
        let i2 = (idx % self.spec.n2) as isize;
        let j1 = (i1 + s1).rem_euclid(n1) as usize;
        let j2 = (i2 + s2).rem_euclid(n2) as usize;
        self.index(j1, j2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_chart, BuiltinSurface};

    #[test]
    fn grid_spec_rejects_tiny_grids() {
        assert!(GridSpec::new(4, 16).is_err());
        assert!(GridSpec::new(8, 8).is_ok());
    }

    #[test]
    fn non_periodic_charts_are_rejected() {
        let sphere = builtin_chart(BuiltinSurface::Sphere { radius: 1.0 }).unwrap();
        let err = SurfaceGrid::sample(&sphere, GridSpec::new(8, 8).unwrap());
        assert!(matches!(err, Err(Error::ChartNotPeriodic)));
    }

    #[test]
    fn flat_box_is_accepted() {
        let flat = builtin_chart(BuiltinSurface::FlatBox { l1: 1.0, l2: 1.0 }).unwrap();
        let grid = SurfaceGrid::sample(&flat, GridSpec::new(8, 12).unwrap()).unwrap();
        assert_eq!(grid.len(), 96);
        assert!(grid.sqrt_g().iter().all(|&s| s == 1.0));
        assert!(!grid.has_offdiagonal_metric());
        assert_eq!(grid.spacing(), [1.0 / 8.0, 1.0 / 12.0]);
    }

    #[test]
    fn periodic_shifts_wrap() {
        let torus = builtin_chart(BuiltinSurface::Torus {
            minor_radius: 1.0,
            major_radius: 2.0,
        })
        .unwrap();
        let grid = SurfaceGrid::sample(&torus, GridSpec::new(8, 8).unwrap()).unwrap();
        let idx = grid.index(0, 0);
        assert_eq!(grid.shifted(idx, -1, 0), grid.index(7, 0));
        assert_eq!(grid.shifted(idx, 0, -1), grid.index(0, 7));
        assert_eq!(grid.shifted(grid.index(7, 7), 1, 1), idx);
    }

    #[test]
    fn torus_measure_total_is_surface_area() {
        // Integral of sqrt(g) = 4 pi^2 a R0.
        let torus = builtin_chart(BuiltinSurface::Torus {
            minor_radius: 1.0,
            major_radius: 3.0,
        })
        .unwrap();
        let grid = SurfaceGrid::sample(&torus, GridSpec::new(64, 64).unwrap()).unwrap();
        let total: f64 = grid.measure().iter().sum();
        let exact = 4.0 * std::f64::consts::PI.powi(2) * 3.0;
        assert!((total - exact).abs() < 1e-10 * exact);
    }
}
