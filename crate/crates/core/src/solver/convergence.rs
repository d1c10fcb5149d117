//! Grid-refinement studies: eigenvalues per grid, Cauchy gaps and observed
//! convergence orders.

use super::assemble::assemble_h0;
use super::eigen::{lowest_eigenpairs_with, EigenOptions};
use super::grid::{GridSpec, SurfaceGrid};
use crate::em::FieldConfig;
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, SurfaceChart};
use crate::potentials::PhysicalScale;

/// Eigenvalues of the same scenario across a sequence of grids.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub grids: Vec<GridSpec>,
    /// `eigenvalues[g][l]`: level `l` on grid `g`, ascending.
    pub eigenvalues: Vec<Vec<f64>>,
}

impl ConvergenceStudy {
    /// `|lambda_g - lambda_{g+1}|` per refinement step and level.
    pub fn cauchy_gaps(&self) -> Vec<Vec<f64>> {
        self.eigenvalues
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).collect())
            .collect()
    }

    /// Observed self-convergence order per consecutive grid triple and
    /// level: `log(gap_i / gap_{i+1}) / log(ratio)`. `None` where gaps sit
    /// at the eigensolver's roundoff floor (the level is exact on both
    /// grids).
    pub fn observed_orders(&self) -> Vec<Vec<Option<f64>>> {
        let gaps = self.cauchy_gaps();
        let floor = self.roundoff_floor();
        let mut orders = Vec::new();
        for i in 0..gaps.len().saturating_sub(1) {
            let ratio = self.grids[i + 1].n1 as f64 / self.grids[i].n1 as f64;
            orders.push(
                gaps[i]
                    .iter()
                    .zip(&gaps[i + 1])
                    .map(|(&coarse, &fine)| {
                        (coarse > floor && fine > floor)
                            .then(|| (coarse / fine).ln() / ratio.ln())
                    })
                    .collect(),
            );
        }
        orders
    }

    /// Observed order against known reference eigenvalues, per refinement
    /// step and level.
    pub fn observed_orders_vs(&self, reference: &[f64]) -> Vec<Vec<Option<f64>>> {
        let floor = self
            .roundoff_floor()
            .max(1e-11 * reference.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
        let errors: Vec<Vec<f64>> = self
            .eigenvalues
            .iter()
            .map(|evs| evs.iter().zip(reference).map(|(a, b)| (a - b).abs()).collect())
            .collect();
        let mut orders = Vec::new();
        for i in 0..errors.len().saturating_sub(1) {
            let ratio = self.grids[i + 1].n1 as f64 / self.grids[i].n1 as f64;
            orders.push(
                errors[i]
                    .iter()
                    .zip(&errors[i + 1])
                    .map(|(&coarse, &fine)| {
                        (coarse > floor && fine > floor)
                            .then(|| (coarse / fine).ln() / ratio.ln())
                    })
                    .collect(),
            );
        }
        orders
    }

    /// Differences below this are indistinguishable from eigensolver
    /// roundoff at the spectral scale of the data.
    fn roundoff_floor(&self) -> f64 {
        let scale = self
            .eigenvalues
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()));
        1e-11 * scale.max(1e-300)
    }
}

/// Solves the same surface scenario (chart, field, pointwise potential) on
/// every grid in `grids` and collects the `k` lowest eigenvalues.
pub fn convergence_study(
    chart: &SurfaceChart,
    field: &FieldConfig,
    potential: &dyn Fn(ChartPoint) -> f64,
    scale: &PhysicalScale,
    grids: &[GridSpec],
    k: usize,
    opts: &EigenOptions,
) -> Result<ConvergenceStudy> {
    if grids.len() < 2 {
        return Err(Error::InvalidRequest(
            "a convergence study needs at least two grids".into(),
        ));
    }
    let mut eigenvalues = Vec::with_capacity(grids.len());
    for &spec in grids {
        let grid = SurfaceGrid::sample(chart, spec)?;
        let v: Vec<f64> = grid.points().iter().map(|&p| potential(p)).collect();
        let h = assemble_h0(&grid, field, &v, scale)?;
        let spectrum = lowest_eigenpairs_with(&h, k, opts)?;
        eigenvalues.push(spectrum.eigenvalues);
    }
    Ok(ConvergenceStudy { grids: grids.to_vec(), eigenvalues })
}
