//! Curvature-induced potentials and their surface-thickness corrections.
//!
//! The attractive geometric potential `V_g = -(hbar^2/2m)(M^2 - K)` is what
//! confinement to a curved surface leaves behind in the effective 2D
//! dynamics. Keeping the first-order terms in the layer offset `q3` modifies
//! it to `V_g' = V_g (1 - 4 M q3)` and adds a first-order kinetic correction
//! whose expanded coefficients live in [`OperatorCoefficients`].

mod hprime;
mod torus;

pub use hprime::{
    hprime_coefficients, hprime_coefficients_at, hprime_consistency, hprime_point_data,
    w_tensor, CoefficientBlock, HprimeConsistencyReport, HprimePointData,
};
pub use torus::{torus_hprime_coefficients, torus_modified_potential};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{f_factor, CurvatureData};

/// Physical prefactors in internal units (`hbar = 1`, `2m = 1`, `e = 1`).
///
/// `kinetic_coeff` is `hbar^2/(2m)`; `charge_coeff` is `e/hbar`, the minimal
/// coupling strength. Every potential and operator coefficient scales
/// linearly in `kinetic_coeff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScale {
    pub kinetic_coeff: f64,
    pub charge_coeff: f64,
}

impl Default for PhysicalScale {
    fn default() -> Self {
        Self { kinetic_coeff: 1.0, charge_coeff: 1.0 }
    }
}

impl PhysicalScale {
    pub fn new(kinetic_coeff: f64, charge_coeff: f64) -> Result<Self> {
        if kinetic_coeff > 0.0 && charge_coeff > 0.0 {
            Ok(Self { kinetic_coeff, charge_coeff })
        } else {
            Err(Error::InvalidRequest(format!(
                "physical scale coefficients must be positive, got kinetic = {kinetic_coeff}, charge = {charge_coeff}"
            )))
        }
    }
}

/// The fixed layer offset, a configuration constant of the surface — never a
/// grid variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessParams {
    pub offset: f64,
}

impl ThicknessParams {
    pub const fn new(offset: f64) -> Self {
        Self { offset }
    }
}

/// Expanded per-point coefficients of a second-order operator
/// `c2^{ab} d_a d_b + c1^a d_a + c0`.
///
/// The second-order block is real; the first- and zeroth-order parts pick up
/// imaginary contributions from the minimal coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorCoefficients {
    pub second_order: Matrix2<f64>,
    pub first_order: Vector2<Complex64>,
    pub zeroth_order: Complex64,
}

impl OperatorCoefficients {
    pub fn zeros() -> Self {
        Self {
            second_order: Matrix2::zeros(),
            first_order: Vector2::zeros(),
            zeroth_order: Complex64::ZERO,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.second_order == Matrix2::zeros()
            && self.first_order == Vector2::zeros()
            && self.zeroth_order == Complex64::ZERO
    }
}

/// Geometric potential `V_g = -kinetic_coeff * (M^2 - K)`.
///
/// Non-positive everywhere since `M^2 >= K`, and zero exactly on umbilical
/// surfaces (sphere, plane).
pub fn geometric_potential(curv: &CurvatureData, scale: &PhysicalScale) -> f64 {
    -scale.kinetic_coeff * (curv.mean * curv.mean - curv.gaussian)
}

/// Thickness-corrected geometric potential `V_g' = V_g (1 - 4 M q3)`.
///
/// Reduces to `V_g` bit-for-bit at `q3 = 0`; rejects offsets past the focal
/// set.
pub fn modified_geometric_potential(
    curv: &CurvatureData,
    scale: &PhysicalScale,
    t: ThicknessParams,
) -> Result<f64> {
    f_factor(curv, t.offset)?;
    Ok(geometric_potential(curv, scale) * (1.0 - 4.0 * curv.mean * t.offset))
}
