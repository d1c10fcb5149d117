//! Thin-layer quantization of a spin-less charged particle near a curved
//! surface.
//!
//! The crate is organized around the pipeline the effective surface dynamics
//! needs:
//!
//! - [`geometry`]: parametrized charts, fundamental forms, Weingarten
//!   curvature and the offset-layer metric;
//! - [`potentials`]: the curvature-induced geometric potential, its
//!   surface-thickness correction, and the first-order-in-thickness kinetic
//!   correction expanded into operator coefficients;
//! - [`em`]: covariant vector potentials with `A3 = 0` and the surface
//!   Coulomb-gauge check;
//! - [`solver`]: flux-form discretization of the surface Schrödinger
//!   operator on doubly periodic grids, with dense and shift-invert Krylov
//!   eigensolvers and convergence diagnostics.
//!
//! Internal units are `hbar = 1`, `2m = 1`, `e = 1`; every energy-like
//! quantity scales linearly in [`potentials::PhysicalScale::kinetic_coeff`].

pub mod em;
pub mod error;
pub mod geometry;
pub mod potentials;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{
    builtin_chart, BuiltinSurface, ChartPoint, CurvatureData, FundamentalForms, OffsetMetric,
    SurfaceChart,
};
pub use potentials::{OperatorCoefficients, PhysicalScale, ThicknessParams};
pub use em::FieldConfig;
pub use solver::{GridSpec, HamiltonianMatrix, Spectrum, SurfaceGrid};
