//! Discretization and spectra of the surface Schrödinger operator on doubly
//! periodic grids.
//!
//! The base Hamiltonian is assembled in flux form so that Coulomb-gauge
//! scenarios give an exactly measure-Hermitian matrix; the thickness
//! correction is assembled verbatim from its operator coefficients and is in
//! general not Hermitian — spectra report the deviation, and symmetrization
//! is strictly opt-in.

pub mod assemble;
pub mod convergence;
pub mod eigen;
pub mod grid;
pub mod hamiltonian;
mod krylov;

pub use assemble::{assemble_h0, assemble_hprime, GAUGE_TOLERANCE};
pub use convergence::{convergence_study, ConvergenceStudy};
pub use eigen::{lowest_eigenpairs, lowest_eigenpairs_with, EigenOptions, Spectrum};
pub use grid::{GridSpec, SurfaceGrid};
pub use hamiltonian::HamiltonianMatrix;
