//! Low-lying spectra of discretized surface Hamiltonians.

use nalgebra::DVector;
use num_complex::Complex64;

use super::hamiltonian::{adjoint, apply_csr, frobenius, HamiltonianMatrix};
use super::krylov::{arnoldi_smallest_real, lanczos_lowest, KrylovOptions, RitzPair};
use crate::error::{Error, Result};

/// Eigensolver knobs. The defaults implement the documented policy: dense
/// solves up to 4096 unknowns, shift-invert Krylov iteration above, seeded
/// start vectors, and automatic use of the Hermitian path whenever the
/// operator is measure-Hermitian to roundoff.
#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Use the measure-Hermitian part `(H + H^+)/2` and report what was
    /// discarded.
    pub symmetrize: bool,
    /// Largest dimension solved densely.
    pub dense_cutoff: usize,
    /// Residual target for the iterative path.
    pub residual_tol: f64,
    /// Krylov subspace cap.
    pub max_subspace: usize,
    /// Seed for the iterative start vector.
    pub seed: u64,
    /// Relative Hermiticity deviation below which the operator is treated
    /// as exactly Hermitian.
    pub hermitian_rel_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            symmetrize: false,
            dense_cutoff: 4096,
            residual_tol: 1e-9,
            max_subspace: 240,
            seed: 0x7417_1a7e,
            hermitian_rel_tol: 1e-12,
        }
    }
}

/// Result of an eigensolve: eigenvalues ascending by real part, eigenvectors
/// normalized in the measure inner product (orthonormal when the solve was
/// Hermitian), per-pair relative residuals and Hermiticity diagnostics.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Imaginary parts of the Ritz values; identically zero on the Hermitian
    /// path.
    pub imaginary_parts: Vec<f64>,
    /// Measure-normalized eigenvectors, one per eigenvalue.
    pub eigenvectors: Vec<DVector<Complex64>>,
    /// Per-pair `||H v - lambda v|| / ||v||` in the measure norm.
    pub residuals: Vec<f64>,
    /// Relative measure-Hermiticity deviation of the operator as given.
    pub hermiticity_deviation: f64,
    /// Frobenius norm of the dropped anti-Hermitian part, when symmetrized.
    pub discarded_antihermitian_norm: Option<f64>,
}

impl Spectrum {
    /// Groups neighbouring eigenvalues closer than `tol` into clusters;
    /// eigenvector comparisons across such clusters only make sense via
    /// subspace angles.
    pub fn degenerate_clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        let mut clusters = Vec::new();
        let mut start = 0;
        for i in 1..=self.eigenvalues.len() {
            if i == self.eigenvalues.len()
                || (self.eigenvalues[i] - self.eigenvalues[i - 1]).abs() > tol
            {
                clusters.push(start..i);
                start = i;
            }
        }
        clusters
    }
}

/// The `k` lowest eigenpairs of `h` (smallest real part), with the default
/// policy.
pub fn lowest_eigenpairs(h: &HamiltonianMatrix, k: usize, symmetrize: bool) -> Result<Spectrum> {
    lowest_eigenpairs_with(h, k, &EigenOptions { symmetrize, ..EigenOptions::default() })
}

/// [`lowest_eigenpairs`] with explicit options.
pub fn lowest_eigenpairs_with(
    h: &HamiltonianMatrix,
    k: usize,
    opts: &EigenOptions,
) -> Result<Spectrum> {
    let n = h.dim();
    if k == 0 || 4 * k >= n {
        return Err(Error::InvalidRequest(format!(
            "requested {k} eigenpairs of a dimension-{n} operator; need 0 < k < dim/4"
        )));
    }

    // Work in the similarity-transformed frame where the measure inner
    // product is the plain l2 one.
    let scaled = h.scaled_matrix();
    let scaled_adjoint = adjoint(&scaled);
    let norm = frobenius(&scaled);
    let anti = 0.5 * frobenius(&(&scaled - &scaled_adjoint));
    let deviation = if norm == 0.0 { 0.0 } else { 2.0 * anti / norm };

    let (work, discarded) = if opts.symmetrize {
        let sym = (&scaled + &scaled_adjoint) * Complex64::new(0.5, 0.0);
        (sym, Some(anti))
    } else {
        (scaled.clone(), None)
    };
    let hermitian = opts.symmetrize || deviation <= opts.hermitian_rel_tol;

    let pairs: Vec<RitzPair> = if n <= opts.dense_cutoff {
        dense_eigenpairs(&work, k, hermitian)?
    } else {
        let kopts = KrylovOptions {
            residual_tol: opts.residual_tol,
            max_subspace: opts.max_subspace,
            seed: opts.seed,
        };
        if hermitian {
            lanczos_lowest(&work, k, &kopts)?
        } else {
            arnoldi_smallest_real(&work, k, &kopts)?
        }
    };

    // Back-transform: v = S^{-1} u is measure-normalized exactly when u is
    // l2-normalized, and residuals are frame-invariant; recompute them
    // against the operator that was solved (the symmetrized one when
    // symmetrize is set — the discarded norm quantifies the rest).
    let s_inv: Vec<f64> = h.measure().iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut imaginary_parts = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for pair in pairs {
        let u = &pair.vector;
        let mut residual_vec = apply_csr(&work, u);
        residual_vec.axpy(-pair.value, u, Complex64::new(1.0, 0.0));
        residuals.push(residual_vec.norm());

        eigenvalues.push(pair.value.re);
        imaginary_parts.push(pair.value.im);
        eigenvectors.push(DVector::from_fn(n, |i, _| u[i] * s_inv[i]));
    }

    Ok(Spectrum {
        eigenvalues,
        imaginary_parts,
        eigenvectors,
        residuals,
        hermiticity_deviation: deviation,
        discarded_antihermitian_norm: discarded,
    })
}

fn dense_eigenpairs(
    matrix: &nalgebra_sparse::CsrMatrix<Complex64>,
    k: usize,
    hermitian: bool,
) -> Result<Vec<RitzPair>> {
    let n = matrix.nrows();
    // Column-major dense copy for faer.
    let mut dense = vec![Complex64::ZERO; n * n];
    for (i, j, v) in matrix.triplet_iter() {
        dense[i + j * n] += v;
    }
    let mat = faer::Mat::from_fn(n, n, |i, j| dense[i + j * n]);
    drop(dense);

    let mut pairs = Vec::with_capacity(k);
    if hermitian {
        let eig = mat
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::ConvergenceFailure(format!("dense eigensolve failed: {e:?}")))?;
        let values: Vec<f64> = eig.S().column_vector().iter().map(|v| v.re).collect();
        for idx in 0..k {
            let vector = DVector::from_iterator(n, eig.U().col(idx).iter().copied());
            pairs.push(RitzPair {
                value: Complex64::new(values[idx], 0.0),
                vector,
                residual: 0.0,
            });
        }
    } else {
        let eig = mat
            .eigen()
            .map_err(|e| Error::ConvergenceFailure(format!("dense eigensolve failed: {e:?}")))?;
        let values: Vec<Complex64> = eig.S().column_vector().iter().copied().collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            (values[a].re, values[a].im).partial_cmp(&(values[b].re, values[b].im)).unwrap()
        });
        for &idx in order.iter().take(k) {
            let mut vector = DVector::from_iterator(n, eig.U().col(idx).iter().copied());
            vector /= Complex64::new(vector.norm(), 0.0);
            pairs.push(RitzPair { value: values[idx], vector, residual: 0.0 });
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::FieldConfig;
    use crate::geometry::{builtin_chart, BuiltinSurface};
    use crate::potentials::PhysicalScale;
    use crate::solver::assemble::assemble_h0;
    use crate::solver::grid::{GridSpec, SurfaceGrid};

    fn flat_box_h0(n: usize, l: f64) -> HamiltonianMatrix {
        let chart = builtin_chart(BuiltinSurface::FlatBox { l1: l, l2: l }).unwrap();
        let grid = SurfaceGrid::sample(&chart, GridSpec::new(n, n).unwrap()).unwrap();
        assemble_h0(&grid, &FieldConfig::zero(), &vec![0.0; grid.len()], &PhysicalScale::default())
            .unwrap()
    }

    #[test]
    fn rejects_oversized_requests() {
        let h = flat_box_h0(8, 1.0);
        assert!(matches!(lowest_eigenpairs(&h, 16, false), Err(Error::InvalidRequest(_))));
        assert!(matches!(lowest_eigenpairs(&h, 0, false), Err(Error::InvalidRequest(_))));
    }

    #[test]
    fn flat_box_dense_matches_discrete_dispersion() {
        // The discrete operator's exact spectrum is
        // (2 - 2 cos(2 pi m / n)) / dx^2 summed over both directions.
        let n = 12;
        let l = 2.0;
        let h = flat_box_h0(n, l);
        let spec = lowest_eigenpairs(&h, 5, false).unwrap();

        let dx = l / n as f64;
        let level = |m: i32| {
            (2.0 - 2.0 * (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()) / (dx * dx)
        };
        let mut expect: Vec<f64> = Vec::new();
        for m1 in -(n as i32) / 2..(n as i32) / 2 {
            for m2 in -(n as i32) / 2..(n as i32) / 2 {
                expect.push(level(m1) + level(m2));
            }
        }
        expect.sort_by(f64::total_cmp);
        for (got, want) in spec.eigenvalues.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-9 * (1.0 + want), "{got} vs {want}");
        }
        assert!(spec.hermiticity_deviation < 1e-13);
        assert_eq!(spec.degenerate_clusters(1e-9).len(), 2); // {0} and a 4-fold level
    }

    #[test]
    fn eigenvectors_are_measure_orthonormal() {
        let chart = builtin_chart(BuiltinSurface::Torus {
            minor_radius: 10.0,
            major_radius: 15.0,
        })
        .unwrap();
        let grid = SurfaceGrid::sample(&chart, GridSpec::new(12, 12).unwrap()).unwrap();
        let h = assemble_h0(
            &grid,
            &FieldConfig::zero(),
            &vec![0.0; grid.len()],
            &PhysicalScale::default(),
        )
        .unwrap();
        let spec = lowest_eigenpairs(&h, 4, false).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let g = h.measure_inner(&spec.eigenvectors[i], &spec.eigenvectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(expect, 0.0)).norm() < 1e-8, "({i},{j}): {g}");
            }
        }
        for r in &spec.residuals {
            assert!(*r < 1e-8);
        }
    }

    #[test]
    fn symmetrize_is_a_noop_on_hermitian_operators() {
        let h = flat_box_h0(10, 1.0);
        let plain = lowest_eigenpairs(&h, 3, false).unwrap();
        let symmetrized = lowest_eigenpairs(&h, 3, true).unwrap();
        for (a, b) in plain.eigenvalues.iter().zip(&symmetrized.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(symmetrized.discarded_antihermitian_norm.unwrap() < 1e-10);
    }

    #[test]
    fn constant_potential_shifts_the_spectrum() {
        let chart = builtin_chart(BuiltinSurface::FlatBox { l1: 1.0, l2: 1.0 }).unwrap();
        let grid = SurfaceGrid::sample(&chart, GridSpec::new(10, 10).unwrap()).unwrap();
        let scale = PhysicalScale::default();
        let h0 =
            assemble_h0(&grid, &FieldConfig::zero(), &vec![0.0; grid.len()], &scale).unwrap();
        let shifted =
            assemble_h0(&grid, &FieldConfig::zero(), &vec![0.7; grid.len()], &scale).unwrap();
        let a = lowest_eigenpairs(&h0, 3, false).unwrap();
        let b = lowest_eigenpairs(&shifted, 3, false).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((y - x - 0.7).abs() < 1e-10);
        }
    }

    #[test]
    fn iterative_path_matches_dense_path() {
        let h = flat_box_h0(12, 1.0);
        let dense = lowest_eigenpairs(&h, 4, false).unwrap();
        let iterative = lowest_eigenpairs_with(
            &h,
            4,
            &EigenOptions { dense_cutoff: 10, ..EigenOptions::default() },
        )
        .unwrap();
        for (a, b) in dense.eigenvalues.iter().zip(&iterative.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        for r in &iterative.residuals {
            assert!(*r <= 1e-8);
        }
    }
}
