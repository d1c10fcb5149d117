//! Shift-invert Krylov eigensolvers for grids past the dense cutoff.
//!
//! The subspace is grown by inexact shift-invert iterations (conjugate
//! gradients against `A - shift` for Hermitian operators, restarted GMRES
//! otherwise) with full reorthogonalization; eigenpairs are then extracted
//! by Galerkin projection of the *original* operator onto the subspace, so
//! inner-solve inexactness only slows enrichment and never biases the Ritz
//! values. Start vectors are seeded: repeated runs agree bit-for-bit.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::hamiltonian::apply_csr;
use crate::error::{Error, Result};

pub(crate) struct KrylovOptions {
    pub residual_tol: f64,
    pub max_subspace: usize,
    pub seed: u64,
}

/// One Ritz pair of the original operator.
pub(crate) struct RitzPair {
    pub value: Complex64,
    pub vector: DVector<Complex64>,
    pub residual: f64,
}

/// Gershgorin bounds on the real part of the spectrum.
pub(crate) fn gershgorin_bounds(m: &CsrMatrix<Complex64>) -> (f64, f64) {
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for (i, row) in m.row_iter().enumerate() {
        let mut center = 0.0;
        let mut radius = 0.0;
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            if j == i {
                center = v.re;
            } else {
                radius += v.norm();
            }
        }
        lower = lower.min(center - radius);
        upper = upper.max(center + radius);
    }
    (lower, upper)
}

fn seeded_unit_vector(n: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut v = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    v /= Complex64::new(v.norm(), 0.0);
    v
}

fn orthogonalize(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    // Two passes of modified Gram-Schmidt keep the basis orthonormal to
    // machine precision.
    for _ in 0..2 {
        for b in basis {
            let proj = b.dotc(v);
            v.axpy(-proj, b, Complex64::new(1.0, 0.0));
        }
    }
}

/// Conjugate gradients for the Hermitian positive definite `A - shift`,
/// Jacobi preconditioned.
pub(crate) struct CgSolver<'a> {
    matrix: &'a CsrMatrix<Complex64>,
    shift: f64,
    inv_diag: Vec<f64>,
    pub tol: f64,
    pub max_iterations: usize,
}

impl<'a> CgSolver<'a> {
    pub fn new(matrix: &'a CsrMatrix<Complex64>, shift: f64) -> Self {
        let n = matrix.nrows();
        let mut diag = vec![1.0; n];
        for (i, row) in matrix.row_iter().enumerate() {
            for (&j, v) in row.col_indices().iter().zip(row.values()) {
                if j == i {
                    diag[i] = (v.re - shift).max(1e-300);
                }
            }
        }
        Self {
            matrix,
            shift,
            inv_diag: diag.into_iter().map(|d| 1.0 / d).collect(),
            tol: 1e-13,
            max_iterations: 50_000,
        }
    }

    fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = apply_csr(self.matrix, v);
        out.axpy(Complex64::new(-self.shift, 0.0), v, Complex64::new(1.0, 0.0));
        out
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let n = b.len();
        let b_norm = b.norm();
        if b_norm == 0.0 {
            return Ok(DVector::zeros(n));
        }
        let precondition = |r: &DVector<Complex64>| -> DVector<Complex64> {
            DVector::from_fn(n, |i, _| r[i] * self.inv_diag[i])
        };

        let mut x = DVector::zeros(n);
        let mut r = b.clone();
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rho = r.dotc(&z).re;
        for _ in 0..self.max_iterations {
            let ap = self.apply(&p);
            let alpha = rho / p.dotc(&ap).re;
            x.axpy(Complex64::new(alpha, 0.0), &p, Complex64::new(1.0, 0.0));
            r.axpy(Complex64::new(-alpha, 0.0), &ap, Complex64::new(1.0, 0.0));
            if r.norm() <= self.tol * b_norm {
                return Ok(x);
            }
            z = precondition(&r);
            let rho_next = r.dotc(&z).re;
            let beta = rho_next / rho;
            rho = rho_next;
            p = &z + &p * Complex64::new(beta, 0.0);
        }
        Err(Error::ConvergenceFailure(format!(
            "inner CG stalled at relative residual {:.3e} (shift {:.6e})",
            r.norm() / b_norm,
            self.shift
        )))
    }
}

/// Restarted GMRES for the near-Hermitian `A - shift`.
pub(crate) struct GmresSolver<'a> {
    matrix: &'a CsrMatrix<Complex64>,
    shift: f64,
    pub tol: f64,
    pub restart: usize,
    pub max_restarts: usize,
}

impl<'a> GmresSolver<'a> {
    pub fn new(matrix: &'a CsrMatrix<Complex64>, shift: f64) -> Self {
        Self { matrix, shift, tol: 1e-12, restart: 80, max_restarts: 400 }
    }

    fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = apply_csr(self.matrix, v);
        out.axpy(Complex64::new(-self.shift, 0.0), v, Complex64::new(1.0, 0.0));
        out
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let n = b.len();
        let b_norm = b.norm();
        if b_norm == 0.0 {
            return Ok(DVector::zeros(n));
        }
        let mut x = DVector::<Complex64>::zeros(n);

        for _ in 0..self.max_restarts {
            let r = b - self.apply(&x);
            let beta = r.norm();
            if beta <= self.tol * b_norm {
                return Ok(x);
            }

            let m = self.restart;
            let mut basis: Vec<DVector<Complex64>> = vec![&r / Complex64::new(beta, 0.0)];
            // Hessenberg columns after Givens triangularization.
            let mut hess: Vec<Vec<Complex64>> = Vec::with_capacity(m);
            let mut cs: Vec<Complex64> = Vec::with_capacity(m);
            let mut sn: Vec<Complex64> = Vec::with_capacity(m);
            let mut g = vec![Complex64::ZERO; m + 1];
            g[0] = Complex64::new(beta, 0.0);
            let mut converged = false;

            for j in 0..m {
                let mut w = self.apply(&basis[j]);
                let mut h_col = vec![Complex64::ZERO; j + 2];
                for (i, v) in basis.iter().enumerate() {
                    let hij = v.dotc(&w);
                    h_col[i] = hij;
                    w.axpy(-hij, v, Complex64::new(1.0, 0.0));
                }
                let h_next = w.norm();
                h_col[j + 1] = Complex64::new(h_next, 0.0);

                for i in 0..j {
                    let t = cs[i].conj() * h_col[i] + sn[i].conj() * h_col[i + 1];
                    h_col[i + 1] = -sn[i] * h_col[i] + cs[i] * h_col[i + 1];
                    h_col[i] = t;
                }
                let denom = (h_col[j].norm_sqr() + h_col[j + 1].norm_sqr()).sqrt();
                let (c, s) = if denom == 0.0 {
                    (Complex64::new(1.0, 0.0), Complex64::ZERO)
                } else {
                    (h_col[j] / denom, h_col[j + 1] / denom)
                };
                cs.push(c);
                sn.push(s);
                h_col[j] = Complex64::new(denom, 0.0);
                h_col[j + 1] = Complex64::ZERO;
                g[j + 1] = -s * g[j];
                g[j] = c.conj() * g[j];
                hess.push(h_col);

                if g[j + 1].norm() <= self.tol * b_norm || h_next < 1e-300 {
                    converged = true;
                    break;
                }
                basis.push(&w / Complex64::new(h_next, 0.0));
            }

            let k = hess.len();
            let mut y = vec![Complex64::ZERO; k];
            for i in (0..k).rev() {
                let mut acc = g[i];
                for (l, y_l) in y.iter().enumerate().take(k).skip(i + 1) {
                    acc -= hess[l][i] * y_l;
                }
                y[i] = acc / hess[i][i];
            }
            for (v, y_i) in basis.iter().zip(&y) {
                x.axpy(*y_i, v, Complex64::new(1.0, 0.0));
            }
            if converged {
                return Ok(x);
            }
        }
        let res = (b - self.apply(&x)).norm() / b_norm;
        Err(Error::ConvergenceFailure(format!(
            "inner GMRES stalled at relative residual {res:.3e} (shift {:.6e})",
            self.shift
        )))
    }
}

/// Growable Galerkin projection `V^H A V` with the mapped vectors `A v_j`
/// cached for cheap residuals.
struct Projection {
    proj: DMatrix<Complex64>,
    mapped: Vec<DVector<Complex64>>,
}

impl Projection {
    fn new(max_subspace: usize) -> Self {
        Self { proj: DMatrix::zeros(max_subspace, max_subspace), mapped: Vec::new() }
    }

    fn extend(&mut self, matrix: &CsrMatrix<Complex64>, basis: &[DVector<Complex64>]) {
        let old = self.mapped.len();
        for v in basis.iter().skip(old) {
            self.mapped.push(apply_csr(matrix, v));
        }
        let m = basis.len();
        for j in old..m {
            for i in 0..m {
                self.proj[(i, j)] = basis[i].dotc(&self.mapped[j]);
            }
        }
        for j in 0..old {
            for i in old..m {
                self.proj[(i, j)] = basis[i].dotc(&self.mapped[j]);
            }
        }
    }

    /// Ritz pairs of the k smallest (real-part) eigenvalues over the current
    /// subspace. `hermitian` symmetrizes the projected matrix first.
    fn ritz_pairs(
        &self,
        basis: &[DVector<Complex64>],
        k: usize,
        hermitian: bool,
    ) -> Result<Vec<RitzPair>> {
        let m = basis.len();
        let n = basis[0].len();
        let mut pairs = Vec::with_capacity(k);

        let mut emit = |value: Complex64, y: &[Complex64]| {
            let mut x = DVector::<Complex64>::zeros(n);
            let mut hx = DVector::<Complex64>::zeros(n);
            for ((v, w), &y_i) in basis.iter().zip(&self.mapped).zip(y) {
                x.axpy(y_i, v, Complex64::new(1.0, 0.0));
                hx.axpy(y_i, w, Complex64::new(1.0, 0.0));
            }
            let norm = x.norm();
            x /= Complex64::new(norm, 0.0);
            hx /= Complex64::new(norm, 0.0);
            hx.axpy(-value, &x, Complex64::new(1.0, 0.0));
            pairs.push(RitzPair { value, vector: x, residual: hx.norm() });
        };

        if hermitian {
            let t = faer::Mat::from_fn(m, m, |i, j| {
                0.5 * (self.proj[(i, j)] + self.proj[(j, i)].conj())
            });
            let eig = t.self_adjoint_eigen(faer::Side::Lower).map_err(|e| {
                Error::ConvergenceFailure(format!("projected eigensolve failed: {e:?}"))
            })?;
            let values: Vec<f64> = eig.S().column_vector().iter().map(|v| v.re).collect();
            for idx in 0..k.min(m) {
                let y: Vec<Complex64> = eig.U().col(idx).iter().copied().collect();
                emit(Complex64::new(values[idx], 0.0), &y);
            }
        } else {
            let t = faer::Mat::from_fn(m, m, |i, j| self.proj[(i, j)]);
            let eig = t.eigen().map_err(|e| {
                Error::ConvergenceFailure(format!("projected eigensolve failed: {e:?}"))
            })?;
            let values: Vec<Complex64> = eig.S().column_vector().iter().copied().collect();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                (values[a].re, values[a].im).partial_cmp(&(values[b].re, values[b].im)).unwrap()
            });
            for &idx in order.iter().take(k) {
                let y: Vec<Complex64> = eig.U().col(idx).iter().copied().collect();
                emit(values[idx], &y);
            }
        }
        Ok(pairs)
    }
}

fn shift_invert_subspace(
    matrix: &CsrMatrix<Complex64>,
    k: usize,
    opts: &KrylovOptions,
    hermitian: bool,
) -> Result<Vec<RitzPair>> {
    let n = matrix.nrows();
    let (lower, upper) = gershgorin_bounds(matrix);
    let spread = (upper - lower).max(1e-12);
    let shift = lower - 1e-3 * spread;

    let cg = CgSolver::new(matrix, shift);
    let gmres = GmresSolver::new(matrix, shift);
    let inner = |b: &DVector<Complex64>| -> Result<DVector<Complex64>> {
        if hermitian {
            cg.solve(b)
        } else {
            gmres.solve(b)
        }
    };

    let max_subspace = opts.max_subspace.min(n);
    let block = 16;
    let mut basis: Vec<DVector<Complex64>> = vec![seeded_unit_vector(n, opts.seed ^ n as u64)];
    let mut projection = Projection::new(max_subspace);
    let mut exhausted = false;

    loop {
        for _ in 0..block {
            if basis.len() >= max_subspace {
                exhausted = true;
                break;
            }
            let mut w = inner(basis.last().expect("basis is never empty"))?;
            orthogonalize(&mut w, &basis);
            let norm = w.norm();
            if norm < 1e-12 {
                // Invariant subspace reached.
                exhausted = true;
                break;
            }
            basis.push(w / Complex64::new(norm, 0.0));
        }

        projection.extend(matrix, &basis);
        if basis.len() >= k {
            let pairs = projection.ritz_pairs(&basis, k, hermitian)?;
            if pairs.len() == k && pairs.iter().all(|p| p.residual <= opts.residual_tol) {
                return Ok(pairs);
            }
            if exhausted {
                let achieved: Vec<String> =
                    pairs.iter().map(|p| format!("{:.3e}", p.residual)).collect();
                return Err(Error::ConvergenceFailure(format!(
                    "subspace exhausted at {} vectors; residuals [{}] vs tolerance {:.1e}",
                    basis.len(),
                    achieved.join(", "),
                    opts.residual_tol
                )));
            }
        } else if exhausted {
            return Err(Error::ConvergenceFailure(format!(
                "operator yielded an invariant subspace of dimension {} < k = {k}",
                basis.len()
            )));
        }
    }
}

/// The `k` lowest eigenpairs of a Hermitian sparse operator (plain l2
/// sense).
pub(crate) fn lanczos_lowest(
    matrix: &CsrMatrix<Complex64>,
    k: usize,
    opts: &KrylovOptions,
) -> Result<Vec<RitzPair>> {
    shift_invert_subspace(matrix, k, opts, true)
}

/// The `k` eigenpairs of smallest real part for a general (near-Hermitian)
/// sparse operator.
pub(crate) fn arnoldi_smallest_real(
    matrix: &CsrMatrix<Complex64>,
    k: usize,
    opts: &KrylovOptions,
) -> Result<Vec<RitzPair>> {
    shift_invert_subspace(matrix, k, opts, false)
}
