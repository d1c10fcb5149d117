//! Sparse operator on a periodic surface grid with the `sqrt(g)` measure.

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// A discretized operator together with the quadrature weights defining the
/// inner product `<u, v> = sum_i measure_i conj(u_i) v_i`.
///
/// Hermiticity always means Hermiticity with respect to that measure.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    matrix: CsrMatrix<Complex64>,
    measure: Vec<f64>,
    grid: GridSpec,
}

impl HamiltonianMatrix {
    pub(crate) fn from_coo(
        coo: CooMatrix<Complex64>,
        measure: Vec<f64>,
        grid: GridSpec,
    ) -> Self {
        debug_assert_eq!(coo.nrows(), measure.len());
        Self { matrix: CsrMatrix::from(&coo), measure, grid }
    }

    pub fn dim(&self) -> usize {
        self.measure.len()
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix<Complex64> {
        &self.matrix
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn max_nonzeros_per_row(&self) -> usize {
        self.matrix.row_iter().map(|r| r.nnz()).max().unwrap_or(0)
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        apply_csr(&self.matrix, v)
    }

    /// Sum of two operators on the same grid and measure.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        if self.measure != other.measure {
            return Err(Error::ShapeMismatch(
                "operators carry different quadrature measures".into(),
            ));
        }
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            measure: self.measure.clone(),
            grid: self.grid,
        })
    }

    pub fn measure_inner(&self, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
        u.iter()
            .zip(v.iter())
            .zip(&self.measure)
            .map(|((a, b), &m)| a.conj() * b * m)
            .sum()
    }

    pub fn measure_norm(&self, v: &DVector<Complex64>) -> f64 {
        self.measure_inner(v, v).re.sqrt()
    }

    /// The similarity transform `S H S^{-1}` with `S = diag(sqrt(measure))`:
    /// measure-Hermitian operators become Hermitian in the plain l2 sense,
    /// and the spectrum is unchanged.
    pub(crate) fn scaled_matrix(&self) -> CsrMatrix<Complex64> {
        let s: Vec<f64> = self.measure.iter().map(|m| m.sqrt()).collect();
        let mut coo = CooMatrix::new(self.dim(), self.dim());
        for (i, j, v) in self.matrix.triplet_iter() {
            coo.push(i, j, v * (s[i] / s[j]));
        }
        CsrMatrix::from(&coo)
    }

    /// Relative measure-Hermiticity deviation
    /// `||A - A^H||_F / ||A||_F` of the similarity-transformed operator.
    pub fn hermiticity_deviation(&self) -> f64 {
        let scaled = self.scaled_matrix();
        let diff = &scaled - &adjoint(&scaled);
        let norm = frobenius(&scaled);
        if norm == 0.0 {
            0.0
        } else {
            frobenius(&diff) / norm
        }
    }

    /// Absolute Frobenius norm of the anti-Hermitian part (in the
    /// similarity-transformed frame).
    pub fn antihermitian_norm(&self) -> f64 {
        let scaled = self.scaled_matrix();
        0.5 * frobenius(&(&scaled - &adjoint(&scaled)))
    }
}

pub(crate) fn apply_csr(m: &CsrMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = DVector::zeros(m.nrows());
    for (i, row) in m.row_iter().enumerate() {
        let mut acc = Complex64::ZERO;
        for (&j, val) in row.col_indices().iter().zip(row.values()) {
            acc += val * v[j];
        }
        out[i] = acc;
    }
    out
}

pub(crate) fn adjoint(m: &CsrMatrix<Complex64>) -> CsrMatrix<Complex64> {
    let mut t = m.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

pub(crate) fn frobenius(m: &CsrMatrix<Complex64>) -> f64 {
    m.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(grid: GridSpec, entries: &[(usize, usize, Complex64)], measure: Vec<f64>) -> HamiltonianMatrix {
        let n = measure.len();
        let mut coo = CooMatrix::new(n, n);
        for &(i, j, v) in entries {
            coo.push(i, j, v);
        }
        HamiltonianMatrix::from_coo(coo, measure, grid)
    }

    #[test]
    fn measure_hermitian_but_not_plain_symmetric() {
        // With measure (1, 4): H = [[0, 2], [x, 0]] is measure-Hermitian
        // iff m1 H12 = conj(H21) m2, i.e. x = 0.5.
        let grid = GridSpec { n1: 8, n2: 8 };
        let h = toy(
            grid,
            &[
                (0, 1, Complex64::new(2.0, 0.0)),
                (1, 0, Complex64::new(0.5, 0.0)),
            ],
            vec![1.0, 4.0],
        );
        assert!(h.hermiticity_deviation() < 1e-15);

        let h_bad = toy(
            grid,
            &[
                (0, 1, Complex64::new(2.0, 0.0)),
                (1, 0, Complex64::new(2.0, 0.0)),
            ],
            vec![1.0, 4.0],
        );
        assert!(h_bad.hermiticity_deviation() > 0.1);
    }

    #[test]
    fn add_rejects_mismatched_measures() {
        let grid = GridSpec { n1: 8, n2: 8 };
        let a = toy(grid, &[(0, 0, Complex64::ONE)], vec![1.0, 1.0]);
        let b = toy(grid, &[(0, 0, Complex64::ONE)], vec![1.0, 2.0]);
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch(_))));
        assert!(a.add(&a).is_ok());
    }

    #[test]
    fn apply_matches_dense_product() {
        let grid = GridSpec { n1: 8, n2: 8 };
        let h = toy(
            grid,
            &[
                (0, 0, Complex64::new(1.0, 0.0)),
                (0, 2, Complex64::new(0.0, 1.0)),
                (2, 1, Complex64::new(-1.0, 0.5)),
            ],
            vec![1.0; 3],
        );
        let v = DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -1.0),
        ]);
        let out = h.apply(&v);
        assert_eq!(out[0], Complex64::new(1.0, 0.0) + Complex64::new(0.0, 1.0) * v[2]);
        assert_eq!(out[1], Complex64::ZERO);
        assert_eq!(out[2], Complex64::new(-1.0, 0.5) * v[1]);
    }
}
