use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::operator::{c, max_abs_diff, HermitianOperator, Matrix, C64};

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues (descending) with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `sum_j lambda_j |v_j><v_j|`.
    pub fn reconstruct(&self) -> Matrix {
        reconstruct(&self.eigenvalues, &self.eigenvectors)
    }

    /// `max |V†V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(
            &(self.eigenvectors.adjoint() * &self.eigenvectors),
            &Matrix::identity(n, n),
        )
    }
}

pub(crate) fn reconstruct(values: &[f64], vectors: &Matrix) -> Matrix {
    let n = values.len();
    let scaled = Matrix::from_fn(n, n, |i, j| vectors[(i, j)] * values[j]);
    scaled * vectors.adjoint()
}

/// Rotates each column so that its largest-modulus entry is real and positive.
pub(crate) fn fix_phase_by_largest_entry(vectors: &mut Matrix) {
    for j in 0..vectors.ncols() {
        let mut best = 0;
        let mut best_norm = -1.0;
        for i in 0..vectors.nrows() {
            let m = vectors[(i, j)].norm();
            if m > best_norm + 1e-12 {
                best = i;
                best_norm = m;
            }
        }
        if best_norm > 0.0 {
            let phase = vectors[(best, j)].conj() / best_norm;
            for i in 0..vectors.nrows() {
                vectors[(i, j)] *= phase;
            }
        }
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Eigenvalues come back sorted in descending order, and each eigenvector is
/// phase-fixed so its largest entry is real and positive, which makes the
/// output a pure function of the input.
pub fn hermitian_eigendecompose(a: &HermitianOperator) -> Result<Spectrum> {
    let m = a.matrix();
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(m[(i, j)].norm());
                }
            }
        }
        Error::EigenFailure {
            dim: n,
            frobenius_norm: m.norm(),
            max_off_diagonal: off,
        }
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    fix_phase_by_largest_entry(&mut eigenvectors);
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `<v|A|v>` for a column of `vectors`.
pub(crate) fn diagonal_element(vectors: &Matrix, j: usize, a: &Matrix) -> C64 {
    let v = vectors.column(j);
    let av = a * v;
    v.iter()
        .zip(av.iter())
        .fold(c(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;

    #[test]
    fn maximally_mixed_qubit() {
        let a = HermitianOperator::diagonal(&[0.5, 0.5]).unwrap();
        let s = hermitian_eigendecompose(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![0.5, 0.5]);
        assert!(s.orthonormality_error() < 1e-12);
    }

    #[test]
    fn already_diagonal() {
        let a = HermitianOperator::diagonal(&[0.1, 0.9]).unwrap();
        let s = hermitian_eigendecompose(&a).unwrap();
        assert!((s.eigenvalues[0] - 0.9).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.1).abs() < 1e-15);
        // 0.9 belongs to e2
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_polarized_state_matches_hand_solution() {
        // rho = (I + 0.8 sigma_x)/2; characteristic polynomial
        // (1/2 - l)^2 - 0.16 = 0  =>  l = 0.9, 0.1 with vectors (1, +-1)/sqrt2.
        let m = (pauli::identity() + pauli::x() * c(0.8, 0.0)) * c(0.5, 0.0);
        let s = hermitian_eigendecompose(&HermitianOperator::new(m.clone()).unwrap()).unwrap();
        assert!((s.eigenvalues[0] - 0.9).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 0.1).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = s.eigenvectors.column(0);
        assert!((v0[0] - c(r, 0.0)).norm() < 1e-14);
        assert!((v0[1] - c(r, 0.0)).norm() < 1e-14);
        let v1 = s.eigenvectors.column(1);
        assert!((v1[0] + v1[1]).norm() < 1e-14);
        assert!(max_abs_diff(&s.reconstruct(), &m) < 1e-14);
    }

    #[test]
    fn deterministic() {
        let m = Matrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.3, 0.1),
                c(0.0, -0.5),
                c(0.3, -0.1),
                c(1.0, 0.0),
                c(0.2, 0.0),
                c(0.0, 0.5),
                c(0.2, 0.0),
                c(-1.0, 0.0),
            ],
        );
        let a = HermitianOperator::new(m).unwrap();
        let s1 = hermitian_eigendecompose(&a).unwrap();
        let s2 = hermitian_eigendecompose(&a).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(max_abs_diff(&s1.reconstruct(), a.matrix()) < 1e-12);
    }
}
