//! Dense complex operators.
//!
//! Everything in this crate works on small dense matrices (dimension 2 up to a
//! few dozen). [`ComplexMatrix`] is the general carrier; [`HermitianOperator`]
//! adds the self-adjointness invariant used for Hamiltonians, observables and
//! the eigenbasis generator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Hermiticity tolerance for a value to count as already Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Deviations above this are rejected instead of symmetrized away.
pub const HERMITIAN_REJECT: f64 = 1e-8;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |A - A†| / 2`, the distance to the Hermitian part of `A`.
pub fn hermitian_deviation(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm() * 0.5);
        }
    }
    dev
}

/// `(A + A†) / 2`.
pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &Matrix, b: &Matrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// A square, finite complex matrix of dimension at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(Matrix);

impl ComplexMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(Error::InvalidDimension(m.nrows()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds an `dim x dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(Matrix::from_row_slice(dim, dim, entries))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(Matrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn trace(&self) -> C64 {
        trace(&self.0)
    }
}

/// A self-adjoint operator.
///
/// Construction symmetrizes the input and keeps the size of the correction
/// in [`HermitianOperator::deviation`]. Inputs further than
/// [`HERMITIAN_REJECT`] from Hermitian are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: Matrix,
    deviation: f64,
}

impl HermitianOperator {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::with_limit(m, HERMITIAN_REJECT)
    }

    pub(crate) fn with_limit(m: Matrix, limit: f64) -> Result<Self> {
        let m = ComplexMatrix::new(m)?.0;
        let deviation = hermitian_deviation(&m);
        if deviation > limit {
            return Err(Error::NotHermitian { deviation, limit });
        }
        Ok(Self {
            matrix: hermitian_part(&m),
            deviation,
        })
    }

    pub fn from_complex(m: &ComplexMatrix) -> Result<Self> {
        Self::new(m.0.clone())
    }

    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_row_major(dim, entries)?.0)
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(Matrix::from_fn(n, n, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(Matrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(Matrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Deviation from Hermiticity removed at construction.
    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix(self.matrix.clone())
    }

    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix * c(factor, 0.0),
            deviation: self.deviation * factor.abs(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_dims(self.dim(), other.dim())?;
        Ok(HermitianOperator {
            matrix: &self.matrix + &other.matrix,
            deviation: self.deviation + other.deviation,
        })
    }

    /// `U A U†`.
    pub fn conjugated_by(&self, u: &Matrix) -> Result<HermitianOperator> {
        check_dims(self.dim(), u.nrows())?;
        HermitianOperator::new(u * &self.matrix * u.adjoint())
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `AB - BA`. Anti-Hermitian for Hermitian inputs.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<ComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    let (a, b) = (a.matrix(), b.matrix());
    ComplexMatrix::new(a * b - b * a)
}

/// `i[A, B]`, which is Hermitian for Hermitian `A`, `B`.
pub fn i_commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let k = commutator(a, b)?;
    HermitianOperator::new(k.into_matrix() * I)
}

/// Pauli matrices and qubit ladder operators.
pub mod pauli {
    use super::*;

    pub fn identity() -> Matrix {
        Matrix::identity(2, 2)
    }

    pub fn x() -> Matrix {
        Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> Matrix {
        Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> Matrix {
        Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn all() -> [Matrix; 3] {
        [x(), y(), z()]
    }

    /// `|0><1|`: lowers the energy of `H = -eps sigma_z` for `eps > 0`,
    /// where `|0>` (sigma_z = +1) is the ground state.
    pub fn lowering() -> Matrix {
        Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
    }

    /// `|1><0|`.
    pub fn raising() -> Matrix {
        lowering().adjoint()
    }

    /// `a . sigma` for a real 3-vector.
    pub fn dot(a: [f64; 3]) -> Matrix {
        x() * c(a[0], 0.0) + y() * c(a[1], 0.0) + z() * c(a[2], 0.0)
    }

    /// The Hermitian operator `-a . sigma`, the qubit form of fields and generators.
    pub fn field_operator(a: [f64; 3]) -> HermitianOperator {
        HermitianOperator::new(-dot(a)).expect("Pauli combination is Hermitian")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_and_small() {
        assert!(matches!(
            ComplexMatrix::new(Matrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            ComplexMatrix::new(Matrix::zeros(1, 1)),
            Err(Error::InvalidDimension(1))
        );
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::new(m), Err(Error::NonFinite));
    }

    #[test]
    fn symmetrizes_small_deviation_and_records_it() {
        let mut m = pauli::x();
        m[(0, 1)] += c(2e-10, 0.0);
        let h = HermitianOperator::new(m).unwrap();
        assert!((h.deviation() - 1e-10).abs() < 1e-15);
        assert!(hermitian_deviation(h.matrix()) == 0.0);
    }

    #[test]
    fn rejects_large_deviation() {
        let mut m = pauli::x();
        m[(0, 1)] += c(1e-6, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn commutator_of_equal_paulis_vanishes() {
        let x = HermitianOperator::new(pauli::x()).unwrap();
        assert_eq!(commutator(&x, &x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_xy_is_two_i_z() {
        let x = HermitianOperator::new(pauli::x()).unwrap();
        let y = HermitianOperator::new(pauli::y()).unwrap();
        let k = commutator(&x, &y).unwrap();
        let expected = pauli::z() * c(0.0, 2.0);
        assert!(max_abs_diff(k.matrix(), &expected) < 1e-15);
        // anti-Hermitian
        assert!(max_abs_diff(k.matrix(), &(-k.matrix().adjoint())) < 1e-12);
    }

    #[test]
    fn commuting_diagonals() {
        let a = HermitianOperator::diagonal(&[1.0, -2.0, 0.5]).unwrap();
        let b = HermitianOperator::diagonal(&[0.3, 7.0, -1.0]).unwrap();
        assert_eq!(commutator(&a, &b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HermitianOperator::identity(2).unwrap();
        let b = HermitianOperator::identity(3).unwrap();
        assert_eq!(
            commutator(&a, &b),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }
}
