use crate::error::{Error, Result};
use crate::operator::{
    c, check_dims, hermitian_deviation, hermitian_part, max_abs_diff, trace, trace_product,
    HermitianOperator, Matrix, HERMITIAN_REJECT,
};
use crate::spectrum::{hermitian_eigendecompose, reconstruct, Spectrum};

pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Imaginary residue of `tr(rho A)` tolerated for Hermitian `A`.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-12;

/// A unit-trace, positive-semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

/// What [`DensityMatrix::project`] had to change.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Projection {
    /// `max |projected - raw|`.
    pub magnitude: f64,
    pub hermitian_deviation: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Validates a density matrix. Eigenvalues in `[-1e-10, 0)` are clamped to
    /// zero; anything more negative is an error.
    pub fn new(m: Matrix) -> Result<Self> {
        let op = HermitianOperator::with_limit(m, HERMITIAN_REJECT)?;
        let tr = trace(op.matrix()).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit {
                trace: tr,
                limit: TRACE_TOL,
            });
        }
        let spectrum = hermitian_eigendecompose(&op)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -EIGEN_FLOOR {
            return Err(Error::NegativeEigenvalue {
                value: min,
                limit: -EIGEN_FLOOR,
            });
        }
        if min < 0.0 {
            return Ok(Self::from_clamped_spectrum(spectrum));
        }
        Ok(Self { op })
    }

    fn from_clamped_spectrum(mut spectrum: Spectrum) -> Self {
        for v in spectrum.eigenvalues.iter_mut() {
            *v = v.max(0.0);
        }
        let total: f64 = spectrum.eigenvalues.iter().sum();
        for v in spectrum.eigenvalues.iter_mut() {
            *v /= total;
        }
        let m = hermitian_part(&reconstruct(&spectrum.eigenvalues, &spectrum.eigenvectors));
        Self {
            op: HermitianOperator::new(m).expect("reconstruction is Hermitian"),
        }
    }

    /// Pulls a nearly-valid matrix back onto the set of density matrices:
    /// symmetrize, clamp negative eigenvalues to zero, renormalize the trace.
    ///
    /// Fails if any pre-projection invariant is off by more than `limit`.
    pub fn project(raw: &Matrix, limit: f64) -> Result<(Self, Projection)> {
        let herm_dev = hermitian_deviation(raw);
        if herm_dev > limit {
            return Err(Error::NotHermitian {
                deviation: herm_dev,
                limit,
            });
        }
        let mut m = hermitian_part(raw);
        let tr = trace(&m).re;
        let trace_error = (tr - 1.0).abs();
        if trace_error > limit {
            return Err(Error::TraceNotUnit { trace: tr, limit });
        }
        m *= c(1.0 / tr, 0.0);
        let op = HermitianOperator::new(m)?;
        let spectrum = hermitian_eigendecompose(&op)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -limit {
            return Err(Error::NegativeEigenvalue {
                value: min,
                limit: -limit,
            });
        }
        let rho = if min < 0.0 {
            Self::from_clamped_spectrum(spectrum)
        } else {
            Self { op }
        };
        let projection = Projection {
            magnitude: max_abs_diff(rho.matrix(), raw),
            hermitian_deviation: herm_dev,
            trace_error,
            min_eigenvalue: min,
        };
        Ok((rho, projection))
    }

    /// `1/N` times the identity.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(Matrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0))
    }

    /// `|k><k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        let mut m = Matrix::zeros(dim, dim);
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k + 1,
            });
        }
        m[(k, k)] = c(1.0, 0.0);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn purity(&self) -> f64 {
        trace_product(self.matrix(), self.matrix()).re
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eigendecompose(&self.op)
    }
}

/// `tr(rho A)`.
pub fn expectation(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let z = trace_product(rho.matrix(), a.matrix());
    debug_assert!(
        z.im.abs() <= EXPECTATION_IMAG_TOL * (1.0 + z.re.abs()),
        "imaginary residue {} in expectation",
        z.im
    );
    Ok(z.re)
}

/// `tr(rho A^2) - tr(rho A)^2`, clamped at zero.
pub fn variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let mean = expectation(rho, a)?;
    let a2 = a.matrix() * a.matrix();
    let second = trace_product(rho.matrix(), &a2).re;
    Ok((second - mean * mean).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;

    fn bloch_rho(b: [f64; 3]) -> DensityMatrix {
        DensityMatrix::new((pauli::identity() + pauli::dot(b)) * c(0.5, 0.0)).unwrap()
    }

    #[test]
    fn validates_trace_and_positivity() {
        assert!(matches!(
            DensityMatrix::new(Matrix::identity(2, 2)),
            Err(Error::TraceNotUnit { .. })
        ));
        let m = HermitianOperator::diagonal(&[1.2, -0.2]).unwrap();
        assert!(matches!(
            DensityMatrix::new(m.matrix().clone()),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn clamps_tiny_negative_eigenvalues() {
        let m = HermitianOperator::diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
        let rho = DensityMatrix::new(m.matrix().clone()).unwrap();
        let s = rho.spectrum().unwrap();
        assert!(s.eigenvalues[1] >= 0.0);
        assert!((trace(rho.matrix()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_reports_magnitude() {
        let mut m = bloch_rho([0.0, 0.0, 1.0]).matrix().clone();
        m[(1, 1)] = c(-1e-12, 0.0);
        m[(0, 0)] = c(1.0 + 1e-12, 0.0);
        let (rho, p) = DensityMatrix::project(&m, 1e-8).unwrap();
        assert!(p.magnitude > 0.0 && p.magnitude < 1e-11);
        assert!(rho.spectrum().unwrap().eigenvalues[1] >= 0.0);
        m[(1, 1)] = c(-1e-6, 0.0);
        m[(0, 0)] = c(1.0 + 1e-6, 0.0);
        assert!(DensityMatrix::project(&m, 1e-8).is_err());
    }

    #[test]
    fn expectation_examples() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let z = HermitianOperator::new(pauli::z()).unwrap();
        assert_eq!(expectation(&mixed, &z).unwrap(), 0.0);

        // <-v . sigma> = -B . v
        let b = [0.3, -0.4, 0.5];
        let v = [1.5, 0.2, -0.7];
        let h = pauli::field_operator(v);
        let expected = -(b[0] * v[0] + b[1] * v[1] + b[2] * v[2]);
        assert!((expectation(&bloch_rho(b), &h).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn variance_examples() {
        let z = HermitianOperator::new(pauli::z()).unwrap();
        let x = HermitianOperator::new(pauli::x()).unwrap();
        let ground = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(variance(&ground, &z).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((variance(&mixed, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!((variance(&bloch_rho([0.0, 0.0, 0.6]), &x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let z = HermitianOperator::new(pauli::z()).unwrap();
        assert!(expectation(&rho, &z).is_err());
        assert!(variance(&rho, &z).is_err());
    }
}
