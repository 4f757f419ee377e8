use super::frame::SpectralFrame;
use crate::error::{Error, Result};
use crate::operator::{c, hermitian_deviation, hermitian_part, HermitianOperator, Matrix, I};

/// Largest generator coherence tolerated between degenerate levels.
pub const DEFAULT_LEAK_TOL: f64 = 1e-7;
const OMEGA_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// Zero diagonal (and zero degenerate blocks) in the eigenbasis of rho.
    ParallelTransport,
    /// Supplied directly; no gauge structure assumed.
    Unconstrained,
}

/// Hermitian generator of the eigenbasis motion,
/// `|psi_j(t + dt)> = (I - i Omega dt) |psi_j(t)>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaGenerator {
    pub matrix: HermitianOperator,
    pub gauge: Gauge,
    /// Whether some near-degenerate pair had its entry set to zero.
    pub degenerate_blocks_zeroed: bool,
}

impl OmegaGenerator {
    /// Wraps an arbitrary Hermitian operator.
    pub fn from_operator(op: HermitianOperator) -> Self {
        Self {
            matrix: op,
            gauge: Gauge::Unconstrained,
            degenerate_blocks_zeroed: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.matrix
    }
}

/// Reconstructs `Omega` from a frame and the exact generator output `rho_dot`.
///
/// In the eigenbasis of rho, `<psi_j|rho_dot|psi_k> = -i (lambda_k - lambda_j) Omega_jk`
/// for `j != k`, so off-diagonal entries between distinct levels are
/// `i <psi_j|rho_dot|psi_k> / (lambda_k - lambda_j)`. The diagonal and the
/// entries inside degenerate blocks are gauge and set to zero.
pub fn reconstruct_omega(
    frame: &SpectralFrame,
    rho_dot: &Matrix,
    deg_tol: f64,
    leak_tol: f64,
) -> Result<OmegaGenerator> {
    let n = frame.dim();
    crate::operator::check_dims(n, rho_dot.nrows())?;
    let in_basis = frame.to_eigenbasis(&hermitian_part(rho_dot));
    let mut omega = Matrix::zeros(n, n);
    let mut zeroed = false;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let gap = frame.eigenvalues[k] - frame.eigenvalues[j];
            let entry = in_basis[(j, k)];
            if gap.abs() < deg_tol || frame.in_same_block(j, k) {
                if entry.norm() > leak_tol {
                    return Err(Error::DegenerateCoherence {
                        t: frame.t,
                        j,
                        k,
                        gap,
                        leak: entry.norm(),
                    });
                }
                zeroed = true;
                continue;
            }
            omega[(j, k)] = I * entry / c(gap, 0.0);
        }
    }
    let computational = frame.from_eigenbasis(&omega);
    let deviation = hermitian_deviation(&computational);
    if deviation > OMEGA_HERMITIAN_TOL * (1.0 + crate::operator::max_abs(&computational)) {
        return Err(Error::NotHermitian {
            deviation,
            limit: OMEGA_HERMITIAN_TOL,
        });
    }
    Ok(OmegaGenerator {
        matrix: HermitianOperator::new(hermitian_part(&computational))?,
        gauge: Gauge::ParallelTransport,
        degenerate_blocks_zeroed: zeroed,
    })
}
