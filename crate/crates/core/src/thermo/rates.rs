use super::frame::SpectralFrame;
use super::omega::OmegaGenerator;
use crate::error::{Error, Result};
use crate::operator::{check_dims, trace_product, HermitianOperator, Matrix, C64, I};
use crate::state::{variance, DensityMatrix};

/// Eigenvalues below this are treated as pinned at zero in the entropy rate.
pub const LAMBDA_FLOOR: f64 = 1e-14;
/// Slack on the Robertson inequality.
pub const ROBERTSON_SLACK: f64 = 1e-9;

/// The three contributions to `d<O>/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhrenfestDecomposition {
    /// `sum_j lambda_dot_j <psi_j|O|psi_j>`
    pub thermal: f64,
    /// `<dO/dt>`
    pub drive: f64,
    /// `i <[Omega, O]>`
    pub coherence: f64,
    pub total: f64,
    /// Centered finite difference of `<O>(t)`, when computed.
    pub fd_reference: Option<f64>,
    /// `|total - fd_reference|`.
    pub residual: Option<f64>,
}

impl EhrenfestDecomposition {
    pub fn with_reference(mut self, fd: f64) -> Self {
        self.fd_reference = Some(fd);
        self.residual = Some((self.total - fd).abs());
        self
    }
}

/// `i tr(rho [A, B])` as a complex number; real for Hermitian inputs.
pub(crate) fn i_commutator_expectation(rho: &Matrix, a: &Matrix, b: &Matrix) -> C64 {
    let k = a * b - b * a;
    I * trace_product(rho, &k)
}

/// Evaluates the generalized Ehrenfest decomposition of `d<O>/dt`.
/// Pass `None` for `do_dt` when `O` has no explicit time dependence.
pub fn ehrenfest_rate(
    frame: &SpectralFrame,
    omega: &OmegaGenerator,
    o: &HermitianOperator,
    do_dt: Option<&HermitianOperator>,
    rho: &DensityMatrix,
) -> Result<EhrenfestDecomposition> {
    let n = frame.dim();
    check_dims(n, omega.dim())?;
    check_dims(n, o.dim())?;
    check_dims(n, rho.dim())?;
    let populations = frame.diagonal_of(o.matrix());
    let thermal: f64 = frame
        .lambda_dot
        .iter()
        .zip(&populations)
        .map(|(l, p)| l * p)
        .sum();
    let drive = match do_dt {
        Some(d) => {
            check_dims(n, d.dim())?;
            trace_product(rho.matrix(), d.matrix()).re
        }
        None => 0.0,
    };
    let z = i_commutator_expectation(rho.matrix(), omega.matrix.matrix(), o.matrix());
    debug_assert!(z.im.abs() < 1e-10 * (1.0 + z.re.abs()), "coherence term not real: {z}");
    let coherence = z.re;
    Ok(EhrenfestDecomposition {
        thermal,
        drive,
        coherence,
        total: thermal + drive + coherence,
        fd_reference: None,
        residual: None,
    })
}

/// `dH/dt + i[Omega, H]`, whose expectation is the work rate.
pub fn power_operator(
    omega: &OmegaGenerator,
    h: &HermitianOperator,
    dh_dt: &HermitianOperator,
) -> Result<HermitianOperator> {
    check_dims(h.dim(), omega.dim())?;
    check_dims(h.dim(), dh_dt.dim())?;
    let (w, hm) = (omega.matrix.matrix(), h.matrix());
    let k = (w * hm - hm * w) * I;
    HermitianOperator::new(dh_dt.matrix() + k)
}

/// `sum_j lambda_dot_j <psi_j|H|psi_j>`.
pub fn heat_rate(frame: &SpectralFrame, h: &HermitianOperator) -> Result<f64> {
    check_dims(frame.dim(), h.dim())?;
    Ok(frame
        .lambda_dot
        .iter()
        .zip(frame.diagonal_of(h.matrix()))
        .map(|(l, e)| l * e)
        .sum())
}

/// Von Neumann entropy (units of `k_B`) and its rate of change.
///
/// An eigenvalue below [`LAMBDA_FLOOR`] contributes `-lambda_dot ln(floor)`
/// while it grows and nothing otherwise; a zero eigenvalue that is still
/// decreasing is an error.
pub fn entropy_and_rate(frame: &SpectralFrame) -> Result<(f64, f64)> {
    let mut s = 0.0;
    let mut s_dot = 0.0;
    for (index, (&lambda, &rate)) in frame.eigenvalues.iter().zip(&frame.lambda_dot).enumerate() {
        if lambda > 0.0 {
            s -= lambda * lambda.ln();
        }
        if lambda >= LAMBDA_FLOOR {
            s_dot -= rate * lambda.ln();
        } else if rate > 0.0 {
            s_dot -= rate * LAMBDA_FLOOR.ln();
        } else if lambda <= 0.0 && rate < -1e-12 {
            return Err(Error::SimplexExit {
                index,
                lambda,
                rate,
            });
        }
    }
    Ok((s, s_dot))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobertsonCheck {
    /// `|<[Omega, O]>|`
    pub lhs: f64,
    /// `2 sigma_Omega sigma_O`
    pub rhs: f64,
    pub ok: bool,
}

/// Checks `|<[Omega, O]>| <= 2 sigma_Omega sigma_O`.
pub fn robertson_check(
    rho: &DensityMatrix,
    omega: &OmegaGenerator,
    o: &HermitianOperator,
) -> Result<RobertsonCheck> {
    check_dims(rho.dim(), omega.dim())?;
    check_dims(rho.dim(), o.dim())?;
    let lhs = i_commutator_expectation(rho.matrix(), omega.matrix.matrix(), o.matrix()).norm();
    let rhs = 2.0 * (variance(rho, &omega.matrix)? * variance(rho, o)?).sqrt();
    Ok(RobertsonCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + ROBERTSON_SLACK,
    })
}

/// `tr(rho[Omega, O])`, `tr(O[rho, Omega])` and `tr(Omega[O, rho])`, which
/// agree by cyclicity of the trace.
pub fn cyclic_coherence_forms(
    rho: &DensityMatrix,
    omega: &OmegaGenerator,
    o: &HermitianOperator,
) -> Result<[C64; 3]> {
    check_dims(rho.dim(), omega.dim())?;
    check_dims(rho.dim(), o.dim())?;
    let (r, w, ob) = (rho.matrix(), omega.matrix.matrix(), o.matrix());
    let comm = |a: &Matrix, b: &Matrix| a * b - b * a;
    Ok([
        trace_product(r, &comm(w, ob)),
        trace_product(ob, &comm(r, w)),
        trace_product(w, &comm(ob, r)),
    ])
}

/// Whether `A` and `B` commute to within `tol` (max-abs norm).
pub fn commutes(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    crate::operator::max_abs(&(a * b - b * a)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c, pauli};
    use crate::thermo::omega::reconstruct_omega;

    fn bloch_rho(b: [f64; 3]) -> DensityMatrix {
        DensityMatrix::new((pauli::identity() + pauli::dot(b)) * c(0.5, 0.0)).unwrap()
    }

    fn frame_for(rho: &DensityMatrix, rho_dot: &Matrix) -> SpectralFrame {
        SpectralFrame::new(0.0, rho, rho_dot, None, 1e-8).unwrap()
    }

    #[test]
    fn identity_observable_has_no_rate() {
        let rho = bloch_rho([0.3, 0.2, 0.5]);
        let rho_dot = pauli::dot([0.1, -0.2, 0.05]) * c(0.5, 0.0);
        let frame = frame_for(&rho, &rho_dot);
        let omega = reconstruct_omega(&frame, &rho_dot, 1e-8, 1e-7).unwrap();
        let id = HermitianOperator::identity(2).unwrap();
        let d = ehrenfest_rate(&frame, &omega, &id, None, &rho).unwrap();
        assert!(d.thermal.abs() < 1e-15 && d.coherence.abs() < 1e-15 && d.drive == 0.0);
    }

    #[test]
    fn power_operator_vanishes_for_commuting_static_pair() {
        let h = HermitianOperator::diagonal(&[1.0, -1.0]).unwrap();
        let omega = OmegaGenerator::from_operator(HermitianOperator::diagonal(&[0.3, 0.7]).unwrap());
        let p = power_operator(&omega, &h, &HermitianOperator::zeros(2).unwrap()).unwrap();
        assert_eq!(crate::operator::max_abs(p.matrix()), 0.0);
    }

    #[test]
    fn qubit_power_operator_is_twice_cross_product() {
        // Omega = -w.s, H = -v.s  =>  [Omega, H] = 2i (w x v).s, so
        // P = i[Omega, H] = -2 (w x v).s and <P> = 2 w.(B x v).
        let w = [0.3, -0.7, 0.2];
        let v = [0.0, 0.4, 1.1];
        let b = [0.5, 0.1, -0.6];
        let omega = OmegaGenerator::from_operator(pauli::field_operator(w));
        let h = pauli::field_operator(v);
        let p = power_operator(&omega, &h, &HermitianOperator::zeros(2).unwrap()).unwrap();
        let wxv = [
            w[1] * v[2] - w[2] * v[1],
            w[2] * v[0] - w[0] * v[2],
            w[0] * v[1] - w[1] * v[0],
        ];
        let expected = pauli::dot(wxv) * c(-2.0, 0.0);
        assert!(crate::operator::max_abs_diff(p.matrix(), &expected) < 1e-15);
        let bxv = [
            b[1] * v[2] - b[2] * v[1],
            b[2] * v[0] - b[0] * v[2],
            b[0] * v[1] - b[1] * v[0],
        ];
        let mean = crate::state::expectation(&bloch_rho(b), &p).unwrap();
        let triple = 2.0 * (w[0] * bxv[0] + w[1] * bxv[1] + w[2] * bxv[2]);
        assert!((mean - triple).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let zero = Matrix::zeros(2, 2);
        let pure = bloch_rho([0.0, 0.0, 1.0]);
        let (s, _) = entropy_and_rate(&frame_for(&pure, &zero)).unwrap();
        assert_eq!(s, 0.0);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let (s, _) = entropy_and_rate(&frame_for(&mixed, &zero)).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-15);
        let half = bloch_rho([0.0, 0.0, 0.5]);
        let (s, _) = entropy_and_rate(&frame_for(&half, &zero)).unwrap();
        let expected = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((s - expected).abs() < 1e-15);
    }

    #[test]
    fn entropy_rate_floor_rules() {
        let mut frame = frame_for(&bloch_rho([0.0, 0.0, 1.0]), &Matrix::zeros(2, 2));
        let zero_idx = frame.eigenvalues.iter().position(|&l| l < 0.5).unwrap();
        frame.lambda_dot[zero_idx] = 1e-3;
        frame.lambda_dot[1 - zero_idx] = -1e-3;
        let (_, s_dot) = entropy_and_rate(&frame).unwrap();
        assert!((s_dot - (-1e-3 * LAMBDA_FLOOR.ln())).abs() < 1e-15);
        frame.lambda_dot[zero_idx] = -1e-3;
        frame.lambda_dot[1 - zero_idx] = 1e-3;
        assert!(matches!(entropy_and_rate(&frame), Err(Error::SimplexExit { .. })));
    }

    #[test]
    fn robertson_rectangular_box_saturates() {
        // B = x, o = y, w = z
        let rho = bloch_rho([1.0, 0.0, 0.0]);
        let omega = OmegaGenerator::from_operator(pauli::field_operator([0.0, 0.0, 1.0]));
        let o = pauli::field_operator([0.0, 1.0, 0.0]);
        let r = robertson_check(&rho, &omega, &o).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12);
        assert!((r.rhs - 2.0).abs() < 1e-12);
        assert!(r.ok);
    }

    #[test]
    fn robertson_commuting_pair() {
        let rho = bloch_rho([0.3, 0.3, 0.3]);
        let omega = OmegaGenerator::from_operator(pauli::field_operator([0.0, 0.0, 1.0]));
        let o = pauli::field_operator([0.0, 0.0, -2.0]);
        let r = robertson_check(&rho, &omega, &o).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.ok);
    }
}
