//! Qubit specialization in the Bloch picture.
//!
//! A qubit state is `rho = (I + B.sigma)/2`; Hamiltonians, observables and the
//! eigenbasis generator are written as `-v.sigma`, `-o.sigma` and `-w.sigma`
//! (up to multiples of the identity). In this picture the coherence term is a
//! triple product, the work rate is a torque times an angular velocity
//! `-2w`, and the heat rate only depends on how `|B|` changes.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::operator::{c, pauli, trace_product, HermitianOperator};
use crate::state::DensityMatrix;

pub type Vec3 = Vector3<f64>;

pub const BLOCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState(Vec3);

impl BlochState {
    pub fn new(b: Vec3) -> Result<Self> {
        let norm = b.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_TOL {
            return Err(Error::OutsideBlochBall { norm });
        }
        Ok(Self(b))
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// A field `v` standing for the operator `-v.sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector(pub Vec3);

impl FieldVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vec3::new(x, y, z))
    }

    /// Field of a qubit operator, dropping its identity part:
    /// `v_k = -tr(A sigma_k) / 2`.
    pub fn of_operator(a: &HermitianOperator) -> Result<Self> {
        crate::operator::check_dims(2, a.dim())?;
        let [x, y, z] = pauli::all().map(|p| -0.5 * trace_product(a.matrix(), &p).re);
        Ok(Self::new(x, y, z))
    }

    /// `-v.sigma`.
    pub fn to_operator(&self) -> HermitianOperator {
        pauli::field_operator([self.0.x, self.0.y, self.0.z])
    }
}

/// `B_k = tr(rho sigma_k)`.
pub fn to_bloch(rho: &DensityMatrix) -> Result<BlochState> {
    crate::operator::check_dims(2, rho.dim())?;
    let [x, y, z] = pauli::all().map(|p| trace_product(rho.matrix(), &p).re);
    BlochState::new(Vec3::new(x, y, z))
}

/// `(I + B.sigma)/2`.
pub fn from_bloch(b: &BlochState) -> Result<DensityMatrix> {
    let v = b.vector();
    DensityMatrix::new((pauli::identity() + pauli::dot([v.x, v.y, v.z])) * c(0.5, 0.0))
}

/// `i<[Omega, O]> = 2 B.(o x w)`.
pub fn coherence_rate_triple(b: &BlochState, o: &FieldVector, w: &FieldVector) -> f64 {
    2.0 * b.vector().dot(&o.0.cross(&w.0))
}

/// `tau = B x v`.
pub fn torque(b: &BlochState, v: &FieldVector) -> Vec3 {
    b.vector().cross(&v.0)
}

/// Angular velocity of the Bloch vector for the generator `-w.sigma`: `-2w`.
pub fn angular_velocity(w: &FieldVector) -> Vec3 {
    -2.0 * w.0
}

/// `W_dot = -Omega . tau`.
pub fn qubit_power(b: &BlochState, v: &FieldVector, omega_vec: &Vec3) -> f64 {
    -omega_vec.dot(&torque(b, v))
}

/// `Q_dot = -(d|B|/dt)(B_hat . v)` with `d|B|/dt = B.B_dot / |B|`.
pub fn qubit_heat_rate(b: &BlochState, b_dot: &Vec3, v: &FieldVector) -> Result<f64> {
    let norm = b.norm();
    if norm == 0.0 {
        return Err(Error::ZeroBlochVector);
    }
    let unit = b.vector() / norm;
    let modulus_rate = unit.dot(b_dot);
    Ok(-modulus_rate * unit.dot(&v.0))
}

/// Angular velocity of `B_hat` perpendicular to `B`: `B_hat x dB_hat/dt`.
pub fn unit_vector_angular_velocity(b: &BlochState, b_dot: &Vec3) -> Result<Vec3> {
    let norm = b.norm();
    if norm == 0.0 {
        return Err(Error::ZeroBlochVector);
    }
    let unit = b.vector() / norm;
    let unit_dot = (b_dot - unit * unit.dot(b_dot)) / norm;
    Ok(unit.cross(&unit_dot))
}

/// Closed-form pure-dephasing trajectory for `H = -eps sigma_z` starting at
/// `(b_x, 0, b_z)`:
///
/// ```text
/// B(t) = (b_x cos(Lt) e^{-Gt}, b_x sin(Lt) e^{-Gt}, b_z)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingTrajectory {
    pub b_x: f64,
    pub b_z: f64,
    pub eps: f64,
    pub gamma: f64,
    /// Precession rate `L`.
    pub lambda: f64,
}

impl DephasingTrajectory {
    pub fn new(b_x: f64, b_z: f64, eps: f64, gamma: f64, lambda: f64) -> Result<Self> {
        BlochState::new(Vec3::new(b_x, 0.0, b_z))?;
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParam {
                param: "gamma".into(),
                reason: format!("must be non-negative, got {gamma}"),
            });
        }
        Ok(Self {
            b_x,
            b_z,
            eps,
            gamma,
            lambda,
        })
    }

    /// Uses the precession of `rho_dot = -i[H, rho]`, `L = -2 eps`.
    pub fn with_natural_precession(b_x: f64, b_z: f64, eps: f64, gamma: f64) -> Result<Self> {
        Self::new(b_x, b_z, eps, gamma, -2.0 * eps)
    }

    pub fn state(&self, t: f64) -> BlochState {
        let envelope = self.b_x * (-self.gamma * t).exp();
        let phase = self.lambda * t;
        BlochState(Vec3::new(envelope * phase.cos(), envelope * phase.sin(), self.b_z))
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let envelope = self.b_x * (-self.gamma * t).exp();
        let (s, co) = (self.lambda * t).sin_cos();
        Vec3::new(
            envelope * (-self.lambda * s - self.gamma * co),
            envelope * (self.lambda * co - self.gamma * s),
            0.0,
        )
    }

    pub fn field(&self) -> FieldVector {
        FieldVector::new(0.0, 0.0, self.eps)
    }

    /// `E = -B.v = -eps b_z`.
    pub fn energy(&self, t: f64) -> f64 {
        -self.state(t).vector().dot(&self.field().0)
    }

    pub fn heat_rate(&self, t: f64) -> Result<f64> {
        qubit_heat_rate(&self.state(t), &self.velocity(t), &self.field())
    }

    pub fn angular_velocity(&self, t: f64) -> Result<Vec3> {
        unit_vector_angular_velocity(&self.state(t), &self.velocity(t))
    }

    /// Total heat absorbed from `t = 0` to infinity.
    pub fn total_heat(&self) -> Result<f64> {
        dephasing_heat_closed_form((self.b_x.powi(2) + self.b_z.powi(2)).sqrt(), self.b_z, self.eps)
    }
}

/// `B(t)` of the closed-form dephasing trajectory.
pub fn dephasing_trajectory(b0: (f64, f64), eps: f64, gamma: f64, lambda: f64, t: f64) -> Result<BlochState> {
    Ok(DephasingTrajectory::new(b0.0, b0.1, eps, gamma, lambda)?.state(t))
}

/// Bloch equations for `H = -eps sigma_z` with longitudinal relaxation at
/// `gamma1` towards `bz_inf` and transverse decay at `gamma2`. The transverse
/// part precesses as `(x + iy)(t) = (x + iy)(0) e^{-2i eps t - gamma2 t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitRelaxation {
    pub eps: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub bz_inf: f64,
}

impl QubitRelaxation {
    pub fn state(&self, b0: &Vec3, t: f64) -> Vec3 {
        let decay = (-self.gamma2 * t).exp();
        let (s, co) = (-2.0 * self.eps * t).sin_cos();
        Vec3::new(
            decay * (b0.x * co - b0.y * s),
            decay * (b0.x * s + b0.y * co),
            self.bz_inf + (b0.z - self.bz_inf) * (-self.gamma1 * t).exp(),
        )
    }
}

/// Heat absorbed up to time `t` under pure dephasing, `-eps b_z ln(|B(t)| / |B0|)`.
pub fn dephasing_heat_at(b0: &Vec3, eps: f64, gamma: f64, t: f64) -> Result<f64> {
    let norm0 = b0.norm();
    if norm0 == 0.0 {
        return Err(Error::ZeroBlochVector);
    }
    let perp2 = b0.x * b0.x + b0.y * b0.y;
    let norm_t = (perp2 * (-2.0 * gamma * t).exp() + b0.z * b0.z).sqrt();
    Ok(-eps * b0.z * (norm_t / norm0).ln())
}

/// Heat absorbed over a complete dephasing run, `-eps b_z ln(|b_z| / |B0|)`.
/// For a pure initial state this is `-eps b_z ln|b_z|`. Returns the limit 0
/// at `b_z = 0`.
pub fn dephasing_heat_closed_form(b0_modulus: f64, b_z: f64, eps: f64) -> Result<f64> {
    if !(b0_modulus <= 1.0 + BLOCH_TOL) || !(b_z.abs() <= b0_modulus + BLOCH_TOL) {
        return Err(Error::InvalidParam {
            param: "b0_modulus".into(),
            reason: format!("need |b_z| <= |B0| <= 1, got b_z = {b_z}, |B0| = {b0_modulus}"),
        });
    }
    if b_z == 0.0 {
        return Ok(0.0);
    }
    Ok(-eps * b_z * (b_z.abs() / b0_modulus).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    fn b(x: f64, y: f64, z: f64) -> BlochState {
        BlochState::new(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn bloch_round_trips() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(to_bloch(&mixed).unwrap().vector(), Vec3::zeros());
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(to_bloch(&up).unwrap().vector(), Vec3::new(0.0, 0.0, 1.0));
        let x = b(0.8, 0.0, 0.0);
        let rho = from_bloch(&x).unwrap();
        assert!((rho.matrix()[(0, 1)].re - 0.4).abs() < 1e-15);
        assert!((to_bloch(&rho).unwrap().vector() - x.vector()).norm() < 1e-12);
        assert!(matches!(
            BlochState::new(Vec3::new(0.0, 0.8, 0.8)),
            Err(Error::OutsideBlochBall { .. })
        ));
    }

    #[test]
    fn field_round_trip() {
        let v = FieldVector::new(0.3, -1.2, 0.5);
        let back = FieldVector::of_operator(&v.to_operator()).unwrap();
        assert!((back.0 - v.0).norm() < 1e-15);
        // identity part is dropped
        let shifted = v.to_operator().add(&HermitianOperator::identity(2).unwrap()).unwrap();
        assert!((FieldVector::of_operator(&shifted).unwrap().0 - v.0).norm() < 1e-15);
    }

    #[test]
    fn triple_product_cases() {
        let o = FieldVector::new(0.0, 1.0, 0.0);
        let w = FieldVector::new(0.0, 0.0, 1.0);
        assert!((coherence_rate_triple(&b(1.0, 0.0, 0.0), &o, &w) - 2.0).abs() < 1e-15);
        // B in the plane of o and w
        assert_eq!(coherence_rate_triple(&b(0.0, 0.6, 0.3), &o, &w), 0.0);
        // o parallel to w
        let o2 = FieldVector::new(0.0, 0.0, -3.0);
        assert_eq!(coherence_rate_triple(&b(0.5, 0.5, 0.1), &o2, &w), 0.0);
    }

    #[test]
    fn torque_cases() {
        let eps = 1.7;
        let v = FieldVector::new(0.0, 0.0, eps);
        assert_eq!(torque(&b(0.0, 0.0, 0.4), &v), Vec3::zeros());
        assert_eq!(torque(&b(1.0, 0.0, 0.0), &v), Vec3::new(0.0, -eps, 0.0));
        assert_eq!(torque(&b(0.0, 0.0, 0.0), &v), Vec3::zeros());
    }

    #[test]
    fn power_cases() {
        let v = FieldVector::new(0.0, 0.0, 1.0);
        let state = b(0.6, 0.0, 0.3);
        // rotation about the field direction needs no power
        assert_eq!(qubit_power(&state, &v, &Vec3::new(0.0, 0.0, 2.0)), 0.0);
        // antiparallel to the torque: maximal
        let tau = torque(&state, &v);
        let omega = -tau.normalize() * 0.9;
        assert!((qubit_power(&state, &v, &omega) - 0.9 * tau.norm()).abs() < 1e-15);
        // incoherent state: no torque
        let inc = b(0.0, 0.0, -0.7);
        assert_eq!(qubit_power(&inc, &v, &Vec3::new(0.3, -1.0, 0.2)), 0.0);
        // equals the triple form with w = -Omega/2
        let w = FieldVector(-omega / 2.0);
        let triple = coherence_rate_triple(&state, &v, &w);
        assert!((qubit_power(&state, &v, &omega) - triple).abs() < 1e-15);
    }

    #[test]
    fn heat_rate_cases() {
        let eps = 1.3;
        let v = FieldVector::new(0.0, 0.0, eps);
        // pure rotation keeps |B|
        let s = b(0.6, 0.0, 0.3);
        let rot = Vec3::new(0.0, 1.0, 0.0).cross(&s.vector());
        assert!(qubit_heat_rate(&s, &rot, &v).unwrap().abs() < 1e-15);
        // shrinking along v
        let q = qubit_heat_rate(&b(0.0, 0.0, 0.8), &Vec3::new(0.0, 0.0, -0.1), &v).unwrap();
        assert!((q - 0.1 * eps).abs() < 1e-15);
        assert_eq!(
            qubit_heat_rate(&b(0.0, 0.0, 0.0), &Vec3::new(0.0, 0.0, 0.1), &v),
            Err(Error::ZeroBlochVector)
        );
    }

    #[test]
    fn dephasing_closed_form_trajectory() {
        let traj = DephasingTrajectory::new(0.6, 0.5, 1.0, 0.5, 2.0).unwrap();
        assert_eq!(traj.state(0.0).vector(), Vec3::new(0.6, 0.0, 0.5));
        let late = traj.state(80.0).vector();
        assert!((late - Vec3::new(0.0, 0.0, 0.5)).norm() < 1e-15);
        let closed = DephasingTrajectory::new(0.6, 0.5, 1.0, 0.0, 2.0).unwrap();
        for k in 0..20 {
            let t = 0.37 * k as f64;
            assert!((closed.state(t).norm() - traj.state(0.0).norm()).abs() < 1e-15);
        }
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let t = 0.2 * k as f64;
            let s = traj.state(t);
            assert!(s.norm() <= prev + 1e-15);
            assert_eq!(s.vector().z, 0.5);
            prev = s.norm();
        }
    }

    #[test]
    fn dephasing_velocity_matches_finite_difference() {
        let traj = DephasingTrajectory::with_natural_precession(0.7, -0.2, 0.8, 0.3).unwrap();
        let h = 1e-6;
        for k in 0..10 {
            let t = 0.5 * k as f64;
            let fd = (traj.state(t + h).vector() - traj.state(t - h).vector()) / (2.0 * h);
            assert!((fd - traj.velocity(t)).norm() < 1e-8);
        }
    }

    #[test]
    fn heat_closed_form_cases() {
        let q = dephasing_heat_closed_form(1.0, 0.5, 1.0).unwrap();
        assert!((q - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(dephasing_heat_closed_form(1.0, 1.0, 1.0).unwrap(), 0.0);
        let negative = dephasing_heat_closed_form(1.0, -0.5, 1.0).unwrap();
        assert!(negative < 0.0);
        assert_eq!(dephasing_heat_closed_form(0.7, 0.0, 1.0).unwrap(), 0.0);
        assert!(dephasing_heat_closed_form(0.4, 0.5, 1.0).is_err());
    }

    #[test]
    fn heat_closed_form_matches_quadrature() {
        // Composite Simpson on the analytic heat rate along the trajectory.
        let traj = DephasingTrajectory::with_natural_precession(0.75f64.sqrt(), 0.5, 1.0, 0.5).unwrap();
        let (t1, n) = (60.0, 60_000);
        let h = t1 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * traj.heat_rate(i as f64 * h).unwrap();
        }
        let quad = acc * h / 3.0;
        assert!((quad - 0.346574).abs() < 1e-6);
        assert!((quad - traj.total_heat().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn from_bloch_matrix() {
        let rho = from_bloch(&b(0.0, 0.0, 1.0)).unwrap();
        assert!(max_abs_diff(rho.matrix(), DensityMatrix::basis_state(2, 0).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn relaxation_matches_integrated_channels() {
        use crate::dynamics::{builtin_channel, integrate_sampled, Channel, ChannelParams, IntegratorControl};
        let (eps, gamma, nbar) = (0.9, 0.3, 0.4);
        let params = ChannelParams::from([("eps", eps), ("gamma", gamma), ("nbar", nbar)]);
        let k = gamma * (2.0 * nbar + 1.0);
        let cases = [
            (Channel::PureDephasing, QubitRelaxation { eps, gamma1: 0.0, gamma2: gamma, bz_inf: 0.0 }),
            (Channel::AmplitudeDamping, QubitRelaxation { eps, gamma1: gamma, gamma2: gamma / 2.0, bz_inf: 1.0 }),
            (Channel::ThermalQubit, QubitRelaxation { eps, gamma1: k, gamma2: k / 2.0, bz_inf: 1.0 / (2.0 * nbar + 1.0) }),
            (Channel::Depolarizing, QubitRelaxation { eps, gamma1: gamma, gamma2: gamma, bz_inf: 0.0 }),
        ];
        let b0 = Vec3::new(0.5, -0.4, 0.3);
        for (channel, model) in cases {
            let spec = builtin_channel(channel, &params).unwrap();
            let rho0 = from_bloch(&BlochState::new(b0).unwrap()).unwrap();
            let traj = integrate_sampled(&spec, &rho0, &[0.0, 1.0, 4.0], IntegratorControl::with_tol(1e-11)).unwrap();
            for (t, rho) in traj.times.iter().zip(&traj.states) {
                let got = to_bloch(rho).unwrap().vector();
                assert!((got - model.state(&b0, *t)).norm() < 1e-8, "{channel} at {t}");
            }
        }
    }

    #[test]
    fn finite_time_dephasing_heat() {
        let b0 = Vec3::new(0.6, 0.0, 0.5);
        assert_eq!(dephasing_heat_at(&b0, 1.0, 0.5, 0.0).unwrap(), 0.0);
        let late = dephasing_heat_at(&b0, 1.0, 0.5, 100.0).unwrap();
        let total = dephasing_heat_closed_form(b0.norm(), 0.5, 1.0).unwrap();
        assert!((late - total).abs() < 1e-15);
    }
}
