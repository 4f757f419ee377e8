//! Markovian open-system generators and their integration.
//!
//! A [`DynamicsSpec`] fixes the right-hand side
//!
//! ```text
//! drho/dt = -i[H(t), rho] + sum_k g_k (L_k rho L_k† - 1/2 {L_k† L_k, rho})
//! ```
//!
//! with `hbar = 1`. Trajectories are produced by [`integrate`] and
//! [`integrate_sampled`].

mod channels;
mod integrate;

use std::fmt;
use std::sync::Arc;

pub use channels::{builtin_channel, Channel, ChannelParams};
pub use integrate::{
    integrate, integrate_sampled, rk4_step, uniform_times, IntegrationStats, IntegratorControl,
    Trajectory,
};

use crate::error::{Error, Result};
use crate::operator::{c, check_dims, ComplexMatrix, HermitianOperator, Matrix, I};
use crate::state::DensityMatrix;

/// A term `amplitude * cos(frequency * t + phase) * operator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Drive {
    pub operator: HermitianOperator,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Drive {
    fn coefficient(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t + self.phase).cos()
    }

    fn rate(&self, t: f64) -> f64 {
        -self.amplitude * self.frequency * (self.frequency * t + self.phase).sin()
    }
}

type OperatorFn = Arc<dyn Fn(f64) -> HermitianOperator + Send + Sync>;

#[derive(Clone)]
pub enum Hamiltonian {
    Static(HermitianOperator),
    /// `base + sum of drives`.
    Driven {
        base: HermitianOperator,
        drives: Vec<Drive>,
    },
    /// User-supplied `H(t)` together with its time derivative.
    Custom {
        dim: usize,
        value: OperatorFn,
        derivative: OperatorFn,
    },
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::Static(h) => f.debug_tuple("Static").field(h).finish(),
            Hamiltonian::Driven { base, drives } => f
                .debug_struct("Driven")
                .field("base", base)
                .field("drives", drives)
                .finish(),
            Hamiltonian::Custom { dim, .. } => {
                f.debug_struct("Custom").field("dim", dim).finish_non_exhaustive()
            }
        }
    }
}

impl Hamiltonian {
    pub fn custom<F, G>(dim: usize, value: F, derivative: G) -> Self
    where
        F: Fn(f64) -> HermitianOperator + Send + Sync + 'static,
        G: Fn(f64) -> HermitianOperator + Send + Sync + 'static,
    {
        Hamiltonian::Custom {
            dim,
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Static(h) => h.dim(),
            Hamiltonian::Driven { base, .. } => base.dim(),
            Hamiltonian::Custom { dim, .. } => *dim,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        match self {
            Hamiltonian::Static(_) => false,
            Hamiltonian::Driven { drives, .. } => drives
                .iter()
                .any(|d| d.amplitude != 0.0 && d.frequency != 0.0),
            Hamiltonian::Custom { .. } => true,
        }
    }

    pub fn at(&self, t: f64) -> HermitianOperator {
        match self {
            Hamiltonian::Static(h) => h.clone(),
            Hamiltonian::Driven { base, drives } => {
                let mut m = base.matrix().clone();
                for d in drives {
                    m += d.operator.matrix() * c(d.coefficient(t), 0.0);
                }
                HermitianOperator::new(m).expect("sum of Hermitian terms")
            }
            Hamiltonian::Custom { value, .. } => value(t),
        }
    }

    /// `dH/dt` at `t`.
    pub fn rate_at(&self, t: f64) -> HermitianOperator {
        let n = self.dim();
        match self {
            Hamiltonian::Static(_) => HermitianOperator::zeros(n).expect("dim validated"),
            Hamiltonian::Driven { drives, .. } => {
                let mut m = Matrix::zeros(n, n);
                for d in drives {
                    m += d.operator.matrix() * c(d.rate(t), 0.0);
                }
                HermitianOperator::new(m).expect("sum of Hermitian terms")
            }
            Hamiltonian::Custom { derivative, .. } => derivative(t),
        }
    }
}

/// A jump operator with its (non-negative) rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    operator: ComplexMatrix,
    rate: f64,
    adjoint: Matrix,
    number: Matrix,
}

impl Dissipator {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Self {
        let adjoint = operator.matrix().adjoint();
        let number = &adjoint * operator.matrix();
        Self {
            operator,
            rate,
            adjoint,
            number,
        }
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Hamiltonian plus dissipators; immutable once validated.
#[derive(Debug, Clone)]
pub struct DynamicsSpec {
    hamiltonian: Hamiltonian,
    dissipators: Vec<Dissipator>,
}

impl DynamicsSpec {
    pub fn new(hamiltonian: Hamiltonian, dissipators: Vec<Dissipator>) -> Result<Self> {
        let n = hamiltonian.dim();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        match &hamiltonian {
            Hamiltonian::Driven { drives, .. } => {
                for d in drives {
                    check_dims(n, d.operator.dim())?;
                    if !(d.amplitude.is_finite() && d.frequency.is_finite() && d.phase.is_finite()) {
                        return Err(Error::InvalidParam {
                            param: "drive".into(),
                            reason: "non-finite drive parameter".into(),
                        });
                    }
                }
            }
            Hamiltonian::Custom { .. } => {
                check_dims(n, hamiltonian.at(0.0).dim())?;
                check_dims(n, hamiltonian.rate_at(0.0).dim())?;
            }
            Hamiltonian::Static(_) => {}
        }
        for (index, d) in dissipators.iter().enumerate() {
            check_dims(n, d.operator.dim())?;
            if !(d.rate >= 0.0 && d.rate.is_finite()) {
                return Err(Error::NegativeRate {
                    index,
                    rate: d.rate,
                });
            }
        }
        Ok(Self {
            hamiltonian,
            dissipators,
        })
    }

    /// Unitary dynamics under a static Hamiltonian.
    pub fn closed(h: HermitianOperator) -> Self {
        Self::new(Hamiltonian::Static(h), Vec::new()).expect("static Hamiltonian is valid")
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }

    pub fn is_time_dependent(&self) -> bool {
        self.hamiltonian.is_time_dependent()
    }

    pub fn hamiltonian_at(&self, t: f64) -> HermitianOperator {
        self.hamiltonian.at(t)
    }

    pub fn hamiltonian_rate_at(&self, t: f64) -> HermitianOperator {
        self.hamiltonian.rate_at(t)
    }

    /// `L(rho)` at time `t`, i.e. `drho/dt`.
    pub fn liouvillian_apply(&self, t: f64, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        check_dims(self.dim(), rho.dim())?;
        ComplexMatrix::new(self.rhs(t, rho.matrix()))
    }

    /// Unchecked right-hand side on a raw matrix.
    pub(crate) fn rhs(&self, t: f64, rho: &Matrix) -> Matrix {
        let h = self.hamiltonian.at(t);
        let h = h.matrix();
        let mut out = (h * rho - rho * h) * (-I);
        for d in &self.dissipators {
            if d.rate == 0.0 {
                continue;
            }
            let l = d.operator.matrix();
            let jump = l * rho * &d.adjoint;
            let anti = &d.number * rho + rho * &d.number;
            out += (jump - anti * c(0.5, 0.0)) * c(d.rate, 0.0);
        }
        out
    }
}
