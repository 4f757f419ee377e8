//! Finite-difference reference for `d<O>/dt`, independent of the spectral
//! machinery: it only steps the master equation around a sample.

use crate::dynamics::{rk4_step, DynamicsSpec};
use crate::operator::Matrix;

/// Default stencil half-width in units of the characteristic time.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// States at `t +- h` and `t +- h/2`.
#[derive(Debug, Clone)]
pub struct FdStencil {
    pub t: f64,
    pub step: f64,
    minus: Matrix,
    plus: Matrix,
    minus_half: Matrix,
    plus_half: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// Centered difference with half-width `h`.
    pub coarse: f64,
    /// Centered difference with half-width `h/2`.
    pub fine: f64,
    /// `(4 fine - coarse) / 3`.
    pub richardson: f64,
}

impl FdEstimate {
    /// Estimated truncation error of `coarse`.
    pub fn oracle_error(&self) -> f64 {
        (self.coarse - self.fine).abs() * 4.0 / 3.0
    }
}

impl FdStencil {
    pub fn new(spec: &DynamicsSpec, t: f64, rho: &Matrix, step: f64) -> Self {
        // Single RK4 steps of size 1e-4 carry local errors far below the
        // differences being resolved.
        Self {
            t,
            step,
            minus: rk4_step(spec, t, rho, -step),
            plus: rk4_step(spec, t, rho, step),
            minus_half: rk4_step(spec, t, rho, -0.5 * step),
            plus_half: rk4_step(spec, t, rho, 0.5 * step),
        }
    }

    /// Differentiates `f(t, rho(t))`.
    pub fn rate(&self, f: impl Fn(f64, &Matrix) -> f64) -> FdEstimate {
        let (t, h) = (self.t, self.step);
        let coarse = (f(t + h, &self.plus) - f(t - h, &self.minus)) / (2.0 * h);
        let fine = (f(t + 0.5 * h, &self.plus_half) - f(t - 0.5 * h, &self.minus_half)) / h;
        FdEstimate {
            coarse,
            fine,
            richardson: (4.0 * fine - coarse) / 3.0,
        }
    }
}
