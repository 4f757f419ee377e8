use log::{debug, trace};

use super::DynamicsSpec;
use crate::error::{Error, Result};
use crate::operator::{c, max_abs_diff, Matrix};
use crate::state::DensityMatrix;

/// Step-doubling RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorControl {
    /// Local error bound per accepted step (max-abs entry norm).
    pub tol: f64,
    pub min_step: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Pre-projection invariant limit; also the largest allowed projection.
    pub invariant_limit: f64,
}

impl Default for IntegratorControl {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            min_step: 1e-12,
            initial_step: 1e-3,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
            invariant_limit: 1e-8,
        }
    }
}

impl IntegratorControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.min_step > 0.0
            && self.initial_step > 0.0
            && self.max_step > 0.0
            && self.invariant_limit > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidControl(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_projection: f64,
    pub max_error_estimate: f64,
    /// Largest `|tr(rho) - 1|` seen before projection.
    pub max_trace_drift: f64,
    /// Most negative eigenvalue seen before projection.
    pub min_eigenvalue: f64,
}

/// Sampled states of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub spec: DynamicsSpec,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// `n` evenly spaced times from `t0` to `t1` inclusive.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two sample times");
    let dt = (t1 - t0) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { t1 } else { t0 + dt * k as f64 })
        .collect()
}

/// One classical RK4 step on a raw matrix.
pub fn rk4_step(spec: &DynamicsSpec, t: f64, y: &Matrix, h: f64) -> Matrix {
    let half = c(0.5 * h, 0.0);
    let k1 = spec.rhs(t, y);
    let k2 = spec.rhs(t + 0.5 * h, &(y + &k1 * half));
    let k3 = spec.rhs(t + 0.5 * h, &(y + &k2 * half));
    let k4 = spec.rhs(t + h, &(y + &k3 * c(h, 0.0)));
    y + (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0)
}

struct Stepper<'a> {
    spec: &'a DynamicsSpec,
    control: IntegratorControl,
    t: f64,
    state: DensityMatrix,
    step: f64,
    stats: IntegrationStats,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a DynamicsSpec, rho0: &DensityMatrix, t0: f64, control: IntegratorControl) -> Self {
        Self {
            spec,
            control,
            t: t0,
            state: rho0.clone(),
            step: control.initial_step.min(control.max_step),
            stats: IntegrationStats::default(),
        }
    }

    /// Takes a single accepted step, never past `t_end`.
    fn advance(&mut self, t_end: f64) -> Result<()> {
        loop {
            if self.stats.accepted + self.stats.rejected >= self.control.max_steps {
                return Err(Error::StepLimit {
                    t: self.t,
                    max_steps: self.control.max_steps,
                });
            }
            let remaining = t_end - self.t;
            let truncated = self.step >= remaining;
            let h = if truncated { remaining } else { self.step };

            let y = self.state.matrix();
            let full = rk4_step(self.spec, self.t, y, h);
            let mid = rk4_step(self.spec, self.t, y, 0.5 * h);
            let fine = rk4_step(self.spec, self.t + 0.5 * h, &mid, 0.5 * h);
            let err = max_abs_diff(&fine, &full) / 15.0;

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * (self.control.tol / err).powf(0.2)).clamp(0.2, 5.0)
            };

            if err <= self.control.tol {
                let t_new = if truncated { t_end } else { self.t + h };
                self.accept(t_new, &fine)?;
                self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
                // A step clipped to land on t_end says nothing about the
                // natural step size, so only grow from unclipped steps.
                if !truncated || factor < 1.0 {
                    self.step = (h * factor).min(self.control.max_step);
                }
                return Ok(());
            }

            self.stats.rejected += 1;
            self.step = h * factor;
            trace!("rejected step h={h:e} err={err:e} at t={}", self.t);
            if self.step < self.control.min_step {
                return Err(Error::StepUnderflow {
                    t: self.t,
                    step: self.step,
                    min_step: self.control.min_step,
                });
            }
        }
    }

    fn accept(&mut self, t_new: f64, raw: &Matrix) -> Result<()> {
        let limit = self.control.invariant_limit;
        let (rho, projection) = DensityMatrix::project(raw, limit).map_err(|e| match e {
            Error::NotHermitian { deviation, .. } => Error::InvariantViolation {
                t: t_new,
                what: "hermiticity deviation",
                value: deviation,
                limit,
            },
            Error::TraceNotUnit { trace, .. } => Error::InvariantViolation {
                t: t_new,
                what: "trace drift",
                value: (trace - 1.0).abs(),
                limit,
            },
            Error::NegativeEigenvalue { value, .. } => Error::InvariantViolation {
                t: t_new,
                what: "minimum eigenvalue",
                value,
                limit,
            },
            other => other,
        })?;
        if projection.magnitude > limit {
            return Err(Error::InvariantViolation {
                t: t_new,
                what: "projection magnitude",
                value: projection.magnitude,
                limit,
            });
        }
        trace!(
            "t={t_new} projection={:e} trace_drift={:e}",
            projection.magnitude,
            projection.trace_error
        );
        let s = &mut self.stats;
        s.accepted += 1;
        s.max_projection = s.max_projection.max(projection.magnitude);
        s.max_trace_drift = s.max_trace_drift.max(projection.trace_error);
        s.min_eigenvalue = s.min_eigenvalue.min(projection.min_eigenvalue);
        self.t = t_new;
        self.state = rho;
        Ok(())
    }
}

fn check_start(spec: &DynamicsSpec, rho0: &DensityMatrix, control: &IntegratorControl) -> Result<()> {
    crate::operator::check_dims(spec.dim(), rho0.dim())?;
    control.validate()
}

/// Integrates from `t_span.0` to `t_span.1`, recording every accepted step.
pub fn integrate(
    spec: &DynamicsSpec,
    rho0: &DensityMatrix,
    t_span: (f64, f64),
    control: IntegratorControl,
) -> Result<Trajectory> {
    let (t0, t1) = t_span;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidTimeSpan { t0, t1 });
    }
    check_start(spec, rho0, &control)?;
    let mut stepper = Stepper::new(spec, rho0, t0, control);
    let mut times = vec![t0];
    let mut states = vec![rho0.clone()];
    while stepper.t < t1 {
        stepper.advance(t1)?;
        times.push(stepper.t);
        states.push(stepper.state.clone());
    }
    debug!("integrate: {:?}", stepper.stats);
    Ok(Trajectory {
        times,
        states,
        spec: spec.clone(),
        stats: stepper.stats,
    })
}

/// Integrates through the given strictly increasing `times` and records the
/// state at each of them. `times[0]` is the start time of `rho0`.
pub fn integrate_sampled(
    spec: &DynamicsSpec,
    rho0: &DensityMatrix,
    times: &[f64],
    control: IntegratorControl,
) -> Result<Trajectory> {
    if times.len() < 2 {
        return Err(Error::InvalidTimeSpan {
            t0: times.first().copied().unwrap_or(f64::NAN),
            t1: times.last().copied().unwrap_or(f64::NAN),
        });
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() || !w[0].is_finite() {
            return Err(Error::InvalidTimeSpan { t0: w[0], t1: w[1] });
        }
    }
    check_start(spec, rho0, &control)?;
    let mut stepper = Stepper::new(spec, rho0, times[0], control);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for &target in &times[1..] {
        while stepper.t < target {
            stepper.advance(target)?;
        }
        states.push(stepper.state.clone());
    }
    debug!("integrate_sampled: {:?}", stepper.stats);
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        spec: spec.clone(),
        stats: stepper.stats,
    })
}
