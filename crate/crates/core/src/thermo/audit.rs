use serde::Serialize;

use super::frame::{SpectralFrame, DEFAULT_DEG_TOL};
use super::omega::{reconstruct_omega, OmegaGenerator, DEFAULT_LEAK_TOL};
use super::rates::{entropy_and_rate, heat_rate, power_operator};
use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::operator::{trace_product, HermitianOperator, Matrix};
use crate::state::{expectation, DensityMatrix};

pub const DEFAULT_AUDIT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub deg_tol: f64,
    pub leak_tol: f64,
    /// Allowed `|dE/dt - Q_dot - W_dot|`.
    pub audit_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            deg_tol: DEFAULT_DEG_TOL,
            leak_tol: DEFAULT_LEAK_TOL,
            audit_tol: DEFAULT_AUDIT_TOL,
        }
    }
}

/// Everything derived at one sample of a trajectory.
#[derive(Debug, Clone)]
pub struct SampleAnalysis {
    pub t: f64,
    pub rho: DensityMatrix,
    pub rho_dot: Matrix,
    pub frame: SpectralFrame,
    pub omega: OmegaGenerator,
    pub hamiltonian: HermitianOperator,
    pub hamiltonian_rate: HermitianOperator,
}

/// Per-sample energy ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoRecord {
    pub t: f64,
    pub energy: f64,
    pub heat_rate: f64,
    pub work_rate: f64,
    pub entropy: f64,
    pub entropy_rate: f64,
    pub heat_accum: f64,
    pub work_accum: f64,
    /// `dE/dt - Q_dot - W_dot` with `dE/dt` from the exact generator.
    pub first_law_residual: f64,
    pub flagged: bool,
}

/// Continuity-tracked spectral frames for every sample.
pub fn track_spectrum(traj: &Trajectory, deg_tol: f64) -> Result<Vec<SpectralFrame>> {
    let mut frames: Vec<SpectralFrame> = Vec::with_capacity(traj.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let rho_dot = traj.spec.liouvillian_apply(t, rho)?.into_matrix();
        let frame = SpectralFrame::new(t, rho, &rho_dot, frames.last(), deg_tol)?;
        frames.push(frame);
    }
    Ok(frames)
}

/// Tracks the spectrum and reconstructs the eigenbasis generator at every sample.
pub fn analyze(traj: &Trajectory, opts: &AnalysisOptions) -> Result<Vec<SampleAnalysis>> {
    let mut out: Vec<SampleAnalysis> = Vec::with_capacity(traj.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let rho_dot = traj.spec.liouvillian_apply(t, rho)?.into_matrix();
        let frame = SpectralFrame::new(t, rho, &rho_dot, out.last().map(|s| &s.frame), opts.deg_tol)?;
        let omega = reconstruct_omega(&frame, &rho_dot, opts.deg_tol, opts.leak_tol)?;
        out.push(SampleAnalysis {
            t,
            rho: rho.clone(),
            rho_dot,
            frame,
            omega,
            hamiltonian: traj.spec.hamiltonian_at(t),
            hamiltonian_rate: traj.spec.hamiltonian_rate_at(t),
        });
    }
    Ok(out)
}

/// Running integral of `f` sampled at increasing `t`. Each interval uses the
/// cubic through the four nearest samples (fewer when there are fewer),
/// integrated exactly by two-point Gauss-Legendre.
pub fn cumulative_integral(t: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    let n = t.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(0.0);
    let width = n.min(4);
    let g = 0.5 / 3f64.sqrt();
    for i in 0..n - 1 {
        let start = i.saturating_sub(1).min(n - width);
        let nodes = start..start + width;
        let interp = |x: f64| -> f64 {
            nodes
                .clone()
                .map(|j| {
                    let basis: f64 = nodes.clone().filter(|&k| k != j).map(|k| (x - t[k]) / (t[j] - t[k])).product();
                    basis * f[j]
                })
                .sum()
        };
        let (a, b) = (t[i], t[i + 1]);
        let (mid, h) = (0.5 * (a + b), b - a);
        let integral = 0.5 * h * (interp(mid - g * h) + interp(mid + g * h));
        out.push(out[i] + integral);
    }
    out
}

/// Builds the energy ledger from analyzed samples, accumulating heat and
/// work with [`cumulative_integral`] on the sample grid.
pub fn thermo_records(samples: &[SampleAnalysis], opts: &AnalysisOptions) -> Result<Vec<ThermoRecord>> {
    let mut records: Vec<ThermoRecord> = Vec::with_capacity(samples.len());
    for s in samples {
        let energy = expectation(&s.rho, &s.hamiltonian)?;
        let q_dot = heat_rate(&s.frame, &s.hamiltonian)?;
        let power = power_operator(&s.omega, &s.hamiltonian, &s.hamiltonian_rate)?;
        let w_dot = expectation(&s.rho, &power)?;
        let (entropy, entropy_rate) = entropy_and_rate(&s.frame)?;
        let de_dt = trace_product(&s.rho_dot, s.hamiltonian.matrix()).re
            + trace_product(s.rho.matrix(), s.hamiltonian_rate.matrix()).re;
        let residual = de_dt - q_dot - w_dot;
        records.push(ThermoRecord {
            t: s.t,
            energy,
            heat_rate: q_dot,
            work_rate: w_dot,
            entropy,
            entropy_rate,
            heat_accum: 0.0,
            work_accum: 0.0,
            first_law_residual: residual,
            flagged: !(residual.abs() <= opts.audit_tol),
        });
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let q: Vec<f64> = records.iter().map(|r| r.heat_rate).collect();
    let w: Vec<f64> = records.iter().map(|r| r.work_rate).collect();
    for ((r, qa), wa) in records.iter_mut().zip(cumulative_integral(&t, &q)).zip(cumulative_integral(&t, &w)) {
        r.heat_accum = qa;
        r.work_accum = wa;
    }
    Ok(records)
}

/// Energy ledger for a trajectory; samples breaking the first law beyond
/// `opts.audit_tol` come back with `flagged` set.
pub fn first_law_audit(traj: &Trajectory, opts: &AnalysisOptions) -> Result<Vec<ThermoRecord>> {
    thermo_records(&analyze(traj, opts)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_integral_is_exact_for_cubics() {
        let t: Vec<f64> = [0.0, 0.3, 0.5, 1.1, 1.2, 2.0].to_vec();
        let f: Vec<f64> = t.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x * x).collect();
        let exact = |x: f64| x - x * x + 0.125 * x.powi(4);
        for (x, got) in t.iter().zip(cumulative_integral(&t, &f)) {
            assert!((got - exact(*x)).abs() < 1e-14);
        }
    }

    #[test]
    fn cumulative_integral_short_inputs() {
        assert!(cumulative_integral(&[], &[]).is_empty());
        assert_eq!(cumulative_integral(&[1.0], &[3.0]), [0.0]);
        assert!((cumulative_integral(&[0.0, 2.0], &[1.0, 3.0])[1] - 4.0).abs() < 1e-14);
        let got = cumulative_integral(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0]);
        assert!((got[2] - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_integral_fourth_order() {
        let err = |n: usize| {
            let t: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
            let f: Vec<f64> = t.iter().map(|x| x.exp()).collect();
            (cumulative_integral(&t, &f)[n] - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
