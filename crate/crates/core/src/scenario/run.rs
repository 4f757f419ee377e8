use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use super::config::{ResolvedScenario, ScenarioConfig};
use crate::bloch::{dephasing_heat_at, to_bloch, QubitRelaxation};
use crate::dynamics::{integrate_sampled, uniform_times, Channel, ChannelParams};
use crate::error::{Error, Result};
use crate::operator::trace_product;
use crate::thermo::{analyze, ehrenfest_rate, thermo_records, EhrenfestDecomposition, FdStencil, ThermoRecord};

pub const FLAG_FIRST_LAW: u32 = 1;
pub const FLAG_FD_MISMATCH: u32 = 2;
pub const FLAG_AMBIGUOUS: u32 = 4;
pub const FLAG_DEGENERATE: u32 = 8;

/// One row of the time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub record: ThermoRecord,
    pub bloch: Option<[f64; 3]>,
    /// Per observable, with the coarse finite-difference reference attached.
    pub observables: Vec<EhrenfestDecomposition>,
    /// Largest `|decomposition - fd|` at this sample over observables and
    /// energy, for both the coarse and the Richardson reference.
    pub fd_residual: f64,
    /// `<dH/dt>`, the work rate of a unitary evolution.
    pub explicit_power: f64,
    pub flags: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub max_projection: f64,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
}

/// Comparison with closed-form results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bloch_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub work_plus_heat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub work_expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_heat_rate: Option<f64>,
    /// `max |W_dot - <dH/dt>|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_work_rate_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub config_sha256: String,
    pub dim: usize,
    pub samples: usize,
    pub t0: f64,
    pub t1: f64,
    pub heat: f64,
    pub work: f64,
    pub delta_energy: f64,
    pub delta_entropy: f64,
    /// `delta_energy - heat - work` with the accumulated heat and work.
    pub integrated_first_law_gap: f64,
    pub max_first_law_residual: f64,
    pub max_fd_residual: f64,
    pub flagged_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_flagged_time: Option<f64>,
    pub ambiguous_frames: usize,
    pub degenerate_frames: usize,
    pub integrator: IntegratorSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub observable_names: Vec<String>,
    pub rows: Vec<SampleRow>,
    pub summary: Summary,
}

/// Runs a scenario end to end. Deterministic for a given configuration.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let resolved = config.resolve()?;
    let ResolvedScenario {
        spec,
        rho0,
        observables,
        ..
    } = &resolved;
    let tol = config.tolerances;
    let opts = tol.analysis();
    let times = uniform_times(config.time.t0, config.time.t1, config.time.samples);
    let traj = integrate_sampled(spec, rho0, &times, tol.integrator_control())?;
    info!("{}: {} accepted steps, {} rejected", config.name, traj.stats.accepted, traj.stats.rejected);
    let samples = analyze(&traj, &opts)?;
    let records = thermo_records(&samples, &opts)?;

    let mut rows = Vec::with_capacity(samples.len());
    for (s, record) in samples.iter().zip(&records) {
        let stencil = FdStencil::new(spec, s.t, s.rho.matrix(), tol.fd_step);
        let mut fd_residual: f64 = 0.0;
        let mut decomps = Vec::with_capacity(observables.len());
        for (_, o) in observables {
            let d = ehrenfest_rate(&s.frame, &s.omega, o, None, &s.rho)?;
            let fd = stencil.rate(|_, rho| trace_product(rho, o.matrix()).re);
            fd_residual = fd_residual.max((d.total - fd.coarse).abs()).max((d.total - fd.richardson).abs());
            decomps.push(d.with_reference(fd.coarse));
        }
        let energy_fd = stencil.rate(|t, rho| trace_product(rho, spec.hamiltonian_at(t).matrix()).re);
        let energy_rate = record.heat_rate + record.work_rate;
        fd_residual = fd_residual
            .max((energy_rate - energy_fd.coarse).abs())
            .max((energy_rate - energy_fd.richardson).abs());

        let mut flags = 0;
        if record.flagged {
            flags |= FLAG_FIRST_LAW;
        }
        if !(fd_residual <= tol.ehrenfest) {
            flags |= FLAG_FD_MISMATCH;
        }
        if s.frame.ambiguous {
            flags |= FLAG_AMBIGUOUS;
        }
        if s.frame.degeneracy_blocks.iter().any(|b| b.len() > 1) {
            flags |= FLAG_DEGENERATE;
        }
        let bloch = if spec.dim() == 2 {
            let v = to_bloch(&s.rho)?.vector();
            Some([v.x, v.y, v.z])
        } else {
            None
        };
        rows.push(SampleRow {
            record: *record,
            bloch,
            observables: decomps,
            fd_residual,
            explicit_power: crate::state::expectation(&s.rho, &s.hamiltonian_rate)?,
            flags,
        });
    }

    let summary = summarize(&resolved, &rows, &traj.stats)?;
    Ok(ScenarioReport {
        config: config.clone(),
        observable_names: observables.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        summary,
    })
}

fn relaxation_model(channel: Channel, params: &ChannelParams) -> Option<QubitRelaxation> {
    let get = |k: &str| params.0.get(k).copied().unwrap_or(0.0);
    let (eps, gamma) = (get("eps"), get("gamma"));
    Some(match channel {
        Channel::PureDephasing => QubitRelaxation { eps, gamma1: 0.0, gamma2: gamma, bz_inf: 0.0 },
        Channel::AmplitudeDamping => QubitRelaxation { eps, gamma1: gamma, gamma2: gamma / 2.0, bz_inf: 1.0 },
        Channel::ThermalQubit => {
            let k = gamma * (2.0 * get("nbar") + 1.0);
            QubitRelaxation { eps, gamma1: k, gamma2: k / 2.0, bz_inf: 1.0 / (2.0 * get("nbar") + 1.0) }
        }
        Channel::Depolarizing => QubitRelaxation { eps, gamma1: gamma, gamma2: gamma, bz_inf: 0.0 },
        Channel::Closed if get("drive_amplitude") == 0.0 => QubitRelaxation { eps, gamma1: 0.0, gamma2: 0.0, bz_inf: 0.0 },
        Channel::Closed => return None,
    })
}

fn summarize(resolved: &ResolvedScenario, rows: &[SampleRow], stats: &crate::dynamics::IntegrationStats) -> Result<Summary> {
    let config = &resolved.config;
    let tol = config.tolerances;
    let first = &rows[0].record;
    let last = &rows[rows.len() - 1].record;
    let max_of = |f: &dyn Fn(&SampleRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max_first_law_residual = max_of(&|r| r.record.first_law_residual.abs());
    let max_fd_residual = max_of(&|r| r.fd_residual);
    let count = |bit: u32| rows.iter().filter(|r| r.flags & bit != 0).count();
    let is_flagged = |r: &&SampleRow| r.flags & (FLAG_FIRST_LAW | FLAG_FD_MISMATCH) != 0;
    let flagged_samples = rows.iter().filter(is_flagged).count();
    let first_flagged_time = rows.iter().find(is_flagged).map(|r| r.record.t);

    let mut failures = Vec::new();
    if count(FLAG_FIRST_LAW) > 0 {
        failures.push(format!(
            "first-law residual {max_first_law_residual:e} exceeds {:e} at {} samples, first at t = {}",
            tol.audit,
            count(FLAG_FIRST_LAW),
            rows.iter().find(|r| r.flags & FLAG_FIRST_LAW != 0).map_or(f64::NAN, |r| r.record.t)
        ));
    }
    if count(FLAG_FD_MISMATCH) > 0 {
        failures.push(format!(
            "decomposition differs from finite differences by {max_fd_residual:e} (limit {:e}) at {} samples, first at t = {}",
            tol.ehrenfest,
            count(FLAG_FD_MISMATCH),
            rows.iter().find(|r| r.flags & FLAG_FD_MISMATCH != 0).map_or(f64::NAN, |r| r.record.t)
        ));
    }

    let (heat, work) = (last.heat_accum, last.work_accum);
    let mut oracle = None;
    let empty = || OracleSummary {
        model: String::new(),
        max_bloch_error: None,
        heat_expected: None,
        heat_relative_error: None,
        work_plus_heat: None,
        work_expected: None,
        max_abs_heat_rate: None,
        max_work_rate_error: None,
    };
    if resolved.spec.dissipators().is_empty() {
        let max_q = max_of(&|r| r.record.heat_rate.abs());
        let max_w = max_of(&|r| (r.record.work_rate - r.explicit_power).abs());
        if max_q > tol.audit {
            failures.push(format!("unitary evolution produced heat rate {max_q:e}"));
        }
        if max_w > tol.audit {
            failures.push(format!("unitary work rate differs from <dH/dt> by {max_w:e}"));
        }
        oracle = Some(OracleSummary {
            model: "unitary".into(),
            heat_expected: Some(0.0),
            max_abs_heat_rate: Some(max_q),
            max_work_rate_error: Some(max_w),
            ..empty()
        });
    }
    if let Some((channel, params)) = &resolved.channel {
        if let Some(model) = relaxation_model(*channel, params) {
            let b0 = rows[0].bloch.expect("built-in channels are qubits");
            let b0 = crate::bloch::Vec3::from(b0);
            let max_bloch_error = max_of(&|r| {
                let b = crate::bloch::Vec3::from(r.bloch.expect("qubit"));
                (b - model.state(&b0, r.record.t - first.t)).norm()
            });
            if max_bloch_error > tol.oracle {
                failures.push(format!("Bloch trajectory deviates from closed form by {max_bloch_error:e}"));
            }
            let o = oracle.get_or_insert_with(empty);
            o.model = channel.name().into();
            o.max_bloch_error = Some(max_bloch_error);
            if b0.x == 0.0 && b0.y == 0.0 {
                // No coherence is ever created, so there is no torque.
                if work.abs() > tol.oracle {
                    failures.push(format!("incoherent evolution produced work {work:e}"));
                }
                o.work_expected = Some(0.0);
            }
            if *channel == Channel::PureDephasing && b0.norm() > 0.0 {
                let expected = dephasing_heat_at(&b0, model.eps, model.gamma2, last.t - first.t)?;
                let rel = if expected != 0.0 { (heat - expected).abs() / expected.abs() } else { heat.abs() };
                let balance = work + heat;
                if rel > tol.oracle {
                    failures.push(format!("heat {heat} differs from closed form {expected} (relative {rel:e})"));
                }
                if balance.abs() > tol.oracle {
                    failures.push(format!("work + heat = {balance:e}, expected 0"));
                }
                o.heat_expected = Some(expected);
                o.heat_relative_error = Some(rel);
                o.work_plus_heat = Some(balance);
            }
        }
    }

    let delta_energy = last.energy - first.energy;
    Ok(Summary {
        name: config.name.clone(),
        config_sha256: config.hash(),
        dim: resolved.spec.dim(),
        samples: rows.len(),
        t0: first.t,
        t1: last.t,
        heat,
        work,
        delta_energy,
        delta_entropy: last.entropy - first.entropy,
        integrated_first_law_gap: delta_energy - heat - work,
        max_first_law_residual,
        max_fd_residual,
        flagged_samples,
        first_flagged_time,
        ambiguous_frames: count(FLAG_AMBIGUOUS),
        degenerate_frames: count(FLAG_DEGENERATE),
        integrator: IntegratorSummary {
            accepted: stats.accepted,
            rejected: stats.rejected,
            max_projection: stats.max_projection,
            max_trace_drift: stats.max_trace_drift,
            min_eigenvalue: stats.min_eigenvalue,
        },
        oracle,
        pass: failures.is_empty(),
        failures,
    })
}

impl ScenarioReport {
    pub fn csv(&self) -> String {
        let cfg = &self.config;
        let tol = cfg.tolerances;
        let mut out = String::new();
        let _ = writeln!(out, "# scenario: {}", cfg.name);
        let _ = writeln!(out, "# config_sha256: {}", self.summary.config_sha256);
        let _ = writeln!(out, "# dim: {}", self.summary.dim);
        let _ = writeln!(
            out,
            "# tolerances: integrator={:e} degeneracy={:e} leak={:e} audit={:e} ehrenfest={:e} fd_step={:e} oracle={:e}",
            tol.integrator, tol.degeneracy, tol.leak, tol.audit, tol.ehrenfest, tol.fd_step, tol.oracle
        );
        let _ = writeln!(
            out,
            "# flag bits: {FLAG_FIRST_LAW}=first-law residual above audit tolerance, \
             {FLAG_FD_MISMATCH}=decomposition differs from finite differences, \
             {FLAG_AMBIGUOUS}=ambiguous eigenvector ordering, {FLAG_DEGENERATE}=degenerate eigenvalues"
        );

        let mut header: Vec<String> = [
            "t",
            "E",
            "Q_dot",
            "W_dot",
            "S_dot",
            "Q_accum",
            "W_accum",
            "first_law_residual",
        ]
        .map(String::from)
        .to_vec();
        let qubit = self.summary.dim == 2;
        if qubit {
            header.extend(["B_norm", "B_x", "B_y", "B_z"].map(String::from));
        }
        for name in &self.observable_names {
            for part in ["thermal", "drive", "coherence", "total", "fd_reference"] {
                header.push(format!("{name}_{part}"));
            }
        }
        header.push("flag".into());
        let _ = writeln!(out, "{}", header.join(","));

        for row in &self.rows {
            let r = &row.record;
            let mut fields: Vec<String> = [
                r.t,
                r.energy,
                r.heat_rate,
                r.work_rate,
                r.entropy_rate,
                r.heat_accum,
                r.work_accum,
                r.first_law_residual,
            ]
            .iter()
            .map(|v| number(*v))
            .collect();
            if let Some([x, y, z]) = row.bloch {
                let norm = (x * x + y * y + z * z).sqrt();
                fields.extend([norm, x, y, z].iter().map(|v| number(*v)));
            }
            for d in &row.observables {
                let fd = d.fd_reference.unwrap_or(f64::NAN);
                fields.extend([d.thermal, d.drive, d.coherence, d.total, fd].iter().map(|v| number(*v)));
            }
            fields.push(row.flags.to_string());
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes") + "\n"
    }

    /// Writes `<name>.csv` and `<name>.summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let csv_path = dir.join(format!("{}.csv", self.config.name));
        let json_path = dir.join(format!("{}.summary.json", self.config.name));
        std::fs::write(&csv_path, self.csv()).map_err(|e| Error::Io(format!("{}: {e}", csv_path.display())))?;
        std::fs::write(&json_path, self.summary_json()).map_err(|e| Error::Io(format!("{}: {e}", json_path.display())))?;
        Ok((csv_path, json_path))
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}
