//! Seeded randomized property suites. Trial `k` of a run with seed `s` draws
//! from ChaCha8 stream `k` of seed `s`, so any single trial can be replayed.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bloch::{
    coherence_rate_triple, qubit_heat_rate, qubit_power, to_bloch, unit_vector_angular_velocity, BlochState,
    FieldVector, Vec3,
};
use crate::dynamics::{builtin_channel, integrate_sampled, Channel, ChannelParams, Dissipator, Drive, DynamicsSpec, Hamiltonian, IntegratorControl};
use crate::error::{Error, Result};
use crate::operator::{c, pauli, trace_product, ComplexMatrix, HermitianOperator, Matrix, C64};
use crate::random;
use crate::state::{expectation, DensityMatrix};
use crate::thermo::{
    analyze, ehrenfest_rate, heat_rate, power_operator, reconstruct_omega, robertson_check, AnalysisOptions,
    FdStencil, OmegaGenerator, SpectralFrame, DEFAULT_DEG_TOL, DEFAULT_FD_STEP, DEFAULT_LEAK_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Decomposition of `d<O>/dt` against finite differences of the trajectory.
    Ehrenfest,
    /// Heat and work rates under relabeling, rephasing and gauge terms in `Omega`.
    Gauge,
    /// `|<[Omega, O]>| <= 2 sigma_Omega sigma_O`, and saturation for qubits.
    Robertson,
    /// Dense qubit formulas against their Bloch-vector forms.
    OracleEquivalence,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Ehrenfest, Suite::Gauge, Suite::Robertson, Suite::OracleEquivalence];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ehrenfest => "ehrenfest",
            Suite::Gauge => "gauge",
            Suite::Robertson => "robertson",
            Suite::OracleEquivalence => "oracle_equivalence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Largest value of one metric over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Worst {
    pub metric: String,
    pub value: f64,
    pub limit: f64,
    pub trial: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    /// One value per metric, in the order of [`SuiteReport::worst`].
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub first_trial: u64,
    pub trials: u64,
    pub failed_trials: Vec<u64>,
    pub worst: Vec<Worst>,
    /// Command replaying the whole run.
    pub reproduce: String,
    /// Commands replaying each failed trial on its own.
    pub reproduce_failures: Vec<String>,
    pub results: Vec<TrialResult>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Stream `trial` of `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

struct Tracker {
    worst: Vec<Worst>,
    failed: Vec<u64>,
}

impl Tracker {
    fn new(metrics: &[(&str, f64)]) -> Self {
        Self {
            worst: metrics
                .iter()
                .map(|&(m, limit)| Worst {
                    metric: m.into(),
                    value: 0.0,
                    limit,
                    trial: None,
                })
                .collect(),
            failed: Vec::new(),
        }
    }

    /// Records `values` (one per metric) for `trial`; returns whether all are within limits.
    fn record(&mut self, trial: u64, values: &[f64]) -> bool {
        let mut bad = false;
        for (w, &v) in self.worst.iter_mut().zip(values) {
            if !(v <= w.limit) {
                bad = true;
            }
            if !(v <= w.value) || w.trial.is_none() {
                w.value = if v.is_nan() { f64::INFINITY } else { v.max(w.value) };
                w.trial = Some(trial);
            }
        }
        if bad {
            self.failed.push(trial);
        }
        !bad
    }
}

/// Runs trials `trials.start..trials.end` of `suite` with `seed`.
pub fn run_suite(suite: Suite, seed: u64, trials: std::ops::Range<u64>) -> SuiteReport {
    let metrics: &[(&str, f64)] = match suite {
        Suite::Ehrenfest => &[("fd_residual", 1e-6), ("richardson_residual", 1e-6)],
        Suite::Gauge => &[("heat_rate_change", 1e-10), ("work_rate_change", 1e-10)],
        Suite::Robertson => &[("violation", 0.0), ("saturation_error", 1e-12)],
        Suite::OracleEquivalence => &[("coherence_error", 1e-12), ("heat_rate_error", 1e-8), ("power_error", 1e-8)],
    };
    let mut tracker = Tracker::new(metrics);
    let mut results = Vec::new();
    for trial in trials.clone() {
        let mut rng = trial_rng(seed, trial);
        let outcome = match suite {
            Suite::Ehrenfest => ehrenfest_trial(&mut rng, trial),
            Suite::Gauge => gauge_trial(&mut rng),
            Suite::Robertson => robertson_trial(&mut rng),
            Suite::OracleEquivalence => oracle_trial(&mut rng),
        };
        results.push(match outcome {
            Ok(values) => TrialResult {
                trial,
                pass: tracker.record(trial, &values),
                values,
                error: None,
            },
            Err(e) => {
                tracker.failed.push(trial);
                TrialResult {
                    trial,
                    values: Vec::new(),
                    error: Some(e.to_string()),
                    pass: false,
                }
            }
        });
    }
    let name = suite.name();
    let count = trials.end.saturating_sub(trials.start);
    let reproduce = if trials.start == 0 {
        format!("ehrenfest suite {name} --seed {seed} --trials {count}")
    } else {
        format!("ehrenfest suite {name} --seed {seed} --trials {count} --first-trial {}", trials.start)
    };
    SuiteReport {
        suite: name.into(),
        seed,
        first_trial: trials.start,
        trials: count,
        pass: tracker.failed.is_empty(),
        reproduce_failures: tracker
            .failed
            .iter()
            .map(|k| format!("ehrenfest suite {name} --seed {seed} --trials 1 --first-trial {k}"))
            .collect(),
        failed_trials: tracker.failed,
        worst: tracker.worst,
        reproduce,
        results,
    }
}

fn random_dim<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(2..=4)
}

fn traceless(a: &HermitianOperator) -> Matrix {
    let n = a.dim();
    let shift = a.matrix().trace() / c(n as f64, 0.0);
    a.matrix() - Matrix::identity(n, n) * shift
}

/// Random driven GKLS generator with one or two jump operators.
pub fn random_dynamics<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DynamicsSpec {
    let base = random::hermitian(rng, dim, 1.0);
    let drive = Drive {
        operator: random::hermitian(rng, dim, 0.5),
        amplitude: rng.random_range(0.0..1.0),
        frequency: rng.random_range(0.5..2.0),
        phase: rng.random_range(0.0..std::f64::consts::TAU),
    };
    let jumps = (0..rng.random_range(1..=2))
        .map(|_| {
            let l = random::complex_gaussian_matrix(rng, dim) * c(1.0 / (dim as f64).sqrt(), 0.0);
            Dissipator::new(ComplexMatrix::new(l).expect("finite"), rng.random_range(0.05..0.5))
        })
        .collect();
    DynamicsSpec::new(Hamiltonian::Driven { base, drives: vec![drive] }, jumps).expect("valid by construction")
}

/// Trials cycle through the built-in qubit channels with random parameters
/// and states, then a random generator in dimension 2 to 4.
fn ehrenfest_trial(rng: &mut ChaCha8Rng, trial: u64) -> Result<Vec<f64>> {
    const CASES: [Option<Channel>; 6] = [
        Some(Channel::PureDephasing),
        Some(Channel::AmplitudeDamping),
        Some(Channel::ThermalQubit),
        Some(Channel::Depolarizing),
        Some(Channel::Closed),
        None,
    ];
    let (spec, rho0) = match CASES[(trial % CASES.len() as u64) as usize] {
        Some(channel) => {
            let params = ChannelParams::from([
                ("eps", rng.random_range(0.5..1.5)),
                ("gamma", rng.random_range(0.1..1.0)),
                ("nbar", rng.random_range(0.0..1.0)),
                ("drive_amplitude", rng.random_range(0.1..0.5)),
                ("drive_phase", rng.random_range(0.0..std::f64::consts::TAU)),
            ]);
            let norm = rng.random_range(0.3..0.95);
            let b = BlochState::new(Vec3::from(random::vector3(rng, norm)))?;
            (builtin_channel(channel, &params)?, crate::bloch::from_bloch(&b)?)
        }
        None => {
            let dim = random_dim(rng);
            (random_dynamics(rng, dim), random::density(rng, dim))
        }
    };
    let dim = spec.dim();
    let observables: Vec<_> = (0..3).map(|_| random::hermitian(rng, dim, 1.0)).collect();
    let traj = integrate_sampled(&spec, &rho0, &[0.0, 0.25, 0.5], IntegratorControl::with_tol(1e-10))?;
    let (mut coarse, mut rich): (f64, f64) = (0.0, 0.0);
    for s in analyze(&traj, &AnalysisOptions::default())? {
        let stencil = FdStencil::new(&spec, s.t, s.rho.matrix(), DEFAULT_FD_STEP);
        for o in &observables {
            let d = ehrenfest_rate(&s.frame, &s.omega, o, None, &s.rho)?;
            let fd = stencil.rate(|_, rho| trace_product(rho, o.matrix()).re);
            coarse = coarse.max((d.total - fd.coarse).abs());
            rich = rich.max((d.total - fd.richardson).abs());
        }
        let d = ehrenfest_rate(&s.frame, &s.omega, &s.hamiltonian, Some(&s.hamiltonian_rate), &s.rho)?;
        let fd = stencil.rate(|t, rho| trace_product(rho, spec.hamiltonian_at(t).matrix()).re);
        coarse = coarse.max((d.total - fd.coarse).abs());
        rich = rich.max((d.total - fd.richardson).abs());
    }
    Ok(vec![coarse, rich])
}

/// A state and generator output, with a doubly degenerate pair in about
/// half the draws. Inside a degenerate block `rho_dot` is a multiple of the
/// identity so that every orthonormal basis of the block is an eigenbasis
/// along the motion.
fn gauge_instance(rng: &mut ChaCha8Rng, dim: usize) -> (Vec<f64>, Matrix, Matrix) {
    let mut weights = random::simplex(rng, dim, 0.02);
    let degenerate = dim >= 3 && rng.random_bool(0.5);
    if degenerate {
        let m = 0.5 * (weights[0] + weights[1]);
        weights[0] = m;
        weights[1] = m;
    }
    let u = random::unitary(rng, dim);
    let mut x = traceless(&random::hermitian(rng, dim, 0.3));
    if degenerate {
        let avg = (x[(0, 0)] + x[(1, 1)]) * c(0.5, 0.0);
        x[(0, 0)] = avg;
        x[(1, 1)] = avg;
        x[(0, 1)] = c(0.0, 0.0);
        x[(1, 0)] = c(0.0, 0.0);
    }
    let rho_dot = &u * x * u.adjoint();
    (weights, u, rho_dot)
}

fn rates(frame: &SpectralFrame, omega: &OmegaGenerator, h: &HermitianOperator, dh: &HermitianOperator, rho: &DensityMatrix) -> Result<(f64, f64)> {
    let q = heat_rate(frame, h)?;
    let w = expectation(rho, &power_operator(omega, h, dh)?)?;
    Ok((q, w))
}

fn gauge_trial(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dim = random_dim(rng);
    let (weights, u, rho_dot) = gauge_instance(rng, dim);
    let rho = random::density_with_spectrum(&weights, &u);
    let h = random::hermitian(rng, dim, 1.0);
    let dh = random::hermitian(rng, dim, 0.5);

    let frame = SpectralFrame::new(0.0, &rho, &rho_dot, None, DEFAULT_DEG_TOL)?;
    let omega = reconstruct_omega(&frame, &rho_dot, DEFAULT_DEG_TOL, DEFAULT_LEAK_TOL)?;
    let (q0, w0) = rates(&frame, &omega, &h, &dh, &rho)?;

    // Relabel, rephase and rotate inside degenerate blocks.
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut vectors = Matrix::zeros(dim, dim);
    let mut values = vec![0.0; dim];
    for (new, &old) in order.iter().enumerate() {
        let phase = random::phase(rng);
        vectors.set_column(new, &(frame.eigenvectors.column(old) * phase));
        values[new] = frame.eigenvalues[old];
    }
    let rotated = SpectralFrame::from_basis(0.0, values.clone(), vectors.clone(), &rho_dot, DEFAULT_DEG_TOL)?;
    for block in rotated.degeneracy_blocks.clone().iter().filter(|b| b.len() > 1) {
        let r = random::unitary(rng, block.len());
        let cols: Vec<_> = block.iter().map(|&j| vectors.column(j).clone_owned()).collect();
        for (a, &j) in block.iter().enumerate() {
            let mut col = DVector::<C64>::zeros(dim);
            for (b, v) in cols.iter().enumerate() {
                col += v * r[(b, a)];
            }
            vectors.set_column(j, &col);
        }
    }
    let rotated = SpectralFrame::from_basis(0.0, values, vectors, &rho_dot, DEFAULT_DEG_TOL)?;
    let base = reconstruct_omega(&rotated, &rho_dot, DEFAULT_DEG_TOL, DEFAULT_LEAK_TOL)?;

    // Gauge terms that commute with rho: diagonal phases and block-internal rotations.
    let mut g = Matrix::zeros(dim, dim);
    for j in 0..dim {
        g[(j, j)] = c(rng.random_range(-2.0..2.0), 0.0);
    }
    for block in rotated.degeneracy_blocks.iter().filter(|b| b.len() > 1) {
        let x = random::hermitian(rng, block.len(), 1.0);
        for (a, &j) in block.iter().enumerate() {
            for (b, &k) in block.iter().enumerate() {
                g[(j, k)] += x.matrix()[(a, b)];
            }
        }
    }
    let shifted = HermitianOperator::new(base.matrix.matrix() + rotated.from_eigenbasis(&g))?;
    let shifted = OmegaGenerator::from_operator(shifted);
    let (q1, w1) = rates(&rotated, &shifted, &h, &dh, &rho)?;
    Ok(vec![(q1 - q0).abs(), (w1 - w0).abs()])
}

fn robertson_trial(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dim = random_dim(rng);
    let rho = random::density(rng, dim);
    let omega = if rng.random_bool(0.5) {
        OmegaGenerator::from_operator(random::hermitian(rng, dim, 1.0))
    } else {
        let rho_dot = traceless(&random::hermitian(rng, dim, 0.3));
        let frame = SpectralFrame::new(0.0, &rho, &rho_dot, None, DEFAULT_DEG_TOL)?;
        reconstruct_omega(&frame, &rho_dot, DEFAULT_DEG_TOL, DEFAULT_LEAK_TOL)?
    };
    let o = random::hermitian(rng, dim, 1.0);
    let check = robertson_check(&rho, &omega, &o)?;
    let violation = (check.lhs - check.rhs).max(0.0);

    // Mutually orthogonal B, o and w: |<[Omega, O]>| = 2 |w||o||B|.
    let e0 = Vec3::from(random::vector3(rng, 1.0));
    let r = Vec3::from(random::vector3(rng, 1.0));
    let e1 = (r - e0 * e0.dot(&r)).normalize();
    let e2 = e0.cross(&e1);
    let (nb, no, nw) = (rng.random_range(0.0..1.0), rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
    let b = BlochState::new(e0 * nb)?;
    let (ov, wv) = (FieldVector(e1 * no), FieldVector(e2 * nw));
    let qubit = crate::bloch::from_bloch(&b)?;
    let box_check = robertson_check(&qubit, &OmegaGenerator::from_operator(wv.to_operator()), &ov.to_operator())?;
    let saturation_error = (box_check.lhs - 2.0 * nw * no * nb).abs();
    Ok(vec![violation, saturation_error])
}

fn oracle_trial(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let norm = rng.random_range(0.05..0.999);
    let b = BlochState::new(Vec3::from(random::vector3(rng, norm)))?;
    let rho = crate::bloch::from_bloch(&b)?;
    let (o, w, v) = (
        FieldVector(Vec3::from(random::vector3(rng, 1.0)) * rng.random_range(0.1..2.0)),
        FieldVector(Vec3::from(random::vector3(rng, 1.0)) * rng.random_range(0.1..2.0)),
        FieldVector(Vec3::from(random::vector3(rng, 1.0)) * rng.random_range(0.1..2.0)),
    );
    let dense = crate::thermo::cyclic_coherence_forms(&rho, &OmegaGenerator::from_operator(w.to_operator()), &o.to_operator())?;
    let coherence_error = ((C64::i() * dense[0]).re - coherence_rate_triple(&b, &o, &w)).abs();

    // Random motion of the state: rho_dot = b_dot.sigma / 2.
    let speed = rng.random_range(0.01..1.0);
    let b_dot = Vec3::from(random::vector3(rng, speed));
    let rho_dot = pauli::dot([b_dot.x, b_dot.y, b_dot.z]) * c(0.5, 0.0);
    let frame = SpectralFrame::new(0.0, &rho, &rho_dot, None, DEFAULT_DEG_TOL)?;
    let omega = reconstruct_omega(&frame, &rho_dot, DEFAULT_DEG_TOL, DEFAULT_LEAK_TOL)?;
    let h = v.to_operator();
    let heat_error = (heat_rate(&frame, &h)? - qubit_heat_rate(&b, &b_dot, &v)?).abs();
    let dense_power = expectation(&rho, &power_operator(&omega, &h, &HermitianOperator::zeros(2)?)?)?;
    let angular = unit_vector_angular_velocity(&b, &b_dot)?;
    let power_error = (dense_power - qubit_power(&b, &v, &angular)).abs();
    debug_assert!((to_bloch(&rho)?.vector() - b.vector()).norm() < 1e-12);
    Ok(vec![coherence_error, heat_error, power_error])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("x".parse::<Suite>().is_err());
    }

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = trial_rng(1, 0).random();
        let b: u64 = trial_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(1, 0).random::<u64>());
    }

    #[test]
    fn small_runs_pass() {
        for s in Suite::ALL {
            let report = run_suite(s, 5, 0..12);
            assert!(report.pass, "{report:?}");
            assert_eq!(report, run_suite(s, 5, 0..12));
            let single = run_suite(s, 5, 7..8);
            assert_eq!(single.results[0], report.results[7]);
        }
    }

    #[test]
    fn tracker_flags_failures() {
        let mut t = Tracker::new(&[("m", 1.0)]);
        t.record(0, &[0.5]);
        t.record(1, &[2.0]);
        t.record(2, &[f64::NAN]);
        assert_eq!(t.failed, [1, 2]);
        assert_eq!(t.worst[0].value, f64::INFINITY);
        assert_eq!(t.worst[0].trial, Some(2));
    }
}
