//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use ehrenfest::bloch::{qubit_heat_rate, to_bloch, FieldVector, Vec3};
use ehrenfest::dynamics::{integrate, integrate_sampled, uniform_times, IntegratorControl};
use ehrenfest::operator::{max_abs_diff, pauli, trace_product};
use ehrenfest::scenario::{preset, run_scenario, ScenarioConfig, PRESETS};
use ehrenfest::suite::{random_dynamics, run_suite, Suite};
use ehrenfest::thermo::{analyze, heat_rate, AnalysisOptions};
use ehrenfest::{expectation, random, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn dephasing_heat() -> Result<Outcome> {
    let start = Instant::now();
    let report = run_scenario(&preset("dephasing")?)?;
    let secs = start.elapsed().as_secs_f64();
    let s = &report.summary;
    let q = 0.5 * 2f64.ln();
    let rel = (s.heat - q).abs() / q;
    let w_err = (s.work + s.heat).abs();
    let pass = rel <= 1e-4 && w_err <= 1e-4 && s.delta_energy.abs() <= 1e-6 && secs < 5.0;
    outcome(
        pass,
        format!(
            "Q = {:.9} (rel err {rel:.2e}), |W + Q| = {w_err:.2e}, |dE| = {:.2e}, {secs:.2} s",
            s.heat,
            s.delta_energy.abs()
        ),
    )
}

fn ehrenfest_identity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (k, name) in ["dephasing", "amplitude_damping", "thermal_relaxation", "closed_rabi"].iter().enumerate() {
        let mut cfg: ScenarioConfig = preset(name)?;
        cfg.random_observables = 3;
        cfg.seed = 100 + k as u64;
        let report = run_scenario(&cfg)?;
        let m = report.rows.iter().map(|r| r.fd_residual).fold(0.0, f64::max);
        worst = worst.max(m);
        parts.push(format!("{name} {m:.1e}"));
    }
    outcome(worst <= 1e-6, format!("max |decomposition - fd| = {worst:.2e} ({})", parts.join(", ")))
}

fn first_law() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for name in PRESETS {
        let report = run_scenario(&preset(name)?)?;
        worst = worst.max(report.summary.max_first_law_residual);
    }
    outcome(worst <= 1e-7, format!("max |dE/dt - Q_dot - W_dot| = {worst:.2e} over {} presets", PRESETS.len()))
}

fn unitary_reduction() -> Result<Outcome> {
    let opts = AnalysisOptions::default();
    let (mut lam, mut q, mut w): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut check = |traj: &ehrenfest::dynamics::Trajectory| -> Result<()> {
        let samples = analyze(traj, &opts)?;
        let records = ehrenfest::thermo::thermo_records(&samples, &opts)?;
        for (s, r) in samples.iter().zip(&records) {
            lam = s.frame.lambda_dot.iter().fold(lam, |m, l| m.max(l.abs()));
            q = q.max(r.heat_rate.abs());
            w = w.max((r.work_rate - expectation(&s.rho, &s.hamiltonian_rate)?).abs());
        }
        Ok(())
    };
    let cfg = preset("closed_rabi")?;
    let resolved = cfg.resolve()?;
    let times = uniform_times(cfg.time.t0, cfg.time.t1, cfg.time.samples);
    check(&integrate_sampled(&resolved.spec, &resolved.rho0, &times, cfg.tolerances.integrator_control())?)?;
    // Closed driven systems in higher dimension as well.
    for (dim, seed) in [(3usize, 1u64), (4, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random::hermitian(&mut rng, dim, 1.0);
        let drive = ehrenfest::dynamics::Drive {
            operator: random::hermitian(&mut rng, dim, 0.5),
            amplitude: 0.6,
            frequency: 1.7,
            phase: 0.3,
        };
        let spec = ehrenfest::dynamics::DynamicsSpec::new(
            ehrenfest::dynamics::Hamiltonian::Driven { base, drives: vec![drive] },
            vec![],
        )?;
        let rho0 = random::density(&mut rng, dim);
        check(&integrate_sampled(&spec, &rho0, &uniform_times(0.0, 5.0, 201), IntegratorControl::with_tol(1e-10))?)?;
    }
    outcome(
        lam <= 1e-9 && q <= 1e-9 && w <= 1e-8,
        format!("max |lambda_dot| = {lam:.2e}, max |Q_dot| = {q:.2e}, max |W_dot - <dH/dt>| = {w:.2e}"),
    )
}

fn worst_line(report: &ehrenfest::suite::SuiteReport) -> String {
    report
        .worst
        .iter()
        .map(|w| format!("{} {:.2e}", w.metric, w.value))
        .collect::<Vec<_>>()
        .join(", ")
}

fn gauge() -> Result<Outcome> {
    let report = run_suite(Suite::Gauge, 2024, 0..100);
    outcome(report.pass, format!("100 trials, {} failed; {}", report.failed_trials.len(), worst_line(&report)))
}

fn qubit_oracles() -> Result<Outcome> {
    let report = run_suite(Suite::OracleEquivalence, 2024, 0..1000);
    let coherence = report.worst[0].value;

    // Heat rate along integrated qubit trajectories, with Ḃ from the exact generator.
    let mut heat_err: f64 = 0.0;
    for name in ["dephasing", "amplitude_damping", "thermal_relaxation", "depolarizing"] {
        let cfg = preset(name)?;
        let resolved = cfg.resolve()?;
        let times = uniform_times(cfg.time.t0, cfg.time.t1, 201);
        let traj = integrate_sampled(&resolved.spec, &resolved.rho0, &times, cfg.tolerances.integrator_control())?;
        for s in analyze(&traj, &cfg.tolerances.analysis())? {
            let b = to_bloch(&s.rho)?;
            let [x, y, z] = pauli::all().map(|p| trace_product(&s.rho_dot, &p).re);
            let v = FieldVector::of_operator(&s.hamiltonian)?;
            let oracle = qubit_heat_rate(&b, &Vec3::new(x, y, z), &v)?;
            heat_err = heat_err.max((heat_rate(&s.frame, &s.hamiltonian)? - oracle).abs());
        }
    }
    outcome(
        coherence <= 1e-12 && heat_err <= 1e-8,
        format!("coherence power err {coherence:.2e} over 1000 configurations, heat rate err {heat_err:.2e} along 4 trajectories"),
    )
}

fn robertson() -> Result<Outcome> {
    let report = run_suite(Suite::Robertson, 2024, 0..1000);
    let violations = report.results.iter().filter(|r| r.values.first().is_none_or(|v| *v > 0.0)).count();
    let saturation = report.worst[1].value;
    outcome(
        report.pass && violations == 0 && saturation <= 1e-12,
        format!("1000 trials, {violations} violations, box saturation err {saturation:.2e}"),
    )
}

fn integrator_order() -> Result<Outcome> {
    let nominal = 10f64.powf(0.8);
    let mut ratios = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for dim in [2usize, 3, 4] {
        let spec = random_dynamics(&mut rng, dim);
        let rho0 = random::density(&mut rng, dim);
        let end = |tol: f64| -> Result<ehrenfest::Matrix> {
            Ok(integrate(&spec, &rho0, (0.0, 5.0), IntegratorControl::with_tol(tol))?.last().matrix().clone())
        };
        let reference = end(1e-12)?;
        let coarse = max_abs_diff(&end(1e-6)?, &reference);
        let fine = max_abs_diff(&end(1e-7)?, &reference);
        ratios.push(coarse / fine);
    }
    let pass = ratios.iter().all(|r| *r >= nominal / 3.0 && *r <= nominal * 3.0);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    outcome(pass, format!("error ratios for 10x tighter tol: [{}], nominal {nominal:.2}", shown.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("dephasing heat", dephasing_heat),
        ("ehrenfest identity", ehrenfest_identity),
        ("first law", first_law),
        ("unitary reduction", unitary_reduction),
        ("gauge invariance", gauge),
        ("qubit oracles", qubit_oracles),
        ("robertson bound", robertson),
        ("integrator order", integrator_order),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} {}. {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
