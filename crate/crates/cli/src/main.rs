use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ehrenfest::scenario::{preset, run_scenario, ScenarioConfig};
use ehrenfest::suite::{run_suite, Suite};
use log::info;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Heat, work and coherence bookkeeping for open quantum systems.
#[derive(Parser)]
#[command(name = "ehrenfest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a TOML file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in scenario.
    Preset {
        /// One of dephasing, amplitude_damping, thermal_relaxation, depolarizing, closed_rabi.
        name: String,
        /// Override a parameter, e.g. `--param gamma=0.2` or `--param t1=10`.
        #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        /// Print the resolved configuration as TOML instead of running it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a randomized property suite.
    Suite {
        /// One of ehrenfest, gauge, robertson, oracle_equivalence.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Index of the first trial; with `--trials 1` this replays one trial.
        #[arg(long, default_value_t = 0)]
        first_trial: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    tol_integrator: Option<f64>,
    #[arg(long)]
    tol_audit: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

enum Failure {
    Config(String),
    Run(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, common } => {
            ScenarioConfig::from_path(&config).map_err(|e| Failure::Config(e.to_string())).and_then(|cfg| scenario(cfg, &common))
        }
        Command::Preset {
            name,
            params,
            print_config,
            common,
        } => preset_command(&name, &params, print_config, &common),
        Command::Suite {
            name,
            seed,
            trials,
            first_trial,
            out_dir,
        } => suite(&name, seed, trials, first_trial, &out_dir),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn preset_command(name: &str, params: &[(String, f64)], print_config: bool, common: &Common) -> Result<bool, Failure> {
    let config_err = |e: ehrenfest::Error| Failure::Config(e.to_string());
    let mut cfg = preset(name).map_err(config_err)?;
    for (k, v) in params {
        cfg.set_param(k, *v).map_err(config_err)?;
    }
    if print_config {
        apply_overrides(&mut cfg, common);
        print!("{}", cfg.to_toml_string().map_err(config_err)?);
        return Ok(true);
    }
    scenario(cfg, common)
}

fn apply_overrides(cfg: &mut ScenarioConfig, common: &Common) {
    if let Some(t) = common.tol_integrator {
        cfg.tolerances.integrator = t;
    }
    if let Some(t) = common.tol_audit {
        cfg.tolerances.audit = t;
    }
    if let Some(n) = common.samples {
        cfg.time.samples = n;
    }
}

fn scenario(mut cfg: ScenarioConfig, common: &Common) -> Result<bool, Failure> {
    apply_overrides(&mut cfg, common);
    cfg.resolve().map_err(|e| Failure::Config(e.to_string()))?;
    let start = Instant::now();
    let report = run_scenario(&cfg).map_err(|e| Failure::Run(e.to_string()))?;
    info!("{} finished in {:.3} s", cfg.name, start.elapsed().as_secs_f64());
    let (csv, json) = report.write(&common.out_dir).map_err(|e| Failure::Run(e.to_string()))?;
    let s = &report.summary;
    println!("{}: Q = {:.9}  W = {:.9}  dE = {:.3e}  dS = {:.9}", s.name, s.heat, s.work, s.delta_energy, s.delta_entropy);
    println!(
        "max first-law residual {:.3e}, max finite-difference residual {:.3e}",
        s.max_first_law_residual, s.max_fd_residual
    );
    println!("wrote {} and {}", csv.display(), json.display());
    for f in &s.failures {
        eprintln!("FAIL: {f}");
    }
    println!("{}", if s.pass { "PASS" } else { "FAIL" });
    Ok(s.pass)
}

fn suite(name: &str, seed: u64, trials: u64, first_trial: u64, out_dir: &Path) -> Result<bool, Failure> {
    let kind: Suite = name.parse().map_err(|e: ehrenfest::Error| Failure::Config(e.to_string()))?;
    if trials == 0 {
        return Err(Failure::Config("--trials must be at least 1".into()));
    }
    let end = first_trial
        .checked_add(trials)
        .ok_or_else(|| Failure::Config("trial range overflows".into()))?;
    let report = run_suite(kind, seed, first_trial..end);
    std::fs::create_dir_all(out_dir).map_err(|e| Failure::Run(format!("{}: {e}", out_dir.display())))?;
    let path = if first_trial == 0 {
        out_dir.join(format!("suite_{name}_seed{seed}.json"))
    } else {
        out_dir.join(format!("suite_{name}_seed{seed}_from{first_trial}.json"))
    };
    let text = report.to_json();
    std::fs::write(&path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    println!("{name}: {} trials, {} failed", report.trials, report.failed_trials.len());
    for w in &report.worst {
        let at = w.trial.map_or(String::new(), |t| format!(" (trial {t})"));
        println!("  worst {} = {:.3e}, limit {:.1e}{at}", w.metric, w.value, w.limit);
    }
    println!("wrote {}", path.display());
    for cmd in report.reproduce_failures.iter().take(10) {
        eprintln!("reproduce: {cmd}");
    }
    println!("{}", if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}
