use std::collections::BTreeMap;

use super::config::{DynamicsConfig, MatrixConfig, ObservableConfig, ScenarioConfig, StateConfig, TimeConfig, Tolerances};
use crate::error::{Error, Result};
use crate::operator::pauli;

pub const PRESETS: [&str; 5] = ["dephasing", "amplitude_damping", "thermal_relaxation", "depolarizing", "closed_rabi"];

fn pauli_observables() -> Vec<ObservableConfig> {
    [("sx", pauli::x()), ("sy", pauli::y()), ("sz", pauli::z())]
        .into_iter()
        .map(|(name, m)| ObservableConfig {
            name: name.into(),
            matrix: MatrixConfig::from_matrix(&m),
        })
        .collect()
}

fn qubit(name: &str, channel: &str, params: &[(&str, f64)], bloch: [f64; 3], t1: f64, samples: usize) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        seed: 0,
        random_observables: 0,
        time: TimeConfig { t0: 0.0, t1, samples },
        tolerances: Tolerances::default(),
        dynamics: DynamicsConfig {
            channel: Some(channel.into()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            ..Default::default()
        },
        initial_state: StateConfig {
            bloch: Some(bloch),
            ..Default::default()
        },
        observables: pauli_observables(),
    }
}

/// Built-in scenario by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    Ok(match name {
        // Pure initial state with b_z = 1/2: the total heat is ln(2)/2.
        "dephasing" => qubit(
            name,
            "pure_dephasing",
            &[("eps", 1.0), ("gamma", 0.5)],
            [0.75f64.sqrt(), 0.0, 0.5],
            30.0,
            3001,
        ),
        "amplitude_damping" => qubit(
            name,
            "amplitude_damping",
            &[("eps", 1.0), ("gamma", 0.3)],
            [0.8, 0.0, 0.2],
            10.0,
            1001,
        ),
        "thermal_relaxation" => qubit(
            name,
            "thermal_qubit",
            &[("eps", 1.0), ("gamma", 0.4), ("nbar", 0.5)],
            [0.0, 0.0, -0.6],
            10.0,
            1001,
        ),
        "depolarizing" => qubit(
            name,
            "depolarizing",
            &[("eps", 1.0), ("gamma", 0.2)],
            [0.5, 0.3, 0.6],
            8.0,
            801,
        ),
        "closed_rabi" => qubit(
            name,
            "closed",
            &[("eps", 1.0), ("drive_amplitude", 0.2), ("drive_frequency", 2.0)],
            [0.0, 0.0, 0.9],
            10.0,
            1001,
        ),
        _ => {
            return Err(Error::Config(format!("unknown preset {name:?}, expected one of {PRESETS:?}")));
        }
    })
}
