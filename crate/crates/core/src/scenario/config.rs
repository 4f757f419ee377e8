use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bloch::{from_bloch, BlochState, Vec3};
use crate::dynamics::{
    builtin_channel, Channel, ChannelParams, Dissipator, Drive, DynamicsSpec, Hamiltonian, IntegratorControl,
};
use crate::error::{Error, Result};
use crate::operator::{c, ComplexMatrix, HermitianOperator, Matrix};
use crate::state::DensityMatrix;
use crate::thermo::{AnalysisOptions, DEFAULT_AUDIT_TOL, DEFAULT_DEG_TOL, DEFAULT_FD_STEP, DEFAULT_LEAK_TOL};

/// A matrix entry: either a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// Square matrix given as a flat row-major list of entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixConfig(pub Vec<Entry>);

impl MatrixConfig {
    pub fn from_matrix(m: &Matrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push(if z.im == 0.0 { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) });
            }
        }
        Self(entries)
    }

    pub fn to_matrix(&self, what: &str) -> Result<Matrix> {
        let len = self.0.len();
        let n = (len as f64).sqrt().round() as usize;
        if n * n != len || n < 2 {
            return Err(Error::Config(format!("{what}: {len} entries do not form a square matrix of size >= 2")));
        }
        let values: Vec<_> = self
            .0
            .iter()
            .map(|e| match *e {
                Entry::Real(re) => c(re, 0.0),
                Entry::Complex([re, im]) => c(re, im),
            })
            .collect();
        Ok(Matrix::from_row_slice(n, n, &values))
    }

    fn hermitian(&self, what: &str) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix(what)?).map_err(|e| Error::Config(format!("{what}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub operator: MatrixConfig,
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipatorConfig {
    pub operator: MatrixConfig,
    pub rate: f64,
}

/// Either a built-in channel with parameters, or an explicit generator.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drives: Vec<DriveConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dissipators: Vec<DissipatorConfig>,
}

/// Exactly one of the fields.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixConfig>,
    /// Index of a computational basis state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub integrator: f64,
    pub degeneracy: f64,
    pub leak: f64,
    pub audit: f64,
    /// Allowed gap between the decomposition and the finite-difference reference.
    pub ehrenfest: f64,
    pub fd_step: f64,
    /// Allowed distance to closed-form results where one exists.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integrator: 1e-10,
            degeneracy: DEFAULT_DEG_TOL,
            leak: DEFAULT_LEAK_TOL,
            audit: DEFAULT_AUDIT_TOL,
            ehrenfest: 1e-6,
            fd_step: DEFAULT_FD_STEP,
            oracle: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn analysis(&self) -> AnalysisOptions {
        AnalysisOptions {
            deg_tol: self.degeneracy,
            leak_tol: self.leak,
            audit_tol: self.audit,
        }
    }

    pub fn integrator_control(&self) -> IntegratorControl {
        IntegratorControl::with_tol(self.integrator)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub name: String,
    pub matrix: MatrixConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Number of extra seeded random observables, named `r0`, `r1`, ...
    #[serde(default)]
    pub random_observables: usize,
    pub time: TimeConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub dynamics: DynamicsConfig,
    pub initial_state: StateConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<ObservableConfig>,
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub config: ScenarioConfig,
    pub spec: DynamicsSpec,
    pub channel: Option<(Channel, ChannelParams)>,
    pub rho0: DensityMatrix,
    pub observables: Vec<(String, HermitianOperator)>,
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Applies a `key=value` override. Time keys (`t0`, `t1`, `samples`),
    /// `seed`, Bloch components (`bx`, `by`, `bz`) and channel parameters are
    /// accepted.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<()> {
        let bad = |reason: &str| Error::Config(format!("parameter {key}: {reason}"));
        match key {
            "t0" => self.time.t0 = value,
            "t1" => self.time.t1 = value,
            "samples" | "seed" => {
                if !(value >= 0.0 && value.fract() == 0.0 && value < 2f64.powi(53)) {
                    return Err(bad("must be a non-negative integer"));
                }
                if key == "samples" {
                    self.time.samples = value as usize;
                } else {
                    self.seed = value as u64;
                }
            }
            "bx" | "by" | "bz" => {
                let b = self.initial_state.bloch.as_mut().ok_or_else(|| bad("initial state is not a Bloch vector"))?;
                b[(key.as_bytes()[1] - b'x') as usize] = value;
            }
            _ => {
                let name = self.dynamics.channel.as_deref().ok_or_else(|| bad("unknown parameter"))?;
                let channel: Channel = name.parse()?;
                if !channel.parameters().contains(&key) {
                    return Err(bad(&format!("not a parameter of {channel} (expected one of {:?})", channel.parameters())));
                }
                self.dynamics.params.insert(key.to_string(), value);
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ResolvedScenario> {
        if self.name.is_empty() || !self.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
            return Err(Error::Config(format!("name {:?} must be non-empty and use [A-Za-z0-9_-]", self.name)));
        }
        let t = &self.time;
        if !(t.t1 > t.t0) || !t.t0.is_finite() || !t.t1.is_finite() {
            return Err(Error::Config(format!("time span [{}, {}] is empty or not finite", t.t0, t.t1)));
        }
        if t.samples < 2 {
            return Err(Error::Config("time.samples must be at least 2".into()));
        }
        let tol = &self.tolerances;
        for (k, v) in [
            ("integrator", tol.integrator),
            ("degeneracy", tol.degeneracy),
            ("leak", tol.leak),
            ("audit", tol.audit),
            ("ehrenfest", tol.ehrenfest),
            ("fd_step", tol.fd_step),
            ("oracle", tol.oracle),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerances.{k} must be positive, got {v}")));
            }
        }

        let (spec, channel) = self.build_dynamics()?;
        let dim = spec.dim();
        let rho0 = self.build_state(dim)?;
        let observables = self.build_observables(dim)?;
        Ok(ResolvedScenario {
            config: self.clone(),
            spec,
            channel,
            rho0,
            observables,
        })
    }

    fn build_dynamics(&self) -> Result<(DynamicsSpec, Option<(Channel, ChannelParams)>)> {
        let d = &self.dynamics;
        match (&d.channel, &d.hamiltonian) {
            (Some(name), None) => {
                if !d.drives.is_empty() || !d.dissipators.is_empty() {
                    return Err(Error::Config("built-in channels take no explicit drives or dissipators".into()));
                }
                let channel: Channel = name.parse()?;
                if let Some(k) = d.params.keys().find(|k| !channel.parameters().contains(&k.as_str())) {
                    return Err(Error::Config(format!("{k} is not a parameter of {channel}")));
                }
                let params = ChannelParams(d.params.clone());
                Ok((builtin_channel(channel, &params)?, Some((channel, params))))
            }
            (None, Some(h)) => {
                if !d.params.is_empty() {
                    return Err(Error::Config("dynamics.params only applies to built-in channels".into()));
                }
                let base = h.hermitian("dynamics.hamiltonian")?;
                let drives = d
                    .drives
                    .iter()
                    .enumerate()
                    .map(|(i, dc)| {
                        Ok(Drive {
                            operator: dc.operator.hermitian(&format!("dynamics.drives[{i}]"))?,
                            amplitude: dc.amplitude,
                            frequency: dc.frequency,
                            phase: dc.phase,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let dissipators = d
                    .dissipators
                    .iter()
                    .enumerate()
                    .map(|(i, dc)| {
                        let what = format!("dynamics.dissipators[{i}]");
                        let m = ComplexMatrix::new(dc.operator.to_matrix(&what)?)
                            .map_err(|e| Error::Config(format!("{what}: {e}")))?;
                        Ok(Dissipator::new(m, dc.rate))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let hamiltonian = if drives.is_empty() {
                    Hamiltonian::Static(base)
                } else {
                    Hamiltonian::Driven { base, drives }
                };
                Ok((DynamicsSpec::new(hamiltonian, dissipators)?, None))
            }
            _ => Err(Error::Config("dynamics needs exactly one of `channel` or `hamiltonian`".into())),
        }
    }

    fn build_state(&self, dim: usize) -> Result<DensityMatrix> {
        let s = &self.initial_state;
        match (s.bloch, &s.matrix, s.basis) {
            (Some(b), None, None) => {
                if dim != 2 {
                    return Err(Error::Config(format!("a Bloch vector needs a qubit, the dynamics has dimension {dim}")));
                }
                from_bloch(&BlochState::new(Vec3::new(b[0], b[1], b[2]))?)
            }
            (None, Some(m), None) => {
                let rho = DensityMatrix::new(m.to_matrix("initial_state.matrix")?)
                    .map_err(|e| Error::Config(format!("initial_state.matrix: {e}")))?;
                crate::operator::check_dims(dim, rho.dim())?;
                Ok(rho)
            }
            (None, None, Some(k)) => DensityMatrix::basis_state(dim, k),
            _ => Err(Error::Config("initial_state needs exactly one of `bloch`, `matrix` or `basis`".into())),
        }
    }

    fn build_observables(&self, dim: usize) -> Result<Vec<(String, HermitianOperator)>> {
        let mut out: Vec<(String, HermitianOperator)> = Vec::new();
        for o in &self.observables {
            let op = o.matrix.hermitian(&format!("observable {}", o.name))?;
            crate::operator::check_dims(dim, op.dim())?;
            out.push((o.name.clone(), op));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for k in 0..self.random_observables {
            out.push((format!("r{k}"), crate::random::hermitian(&mut rng, dim, 1.0)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in &out {
            if name.is_empty() || !name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                return Err(Error::Config(format!("observable name {name:?} must use [A-Za-z0-9_]")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Config(format!("duplicate observable name {name}")));
            }
        }
        Ok(out)
    }
}
