use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{Dissipator, Drive, DynamicsSpec, Hamiltonian};
use crate::error::{Error, Result};
use crate::operator::{pauli, ComplexMatrix, HermitianOperator};

/// Built-in qubit channels. All use `H = -eps sigma_z` (plus an optional
/// `sigma_x` drive for [`Channel::Closed`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// `L = sigma_z` at rate `gamma / 2`: coherences decay as `exp(-gamma t)`.
    PureDephasing,
    /// `L = sigma_-` at rate `gamma`.
    AmplitudeDamping,
    /// `sigma_-` at `gamma (nbar + 1)` and `sigma_+` at `gamma nbar`.
    ThermalQubit,
    /// All three Pauli jumps at `gamma / 4`: the Bloch vector shrinks as `exp(-gamma t)`.
    Depolarizing,
    /// No dissipators; `H(t) = -eps sigma_z - A cos(omega t + phi) sigma_x`.
    Closed,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::PureDephasing,
        Channel::AmplitudeDamping,
        Channel::ThermalQubit,
        Channel::Depolarizing,
        Channel::Closed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::PureDephasing => "pure_dephasing",
            Channel::AmplitudeDamping => "amplitude_damping",
            Channel::ThermalQubit => "thermal_qubit",
            Channel::Depolarizing => "depolarizing",
            Channel::Closed => "closed",
        }
    }

    /// Parameters the channel reads.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Channel::PureDephasing | Channel::AmplitudeDamping | Channel::Depolarizing => &["eps", "gamma"],
            Channel::ThermalQubit => &["eps", "gamma", "nbar"],
            Channel::Closed => &["eps", "drive_amplitude", "drive_frequency", "drive_phase"],
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

/// Named real parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelParams(pub BTreeMap<String, f64>);

impl<const N: usize> From<[(&str, f64); N]> for ChannelParams {
    fn from(items: [(&str, f64); N]) -> Self {
        ChannelParams(items.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl ChannelParams {
    fn required(&self, channel: Channel, key: &str) -> Result<f64> {
        let v = *self.0.get(key).ok_or_else(|| Error::MissingParam {
            channel: channel.name().into(),
            param: key.into(),
        })?;
        finite(key, v)
    }

    fn optional(&self, key: &str, default: f64) -> Result<f64> {
        self.0.get(key).map_or(Ok(default), |&v| finite(key, v))
    }

    fn rate(&self, channel: Channel, key: &str) -> Result<f64> {
        let v = self.required(channel, key)?;
        if v < 0.0 {
            return Err(Error::InvalidParam {
                param: key.into(),
                reason: format!("must be non-negative, got {v}"),
            });
        }
        Ok(v)
    }
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParam {
            param: key.into(),
            reason: "must be finite".into(),
        })
    }
}

fn jump(m: crate::operator::Matrix, rate: f64) -> Dissipator {
    Dissipator::new(ComplexMatrix::new(m).expect("Pauli matrices are valid"), rate)
}

/// Builds the named channel. Zero-rate jumps are omitted.
pub fn builtin_channel(channel: Channel, params: &ChannelParams) -> Result<DynamicsSpec> {
    let eps = params.required(channel, "eps")?;
    let h = pauli::field_operator([0.0, 0.0, eps]);
    let mut jumps = Vec::new();
    let hamiltonian = match channel {
        Channel::PureDephasing => {
            let gamma = params.rate(channel, "gamma")?;
            jumps.push(jump(pauli::z(), gamma / 2.0));
            Hamiltonian::Static(h)
        }
        Channel::AmplitudeDamping => {
            let gamma = params.rate(channel, "gamma")?;
            jumps.push(jump(pauli::lowering(), gamma));
            Hamiltonian::Static(h)
        }
        Channel::ThermalQubit => {
            let gamma = params.rate(channel, "gamma")?;
            let nbar = params.rate(channel, "nbar")?;
            jumps.push(jump(pauli::lowering(), gamma * (nbar + 1.0)));
            jumps.push(jump(pauli::raising(), gamma * nbar));
            Hamiltonian::Static(h)
        }
        Channel::Depolarizing => {
            let gamma = params.rate(channel, "gamma")?;
            for p in pauli::all() {
                jumps.push(jump(p, gamma / 4.0));
            }
            Hamiltonian::Static(h)
        }
        Channel::Closed => {
            let amplitude = params.optional("drive_amplitude", 0.0)?;
            let frequency = params.optional("drive_frequency", 2.0 * eps)?;
            let phase = params.optional("drive_phase", 0.0)?;
            if amplitude == 0.0 {
                Hamiltonian::Static(h)
            } else {
                Hamiltonian::Driven {
                    base: h,
                    drives: vec![Drive {
                        operator: HermitianOperator::new(-pauli::x()).expect("Hermitian"),
                        amplitude,
                        frequency,
                        phase,
                    }],
                }
            }
        }
    };
    jumps.retain(|d| d.rate() > 0.0);
    DynamicsSpec::new(hamiltonian, jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    #[test]
    fn pure_dephasing_structure() {
        let spec = builtin_channel(
            Channel::PureDephasing,
            &ChannelParams::from([("eps", 1.0), ("gamma", 0.5)]),
        )
        .unwrap();
        assert!(max_abs_diff(spec.hamiltonian_at(0.0).matrix(), &(-pauli::z())) == 0.0);
        assert_eq!(spec.dissipators().len(), 1);
        assert!(max_abs_diff(spec.dissipators()[0].operator().matrix(), &pauli::z()) == 0.0);
        assert_eq!(spec.dissipators()[0].rate(), 0.25);
    }

    #[test]
    fn closed_has_no_dissipators() {
        let spec = builtin_channel(Channel::Closed, &ChannelParams::from([("eps", 0.7)])).unwrap();
        assert!(spec.dissipators().is_empty());
        assert!(!spec.is_time_dependent());
        let driven = builtin_channel(
            Channel::Closed,
            &ChannelParams::from([("eps", 0.7), ("drive_amplitude", 0.3)]),
        )
        .unwrap();
        assert!(driven.is_time_dependent());
    }

    #[test]
    fn zero_temperature_thermal_is_amplitude_damping() {
        let p = ChannelParams::from([("eps", 1.0), ("gamma", 0.4), ("nbar", 0.0)]);
        let thermal = builtin_channel(Channel::ThermalQubit, &p).unwrap();
        let ad = builtin_channel(Channel::AmplitudeDamping, &p).unwrap();
        assert_eq!(thermal.dissipators(), ad.dissipators());
    }

    #[test]
    fn parse_and_param_errors() {
        assert_eq!(
            "spin_boson".parse::<Channel>(),
            Err(Error::UnknownChannel("spin_boson".into()))
        );
        assert_eq!("depolarizing".parse::<Channel>(), Ok(Channel::Depolarizing));
        assert!(matches!(
            builtin_channel(Channel::PureDephasing, &ChannelParams::from([("eps", 1.0)])),
            Err(Error::MissingParam { .. })
        ));
        assert!(matches!(
            builtin_channel(
                Channel::PureDephasing,
                &ChannelParams::from([("eps", 1.0), ("gamma", -1.0)])
            ),
            Err(Error::InvalidParam { .. })
        ));
    }
}
