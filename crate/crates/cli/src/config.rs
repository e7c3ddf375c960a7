//! Run configuration: strict TOML with sections `particles`, `interaction`,
//! `channels`, `solver`, `output` and an optional `orbit`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use twobody_core::model::{ChannelKind, Spin};
use twobody_core::units::Units;
use twobody_core::{ChannelSpec, InteractionSpec, Parity, ParticleSpec, SolverSettings};

use crate::ConfigError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParticle {
    pub spin: Spin,
    pub mass: f64,
    #[serde(default = "one")]
    pub kappa: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Particles {
    pub first: RawParticle,
    pub second: RawParticle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interaction {
    pub alpha: f64,
    #[serde(default)]
    pub sigma: f64,
    /// Breit coupling; a non-zero value adds first-order shifts to two-fermion levels.
    #[serde(default)]
    pub g: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub kind: ChannelKind,
    /// Orbital ℓ for SS, total j for SF (half-integer) and FF.
    pub j: f64,
    #[serde(default = "parity_one")]
    pub parity: Parity,
    #[serde(default = "one_level")]
    pub count: usize,
    /// Binding-energy window [lo, hi] in natural units.
    pub bracket: Option<[f64; 2]>,
}

fn parity_one() -> Parity {
    Parity::I
}

fn one_level() -> usize {
    1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub format: Option<Format>,
    pub units: Option<String>,
    pub path: Option<PathBuf>,
    /// MeV per natural energy unit, needed for physical units.
    pub mev_per_unit: Option<f64>,
    /// Include sampled eigenfunctions in JSON output.
    #[serde(default)]
    pub eigenfunctions: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orbit {
    /// Invariant mass λ; alternatively `energy` = λ − m₁ − m₂.
    pub lambda: Option<f64>,
    pub energy: Option<f64>,
    pub l: f64,
    #[serde(default = "samples")]
    pub samples: usize,
    /// Radial window; defaults to the turning points of a bound orbit.
    pub range: Option<[f64; 2]>,
}

fn samples() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub particles: Particles,
    pub interaction: Interaction,
    #[serde(default)]
    pub channels: Vec<Channel>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: Output,
    pub orbit: Option<Orbit>,
}

/// Validated model pieces of a configuration.
#[derive(Debug, Clone)]
pub struct Model {
    pub first: ParticleSpec,
    pub second: ParticleSpec,
    pub interaction: InteractionSpec,
    pub channels: Vec<(ChannelSpec, usize, Option<(f64, f64)>)>,
}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    /// Checks every value before any solve.
    pub fn model(&self) -> anyhow::Result<Model> {
        let particle = |p: &RawParticle, which: &str| {
            ParticleSpec::new(p.mass, p.spin, p.kappa).map_err(|e| config_err(format!("particles.{which}: {e}")))
        };
        let first = particle(&self.particles.first, "first")?;
        let second = particle(&self.particles.second, "second")?;
        let i = &self.interaction;
        let interaction = InteractionSpec::new(i.alpha, i.sigma, i.g).map_err(|e| config_err(format!("interaction: {e}")))?;
        self.solver.validate().map_err(|e| config_err(format!("solver: {e}")))?;
        let mut channels = vec![];
        for (k, c) in self.channels.iter().enumerate() {
            let two_j = 2.0 * c.j;
            if !(two_j >= 0.0 && two_j.fract() == 0.0 && two_j < 1e6) {
                return Err(config_err(format!("channels[{k}]: j = {} is not a non-negative multiple of 1/2", c.j)));
            }
            let spec = ChannelSpec { kind: c.kind, two_j: two_j as u32, parity: c.parity };
            spec.validate(&first, &second).map_err(|e| config_err(format!("channels[{k}]: {e}")))?;
            if c.kind == ChannelKind::ScalarScalar && c.parity != Parity::I {
                return Err(config_err(format!("channels[{k}]: SS channels have parity I only")));
            }
            let bracket = match c.bracket {
                Some([lo, hi]) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                    return Err(config_err(format!("channels[{k}]: bracket needs lo < hi")));
                }
                Some([lo, hi]) => Some((lo, hi)),
                None => None,
            };
            channels.push((spec, c.count, bracket));
        }
        if let Some(m) = self.output.mev_per_unit {
            if !(m.is_finite() && m > 0.0) {
                return Err(config_err("output.mev_per_unit must be positive"));
            }
        }
        Ok(Model { first, second, interaction, channels })
    }

    pub fn units(&self, flag: Option<&str>) -> anyhow::Result<Units> {
        match flag.or(self.output.units.as_deref()) {
            None => Ok(Units::Natural),
            Some(u) => u.parse().map_err(|e: twobody_core::Error| config_err(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[particles]
first = { spin = "scalar", mass = 1.0 }
second = { spin = "scalar", mass = 1.0 }

[interaction]
alpha = 0.0072973525698

[[channels]]
kind = "SS"
j = 0
count = 2
"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::parse(BASE).unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.channels.len(), 1);
        assert_eq!(m.channels[0].1, 2);
        assert_eq!(c.units(None).unwrap(), Units::Natural);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = BASE.replace("alpha =", "alhpa =");
        assert!(RunConfig::parse(&text).unwrap_err().downcast_ref::<ConfigError>().is_some());
        let text = format!("{BASE}\n[solver]\nrtoll = 1e-9\n");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn rejects_invalid_values() {
        let neg = RunConfig::parse(&BASE.replace("mass = 1.0 }\nsecond", "mass = -1.0 }\nsecond")).unwrap();
        assert!(neg.model().is_err());
        let half = RunConfig::parse(&BASE.replace("j = 0", "j = 0.5")).unwrap();
        assert!(half.model().is_err());
        let odd = RunConfig::parse(&BASE.replace("j = 0", "j = 0.3")).unwrap();
        assert!(odd.model().is_err());
    }
}
