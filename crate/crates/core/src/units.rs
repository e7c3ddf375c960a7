//! Energy units and the natural-unit scale.
//!
//! Internally every solve uses a reference mass as the unit of energy.
//! [`EnergyScale`] remembers how many MeV that unit is worth.

use serde::{Deserialize, Serialize};

use crate::constants::H_EV_S;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "natural")]
    Natural,
    #[serde(rename = "MeV")]
    MeV,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "meV")]
    MilliEv,
}

impl Units {
    pub fn label(&self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::MeV => "MeV",
            Units::MHz => "MHz",
            Units::MilliEv => "meV",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Units::Natural),
            "MeV" | "mev" => Ok(Units::MeV),
            "MHz" | "mhz" => Ok(Units::MHz),
            "meV" => Ok(Units::MilliEv),
            other => Err(Error::config(format!("unknown unit '{other}'"))),
        }
    }
}

/// Conversion between natural units (multiples of a reference mass) and physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    /// MeV per natural unit. `None` when the problem is dimensionless.
    pub mev_per_unit: Option<f64>,
}

impl EnergyScale {
    pub fn dimensionless() -> Self {
        Self { mev_per_unit: None }
    }

    pub fn mev(mev_per_unit: f64) -> Self {
        Self { mev_per_unit: Some(mev_per_unit) }
    }

    fn per_mev(units: Units) -> f64 {
        match units {
            Units::Natural | Units::MeV => 1.0,
            // E[MeV] · 1e6 eV/MeV / h[eV s] · 1e-6 MHz/Hz
            Units::MHz => 1.0 / H_EV_S,
            Units::MilliEv => 1e9,
        }
    }

    pub fn convert(&self, natural: f64, units: Units) -> Result<f64> {
        if units == Units::Natural {
            return Ok(natural);
        }
        let scale = self
            .mev_per_unit
            .ok_or_else(|| Error::config(format!("no physical scale for units {}", units.label())))?;
        Ok(natural * scale * Self::per_mev(units))
    }

    pub fn to_natural(&self, value: f64, units: Units) -> Result<f64> {
        if units == Units::Natural {
            return Ok(value);
        }
        let scale = self
            .mev_per_unit
            .ok_or_else(|| Error::config(format!("no physical scale for units {}", units.label())))?;
        Ok(value / Self::per_mev(units) / scale)
    }
}
