//! Energy unit declarations. Every energy entering the public API carries one.

use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_CHARGE, PLANCK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    /// Joules.
    #[serde(alias = "J")]
    Joule,
    /// h·GHz.
    #[default]
    #[serde(alias = "GHz", alias = "ghz")]
    Ghz,
    /// Electronvolts.
    #[serde(alias = "eV")]
    Ev,
}

impl EnergyUnit {
    pub fn joules_per_unit(self) -> f64 {
        match self {
            EnergyUnit::Joule => 1.0,
            EnergyUnit::Ghz => PLANCK * 1e9,
            EnergyUnit::Ev => ELECTRON_CHARGE,
        }
    }

    pub fn to_si(self, value: f64) -> f64 {
        value * self.joules_per_unit()
    }

    pub fn from_si(self, joules: f64) -> f64 {
        joules / self.joules_per_unit()
    }
}

/// An energy with its declared unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub value: f64,
    pub unit: EnergyUnit,
}

impl Energy {
    pub fn new(value: f64, unit: EnergyUnit) -> Self {
        Self { value, unit }
    }

    pub fn joules(j: f64) -> Self {
        Self::new(j, EnergyUnit::Joule)
    }

    pub fn si(&self) -> f64 {
        self.unit.to_si(self.value)
    }
}
