//! Physical constants (CODATA 2018 exact SI values).

use serde::Serialize;

pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Φ0 = h / 2e.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELECTRON_CHARGE);
/// R_Q = h / (2e)² = Φ0 / 2e.
pub const RESISTANCE_QUANTUM: f64 = FLUX_QUANTUM / (2.0 * ELECTRON_CHARGE);

/// Bundle of the constants, handy for serialization into run reports.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub flux_quantum: f64,
    pub resistance_quantum: f64,
    pub electron_charge: f64,
    pub planck: f64,
    pub hbar: f64,
}

impl Constants {
    pub const SI: Constants = Constants {
        flux_quantum: FLUX_QUANTUM,
        resistance_quantum: RESISTANCE_QUANTUM,
        electron_charge: ELECTRON_CHARGE,
        planck: PLANCK,
        hbar: HBAR,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Self::SI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rq_times_2e_is_flux_quantum() {
        let lhs = RESISTANCE_QUANTUM * 2.0 * ELECTRON_CHARGE;
        assert!((lhs - FLUX_QUANTUM).abs() <= f64::EPSILON * FLUX_QUANTUM);
    }

    #[test]
    fn rq_is_about_6_45_kohm() {
        assert!((RESISTANCE_QUANTUM - 6453.2).abs() < 0.1);
    }
}
