use super::QuantumGyratorConfig;
use crate::constants::{ELECTRON_CHARGE, HBAR};
use crate::error::Result;
use crate::linalg::{id2, inv2, sigma_y, I, M2};
use crate::network::GyratorCircuit;

/// e^{−η²/2}: the coupling seen by the linear response is dressed by the
/// zero-point spread of the flux in sin φ̂.
pub fn dressing_factor(cfg: &QuantumGyratorConfig) -> f64 {
    (-cfg.eta().powi(2) / 2.0).exp()
}

/// Equivalent linear circuit, reading energies as angular frequencies in rad/s:
/// C0 = e²/2ħE_C, L0 = ħ/(4e²E_L), Z_TL = 1/(κC0), G = 2C0·g·e^{−η²/2}.
/// The sign follows from the (−1)^i convention of the Hamiltonian coupling.
pub fn network_circuit(cfg: &QuantumGyratorConfig) -> GyratorCircuit {
    let e2 = ELECTRON_CHARGE * ELECTRON_CHARGE;
    let c0 = e2 / (2.0 * HBAR * cfg.e_c);
    let l0 = HBAR / (4.0 * e2 * cfg.e_l);
    GyratorCircuit {
        l0,
        c0,
        lc: 0.0,
        z_tl: 1.0 / (cfg.kappa * c0),
        g: 2.0 * c0 * cfg.g * dressing_factor(cfg),
        disorder: Default::default(),
    }
}

/// Mean-field S at ω_s from Z/Z_TL = y⁻¹, y = (i/κ)(ω − ω0²/ω) + i(2g e^{−η²/2}/κ)σ_y.
/// Evaluated as (1 − y)⁻¹(1 + y), which stays regular where y is singular.
pub fn mean_field_scattering(cfg: &QuantumGyratorConfig) -> Result<M2> {
    cfg.validate()?;
    let w = cfg.omega_s;
    let w0 = cfg.omega0();
    let y = id2() * (I * ((w - w0 * w0 / w) / cfg.kappa))
        + sigma_y() * (I * (2.0 * cfg.g * dressing_factor(cfg) / cfg.kappa));
    Ok(inv2(&(id2() - y), 1e-14)? * (id2() + y))
}
