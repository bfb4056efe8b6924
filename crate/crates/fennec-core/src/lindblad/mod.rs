//! Quantum model of the gyrator: two anharmonic modes with the flux-charge
//! coupling, driven through lossy ports and evolved with a Lindblad equation
//! over one drive period. Units: ħ = 1, energies are angular frequencies.

mod fock;
mod liouvillian;
mod mapping;
mod propagator;

pub use fock::{hermiticity_defect, sin_poly, FockSystem};
pub use liouvillian::Liouvillian;
pub use mapping::{dressing_factor, mean_field_scattering, network_circuit};
pub use propagator::{
    evolve, extract_scattering, period_propagator, quantum_scattering, rotating_amplitudes,
    spectrum, steady_state, trace_distance, ColumnDiagnostics, PeriodPropagator, QuantumScattering,
    SteadyState,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_SUBSTEPS: usize = 512;
pub const ETA_WARN: f64 = 0.5;

fn default_sin_order() -> usize {
    5
}
fn default_levels() -> usize {
    6
}
fn default_cap() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumGyratorConfig {
    #[serde(alias = "E_C")]
    pub e_c: f64,
    #[serde(alias = "E_L")]
    pub e_l: f64,
    pub g: f64,
    pub kappa: f64,
    /// Incoming photon-flux amplitudes per port.
    pub beta: [C64; 2],
    pub omega_s: f64,
    #[serde(default = "default_sin_order")]
    pub sin_order: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

impl QuantumGyratorConfig {
    pub fn new(e_c: f64, e_l: f64, g: f64, kappa: f64, beta: [C64; 2], omega_s: f64) -> Self {
        QuantumGyratorConfig {
            e_c,
            e_l,
            g,
            kappa,
            beta,
            omega_s,
            sin_order: 5,
            levels: 6,
            cap: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_c", self.e_c),
            ("e_l", self.e_l),
            ("omega_s", self.omega_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be > 0"));
            }
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::param("kappa", "must be >= 0"));
        }
        if !self.g.is_finite() {
            return Err(Error::param("g", "must be finite"));
        }
        if !self.beta.iter().all(|b| b.is_finite()) {
            return Err(Error::param("beta", "must be finite"));
        }
        if self.sin_order % 2 == 0 {
            return Err(Error::param("sin_order", "must be odd"));
        }
        if self.cap == 0 {
            return Err(Error::param("cap", "must be >= 1"));
        }
        if self.levels < self.cap + 1 {
            return Err(Error::param("levels", "must be >= cap + 1"));
        }
        Ok(())
    }

    /// η = (2E_C/(E_L + g²/16E_C))^{1/4}.
    pub fn eta(&self) -> f64 {
        (2.0 * self.e_c / (self.e_l + self.g * self.g / (16.0 * self.e_c))).powf(0.25)
    }

    /// Bare mode frequency √(8E_C E_L).
    pub fn omega0(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.eta() > ETA_WARN {
            w.push(format!(
                "zero-point parameter eta = {:.3} is not small",
                self.eta()
            ));
        }
        w
    }

    pub fn with_beta(mut self, beta: [C64; 2]) -> Self {
        self.beta = beta;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub h: DMatrix<C64>,
    /// Ascending eigenvalues.
    pub energies: DVector<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub states: DMatrix<C64>,
    pub eta: f64,
}

impl Hamiltonian {
    pub fn ground_state(&self) -> DVector<C64> {
        self.states.column(0).into_owned()
    }
}

/// H = Σ_i 4E_C(n̂_i − (−1)^i (g/8E_C) sin φ̂_j)² + E_L φ̂_i²/2 with sin replaced by its
/// Taylor polynomial. Built in a larger Fock space and projected, so that the
/// truncation does not corrupt matrix elements inside the kept basis.
pub fn build_hamiltonian(cfg: &QuantumGyratorConfig) -> Result<(FockSystem, Hamiltonian)> {
    cfg.validate()?;
    let eta = cfg.eta();
    let big_cap = cfg.cap + 2 * cfg.sin_order + 4;
    let big = FockSystem::new(big_cap + 1, big_cap, eta);
    let small = FockSystem::new(cfg.levels, cfg.cap, eta);
    let db = big.dim();
    let mut h = DMatrix::<C64>::zeros(db, db);
    let k = cfg.g / (8.0 * cfg.e_c);
    for i in 0..2 {
        let j = 1 - i;
        let sign = if i == 0 { -1.0 } else { 1.0 };
        let m = &big.n[i] - sin_poly(&big.phi[j], cfg.sin_order) * C64::from(sign * k);
        h += &m * &m * C64::from(4.0 * cfg.e_c)
            + &big.phi[i] * &big.phi[i] * C64::from(cfg.e_l / 2.0);
    }
    let map: Vec<usize> = small
        .basis
        .iter()
        .map(|&(a, b)| big.index_of(a, b).expect("kept state in big basis"))
        .collect();
    let d = small.dim();
    let hs = DMatrix::from_fn(d, d, |r, c| h[(map[r], map[c])]);
    let scale = hs.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    if hermiticity_defect(&hs) > 1e-12 * scale {
        return Err(Error::Domain("Hamiltonian is not Hermitian".into()));
    }
    let hs = (&hs + hs.adjoint()) * C64::from(0.5);
    let eig = hs.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let states = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((
        small,
        Hamiltonian {
            h: hs,
            energies,
            states,
            eta,
        },
    ))
}
