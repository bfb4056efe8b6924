//! Flux-charge coupling strength, the two-arm gyrator conductance with its
//! photon-number compression, noise sensitivities, and the junction's
//! quadratic Lagrangian coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{FLUX_QUANTUM, RESISTANCE_QUANTUM};
use crate::error::{Error, Result};
use crate::junction::JunctionSpec;

/// Operating point of one junction arm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FennecPoint {
    /// ∂E_J/∂V at V0 (J/V).
    pub ej_prime: f64,
    /// ∂²E_J/∂V² at V0 (J/V²).
    #[serde(default)]
    pub ej_second: f64,
    /// Φ_ex in units of Φ0.
    pub flux_bias: f64,
    /// ⟨Φ1⟩(θ) = Σ_k a_k cos(kθ), in units of Φ0. Index 0 is the static part.
    #[serde(default)]
    pub mean_flux: Vec<f64>,
    /// ⟨Φ̇2⟩ in volts.
    #[serde(default)]
    pub mean_voltage: f64,
}

impl FennecPoint {
    pub fn new(ej_prime: f64, flux_bias: f64) -> Self {
        Self {
            ej_prime,
            ej_second: 0.0,
            flux_bias,
            mean_flux: Vec::new(),
            mean_voltage: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.flux_bias.is_finite() {
            return Err(Error::param("flux_bias", "must be finite"));
        }
        if self.mean_flux.iter().any(|a| !a.is_finite()) {
            return Err(Error::param(
                "mean_flux",
                "harmonic amplitudes must be finite",
            ));
        }
        Ok(())
    }

    fn static_flux(&self) -> f64 {
        self.mean_flux.first().copied().unwrap_or(0.0)
    }

    fn mean_flux_at(&self, theta: f64) -> f64 {
        self.mean_flux
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k as f64 * theta).cos())
            .sum()
    }

    /// E_J'(V0 + ⟨Φ̇2⟩) to first order.
    pub fn shifted_ej_prime(&self) -> f64 {
        self.ej_prime + self.ej_second * self.mean_voltage
    }

    /// Effective phase 2π(Φ_ex − ⟨Φ1⟩) using the static part of ⟨Φ1⟩.
    pub fn phase(&self) -> f64 {
        2.0 * PI * (self.flux_bias - self.static_flux())
    }
}

/// G_max = (4π/R_Q)(E_J'/2e).
pub fn g_max(ej_prime: f64) -> f64 {
    4.0 * PI / FLUX_QUANTUM * ej_prime
}

/// G_21 = (4π/R_Q)(E_J'(V0 + ⟨Φ̇2⟩)/2e)·sin(2π(Φ_ex − ⟨Φ1⟩)).
pub fn fennec_strength(p: &FennecPoint) -> f64 {
    g_max(p.shifted_ej_prime()) * p.phase().sin()
}

/// Same, with the full harmonic content of ⟨Φ1⟩ evaluated at drive phase θ.
pub fn fennec_strength_at(p: &FennecPoint, theta: f64) -> f64 {
    g_max(p.shifted_ej_prime()) * (2.0 * PI * (p.flux_bias - p.mean_flux_at(theta))).sin()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GyratorOperatingPoint {
    pub arms: [FennecPoint; 2],
    /// Load impedance Z0 (Ω).
    pub z0: f64,
    pub n1: f64,
    pub n2: f64,
}

impl GyratorOperatingPoint {
    /// Identical arms biased at Φ_ex = ±Φ0/4.
    pub fn symmetric(ej_prime: f64, z0: f64, n1: f64, n2: f64) -> Self {
        Self {
            arms: [
                FennecPoint::new(ej_prime, 0.25),
                FennecPoint::new(ej_prime, -0.25),
            ],
            z0,
            n1,
            n2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.arms[0].validate()?;
        self.arms[1].validate()?;
        if !(self.z0 > 0.0) {
            return Err(Error::param("z0", "must be > 0"));
        }
        if !(self.n1 >= 0.0 && self.n2 >= 0.0) {
            return Err(Error::param("n", "photon numbers must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GyratorConductance {
    /// Gyrator conductance G = G_−.
    pub g: f64,
    /// G_− at zero photon number.
    pub g_max: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    /// False when compression drives G through zero (mean-field model out of range).
    pub valid: bool,
}

/// Photon-number factor 1 − πZ0N/(2R_Q) of one arm.
pub fn compression_factor(z0: f64, n: f64) -> f64 {
    1.0 - PI * z0 * n / (2.0 * RESISTANCE_QUANTUM)
}

fn arm_amplitude(p: &FennecPoint) -> f64 {
    2.0 * PI / FLUX_QUANTUM * p.shifted_ej_prime() * p.phase().sin()
}

/// Time-averaged two-arm conductances G_± = A1·f(N1) ± A2·f(N2),
/// A_k = (2π/Φ0)E_Jk' sin φ_k. For symmetric arms G_− = G_max(1 − πZ0N/(2R_Q)), N = (N1+N2)/2.
pub fn gyrator_conductance(op: &GyratorOperatingPoint) -> Result<GyratorConductance> {
    op.validate()?;
    let a1 = arm_amplitude(&op.arms[0]);
    let a2 = arm_amplitude(&op.arms[1]);
    let f1 = compression_factor(op.z0, op.n1);
    let f2 = compression_factor(op.z0, op.n2);
    let g_minus = a1 * f1 - a2 * f2;
    let g_plus = a1 * f1 + a2 * f2;
    let g_max = a1 - a2;
    let valid = g_max == 0.0 || g_minus.signum() == g_max.signum();
    Ok(GyratorConductance {
        g: g_minus,
        g_max,
        g_plus,
        g_minus,
        valid,
    })
}

/// δG = (4π/Φ0)E_J'' sin φ_ex δV.
pub fn charge_noise_dg(p: &FennecPoint, dv: f64) -> f64 {
    4.0 * PI / FLUX_QUANTUM * p.ej_second * p.phase().sin() * dv
}

/// δG for a flux fluctuation δΦ (Wb) of the mode flux, equivalent to Φ_ex → Φ_ex − δΦ:
/// δG = −(2π/Φ0)(4π/Φ0) E_J' cos φ_ex δΦ.
pub fn flux_noise_dg(p: &FennecPoint, dphi: f64) -> f64 {
    -(2.0 * PI / FLUX_QUANTUM)
        * (4.0 * PI / FLUX_QUANTUM)
        * p.shifted_ej_prime()
        * p.phase().cos()
        * dphi
}

/// δG_− of the two-arm gyrator for voltage noise δV_k seen by arm k.
pub fn gyrator_charge_noise_dg(op: &GyratorOperatingPoint, dv: [f64; 2]) -> f64 {
    let k = 2.0 * PI / FLUX_QUANTUM;
    let f1 = compression_factor(op.z0, op.n1);
    let f2 = compression_factor(op.z0, op.n2);
    k * (op.arms[0].ej_second * op.arms[0].phase().sin() * f1 * dv[0]
        - op.arms[1].ej_second * op.arms[1].phase().sin() * f2 * dv[1])
}

/// δG_− of the two-arm gyrator for mode-flux noise δΦ_k (Wb).
pub fn gyrator_flux_noise_dg(op: &GyratorOperatingPoint, dphi: [f64; 2]) -> f64 {
    let k = 2.0 * PI / FLUX_QUANTUM;
    let f1 = compression_factor(op.z0, op.n1);
    let f2 = compression_factor(op.z0, op.n2);
    -k * k
        * (op.arms[0].shifted_ej_prime() * op.arms[0].phase().cos() * f1 * dphi[0]
            - op.arms[1].shifted_ej_prime() * op.arms[1].phase().cos() * f2 * dphi[1])
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPoint {
    pub g: f64,
    pub n: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FixedPointSettings {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Damped iteration G ← (1−d)G + d·g_of_n(n_of_g(G)).
pub fn self_consistent_conductance(
    g_of_n: impl Fn(f64) -> f64,
    n_of_g: impl Fn(f64) -> f64,
    g_init: f64,
    s: FixedPointSettings,
) -> Result<FixedPoint> {
    let mut g = g_init;
    for it in 1..=s.max_iter {
        let n = n_of_g(g);
        let target = g_of_n(n);
        let next = (1.0 - s.damping) * g + s.damping * target;
        let residual = (target - g).abs();
        g = next;
        if !g.is_finite() {
            return Err(Error::NotConverged("mean-field iteration diverged".into()));
        }
        if residual <= s.tol * g.abs().max(f64::MIN_POSITIVE) {
            return Ok(FixedPoint {
                g,
                n: n_of_g(g),
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NotConverged(format!(
        "mean-field iteration after {} steps",
        s.max_iter
    )))
}

/// The five quadratic Lagrangian coefficients of one junction.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Coefficients {
    /// Charge offset (coefficient of V).
    pub alpha: f64,
    /// Flux offset (coefficient of Φ).
    pub beta: f64,
    /// Capacitance shift.
    pub c: f64,
    /// Inductance shift 1/ℓ.
    pub inv_l: f64,
    /// Flux-charge conductance.
    pub g: f64,
}

impl std::ops::Sub for Coefficients {
    type Output = Coefficients;
    fn sub(self, o: Coefficients) -> Coefficients {
        Coefficients {
            alpha: self.alpha - o.alpha,
            beta: self.beta - o.beta,
            c: self.c - o.c,
            inv_l: self.inv_l - o.inv_l,
            g: self.g - o.g,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadraticCoefficients {
    pub general: Coefficients,
    pub weak: Coefficients,
    pub difference: Coefficients,
}

/// Coefficients of the expansion of −ε_J(V + V̇, φ) to second order in (V̇, φ),
/// for general transmissions and in the weak-transmission limit.
pub fn quadratic_coefficients(spec: &JunctionSpec, v: f64) -> Result<QuadraticCoefficients> {
    spec.validate()?;
    let delta = spec.gap_si();
    let phi = 2.0 * PI * spec.external_flux;
    let (sin_p, cos_p) = phi.sin_cos();
    let s = (phi / 2.0).sin().powi(2);
    let k = 2.0 * PI / FLUX_QUANTUM;
    let mut gen = Coefficients::default();
    let mut sums = [0.0f64; 3];
    for d in spec.channel_derivatives(v)? {
        let [t, t1, t2, _] = d;
        let u = 1.0 - t * s;
        if u <= 0.0 {
            return Err(Error::Domain(format!("1 - T sin^2(phi_ex/2) = {u} <= 0")));
        }
        let su = u.sqrt();
        gen.alpha += -delta * t1 * s / (2.0 * su);
        gen.beta += k * delta * t * sin_p / (4.0 * su);
        gen.c += -delta * s / (2.0 * su) * (t2 + t1 * t1 * s / (2.0 * u));
        gen.inv_l += k * k * delta * t / (4.0 * u * su) * (cos_p + t * s * s);
        gen.g += 2.0 * k * delta / 4.0 * t1 * sin_p * (1.0 - t * s / 2.0) / (u * su);
        for (acc, x) in sums.iter_mut().zip([t, t1, t2]) {
            *acc += x;
        }
    }
    let (ej, ej1, ej2) = (
        delta * sums[0] / 4.0,
        delta * sums[1] / 4.0,
        delta * sums[2] / 4.0,
    );
    let weak = Coefficients {
        alpha: -ej1 * (1.0 - cos_p),
        beta: k * ej * sin_p,
        c: -ej2 * (1.0 - cos_p),
        inv_l: k * k * ej * cos_p,
        g: 2.0 * k * ej1 * sin_p,
    };
    Ok(QuadraticCoefficients {
        general: gen,
        weak,
        difference: gen - weak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_flux_gives_gmax() {
        let p = FennecPoint::new(2e-24, 0.25);
        assert!((fennec_strength(&p) - g_max(2e-24)).abs() < 1e-12 * g_max(2e-24));
        assert_eq!(fennec_strength(&FennecPoint::new(2e-24, 0.0)), 0.0);
    }

    #[test]
    fn half_compression() {
        let z0 = 50.0;
        let op = GyratorOperatingPoint::symmetric(1e-24, z0, 0.0, 0.0);
        let g0 = gyrator_conductance(&op).unwrap();
        assert!((g0.g - g_max(1e-24)).abs() < 1e-12 * g0.g);
        let n = RESISTANCE_QUANTUM / (PI * z0);
        let half = gyrator_conductance(&GyratorOperatingPoint::symmetric(1e-24, z0, n, n)).unwrap();
        assert!((half.g - g0.g / 2.0).abs() < 1e-12 * g0.g);
        assert_eq!(half.g_plus, 0.0);
    }

    #[test]
    fn overcompression_flagged() {
        let op = GyratorOperatingPoint::symmetric(1e-24, 50.0, 100.0, 100.0);
        let g = gyrator_conductance(&op).unwrap();
        assert!(g.g < 0.0 && !g.valid);
    }

    #[test]
    fn fixed_point_converges() {
        let fp = self_consistent_conductance(|n| 1.0 - 0.1 * n, |g| g * g, 1.0, Default::default())
            .unwrap();
        assert!((fp.g - (1.0 - 0.1 * fp.g * fp.g)).abs() < 1e-9);
    }

    #[test]
    fn constant_transmission_has_no_voltage_terms() {
        let spec = JunctionSpec {
            gap: crate::units::Energy::joules(1e-23),
            channels: vec![crate::junction::Transmission::Constant { t: 0.4 }],
            external_flux: 0.2,
        };
        let q = quadratic_coefficients(&spec, 0.0).unwrap();
        assert_eq!(q.general.alpha, 0.0);
        assert_eq!(q.general.c, 0.0);
        assert_eq!(q.general.g, 0.0);
        assert!(q.general.inv_l != 0.0);
    }
}
