//! Andreev-bound-state junction energies, transmission models, tabulated
//! spectroscopy data and the spectral probe.
//!
//! Flux arguments are in units of Φ0. Energies returned in joules.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};
use crate::spline::CubicSpline;
use crate::units::{Energy, EnergyUnit};
use crate::C64;

/// Tabulated T(V) curve, splined on construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TabulatedCurveRaw", into = "TabulatedCurveRaw")]
pub struct TabulatedCurve {
    raw: TabulatedCurveRaw,
    spline: CubicSpline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabulatedCurveRaw {
    pub voltage: Vec<f64>,
    pub value: Vec<f64>,
    #[serde(default)]
    pub smoothing: f64,
}

impl TryFrom<TabulatedCurveRaw> for TabulatedCurve {
    type Error = Error;
    fn try_from(raw: TabulatedCurveRaw) -> Result<Self> {
        let spline = CubicSpline::smoothing(&raw.voltage, &raw.value, raw.smoothing)?;
        Ok(Self { raw, spline })
    }
}

impl From<TabulatedCurve> for TabulatedCurveRaw {
    fn from(t: TabulatedCurve) -> Self {
        t.raw
    }
}

/// Transmission model of one channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Transmission {
    Constant {
        t: f64,
    },
    /// T(V) = t_max / (1 + exp(−(V − v_th)/v_w)).
    Logistic {
        t_max: f64,
        v_th: f64,
        v_w: f64,
    },
    Tabulated(TabulatedCurve),
}

impl Transmission {
    /// [T, T', T'', T'''] at voltage `v`, with the range check on T.
    pub fn derivatives(&self, v: f64) -> Result<[f64; 4]> {
        let d = match self {
            Transmission::Constant { t } => [*t, 0.0, 0.0, 0.0],
            Transmission::Logistic { t_max, v_th, v_w } => {
                let z = (v - v_th) / v_w;
                let s = 1.0 / (1.0 + (-z).exp());
                let d1 = s * (1.0 - s);
                let d2 = d1 * (1.0 - 2.0 * s);
                let d3 = d1 * (1.0 - 6.0 * s + 6.0 * s * s);
                [
                    t_max * s,
                    t_max * d1 / v_w,
                    t_max * d2 / v_w.powi(2),
                    t_max * d3 / v_w.powi(3),
                ]
            }
            Transmission::Tabulated(c) => [
                c.spline.eval(v, 0)?,
                c.spline.eval(v, 1)?,
                c.spline.eval(v, 2)?,
                c.spline.eval(v, 3)?,
            ],
        };
        if !(0.0..=1.0).contains(&d[0]) {
            return Err(Error::Transmission {
                value: d[0],
                voltage: v,
            });
        }
        Ok(d)
    }

    pub fn value(&self, v: f64) -> Result<f64> {
        Ok(self.derivatives(v)?[0])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JunctionSpec {
    pub gap: Energy,
    pub channels: Vec<Transmission>,
    /// Φ_ex in units of Φ0.
    #[serde(default)]
    pub external_flux: f64,
}

impl JunctionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap.value > 0.0 && self.gap.value.is_finite()) {
            return Err(Error::param("gap", "must be > 0"));
        }
        if !self.external_flux.is_finite() {
            return Err(Error::param("external_flux", "must be finite"));
        }
        Ok(())
    }

    pub fn gap_si(&self) -> f64 {
        self.gap.si()
    }

    /// Per-channel [T, T', T'', T'''] at `v`.
    pub fn channel_derivatives(&self, v: f64) -> Result<Vec<[f64; 4]>> {
        self.channels.iter().map(|c| c.derivatives(v)).collect()
    }

    /// d^order E_J / dV^order in the weak-transmission limit, E_J = Δ Σ T_i / 4.
    pub fn weak_ej_derivative(&self, v: f64, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::param("order", "at most 3"));
        }
        let d = self.channel_derivatives(v)?;
        Ok(self.gap_si() * d.iter().map(|x| x[order]).sum::<f64>() / 4.0)
    }
}

/// −Δ Σ_i sqrt(1 − T_i sin²(π(Φ1 − Φ_ex))), with T_i evaluated at `v`.
pub fn abs_energy(spec: &JunctionSpec, phi1: f64, v: f64) -> Result<f64> {
    spec.validate()?;
    if !phi1.is_finite() {
        return Err(Error::param("phi1", "must be finite"));
    }
    let s2 = (PI * (phi1 - spec.external_flux)).sin().powi(2);
    let mut sum = 0.0;
    for ch in &spec.channels {
        let arg = 1.0 - ch.value(v)? * s2;
        if arg < 0.0 {
            return Err(Error::Domain(format!("1 - T sin^2 = {arg} < 0")));
        }
        sum += arg.sqrt();
    }
    Ok(-spec.gap_si() * sum)
}

/// E_J(V) = Δ Σ_i T_i(V) / 4.
pub fn weak_limit_ej(spec: &JunctionSpec, v: f64) -> Result<f64> {
    spec.validate()?;
    spec.weak_ej_derivative(v, 0)
}

/// True when every channel satisfies T_i(V) ≤ `threshold` (default use: 0.1).
pub fn weak_limit_valid(spec: &JunctionSpec, v: f64, threshold: f64) -> Result<bool> {
    Ok(spec
        .channel_derivatives(v)?
        .iter()
        .all(|d| d[0] <= threshold))
}

pub const DEFAULT_SEC_FLOOR: f64 = 1e-9;

/// Single high-transmission channel: −Δ|cos(πΦ1)| + (Δ/2)(T − 1) sin²(πΦ1) |sec(πΦ1)|.
pub fn large_transmission_energy(delta: f64, t: f64, phi1: f64, sec_floor: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Transmission {
            value: t,
            voltage: f64::NAN,
        });
    }
    let (s, c) = (PI * phi1).sin_cos();
    if c.abs() < sec_floor {
        return Err(Error::Domain(format!(
            "|cos(pi*phi1)| = {:e} below sec floor",
            c.abs()
        )));
    }
    Ok(-delta * c.abs() + 0.5 * delta * (t - 1.0) * s * s / c.abs())
}

/// E_J = (h f_Q + E_C)² / (8 E_C), inverse of f_Q = (√(8 E_C E_J) − E_C)/h.
pub fn gatemon_invert(f_q: f64, e_c: f64) -> f64 {
    let x = PLANCK * f_q + e_c;
    x * x / (8.0 * e_c)
}

pub fn gatemon_frequency(e_j: f64, e_c: f64) -> f64 {
    ((8.0 * e_c * e_j).sqrt() - e_c) / PLANCK
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TabKind {
    DirectEj,
    GatemonFreq,
}

/// Sampled E_J(V) (or f_Q(V) converted through the gatemon inversion) with a spline evaluator.
#[derive(Debug, Clone, Serialize)]
pub struct TabulatedEnergy {
    pub voltage: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: TabKind,
    pub unit: EnergyUnit,
    pub e_c: Option<Energy>,
    pub smoothing: f64,
    #[serde(skip)]
    ej_si: Vec<f64>,
    #[serde(skip)]
    spline: CubicSpline,
}

impl TabulatedEnergy {
    /// `values` are E_J in `unit` for `DirectEj`, or f_Q in Hz for `GatemonFreq` (then `e_c` is required).
    pub fn new(
        voltage: Vec<f64>,
        values: Vec<f64>,
        kind: TabKind,
        unit: EnergyUnit,
        e_c: Option<Energy>,
        smoothing: f64,
    ) -> Result<Self> {
        let ej_si: Vec<f64> = match kind {
            TabKind::DirectEj => values.iter().map(|&x| unit.to_si(x)).collect(),
            TabKind::GatemonFreq => {
                let ec = e_c
                    .ok_or_else(|| Error::param("E_C", "required for gatemon_freq data"))?
                    .si();
                if !(ec > 0.0) {
                    return Err(Error::param("E_C", "must be > 0"));
                }
                if values.iter().any(|&f| !(f > 0.0)) {
                    return Err(Error::param("value", "gatemon frequencies must be > 0"));
                }
                values
                    .iter()
                    .map(|&f| gatemon_invert(unit.to_si(f) / PLANCK, ec))
                    .collect()
            }
        };
        let spline = CubicSpline::smoothing(&voltage, &ej_si, smoothing)?;
        Ok(Self {
            voltage,
            values,
            kind,
            unit,
            e_c,
            smoothing,
            ej_si,
            spline,
        })
    }

    pub fn ej_samples(&self) -> &[f64] {
        &self.ej_si
    }

    pub fn hull(&self) -> (f64, f64) {
        self.spline.hull()
    }

    /// Splined E_J(V) in joules.
    pub fn ej(&self, v: f64) -> Result<f64> {
        self.spline.eval(v, 0)
    }
}

/// d^order E_J/dV^order of the splined data, in J/V^order.
pub fn ej_derivative(tab: &TabulatedEnergy, v: f64, order: u32) -> Result<f64> {
    if order == 0 || order > 3 {
        return Err(Error::param("order", "must be 1, 2 or 3"));
    }
    tab.spline.eval(v, order)
}

/// Anything that yields a junction energy ε_J(V, Φ1).
pub trait EnergySource {
    fn energy(&self, v: f64, phi1: f64) -> Result<f64>;
}

impl EnergySource for TabulatedEnergy {
    /// Weak-limit form −E_J(V) cos(2πΦ1).
    fn energy(&self, v: f64, phi1: f64) -> Result<f64> {
        Ok(-self.ej(v)? * (2.0 * PI * phi1).cos())
    }
}

impl EnergySource for JunctionSpec {
    fn energy(&self, v: f64, phi1: f64) -> Result<f64> {
        abs_energy(self, phi1, v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Angular frequencies of the one-sided bins.
    pub omega: Vec<f64>,
    /// Single-sided amplitudes (DC bin unscaled, others doubled).
    pub magnitude: Vec<f64>,
    /// Index of the bin at ω_ac.
    pub drive_bin: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub amp: f64,
    pub omega_ac: f64,
    pub phi1: f64,
    pub n_periods: usize,
    pub samples_per_period: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            amp: 1e-3,
            omega_ac: 2.0 * PI,
            phi1: 0.0,
            n_periods: 64,
            samples_per_period: 64,
        }
    }
}

/// DFT of ε_J(V0 + amp·sin(ω_ac t), Φ1) sampled over an integer number of periods.
pub fn spectral_probe(src: &dyn EnergySource, v0: f64, p: &ProbeSettings) -> Result<Spectrum> {
    if p.samples_per_period < 4 {
        return Err(Error::param("samples_per_period", "need at least 4"));
    }
    if p.n_periods == 0 {
        return Err(Error::param("n_periods", "must be >= 1"));
    }
    let n = p.n_periods * p.samples_per_period;
    let period = 2.0 * PI / p.omega_ac;
    let dt = period / p.samples_per_period as f64;
    let mut buf = Vec::with_capacity(n);
    for k in 0..n {
        let v = v0 + p.amp * (p.omega_ac * k as f64 * dt).sin();
        buf.push(C64::new(src.energy(v, p.phi1)?, 0.0));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let omega = (0..=half)
        .map(|k| k as f64 * p.omega_ac / p.n_periods as f64)
        .collect();
    let magnitude = (0..=half)
        .map(|k| {
            let m = buf[k].norm() / n as f64;
            if k == 0 || (n % 2 == 0 && k == half) {
                m
            } else {
                2.0 * m
            }
        })
        .collect();
    Ok(Spectrum {
        omega,
        magnitude,
        drive_bin: p.n_periods,
    })
}

/// Amplitude of the ω_ac bin across a sweep of DC voltages.
pub fn probe_line_cut(src: &dyn EnergySource, v0s: &[f64], p: &ProbeSettings) -> Result<Vec<f64>> {
    v0s.iter()
        .map(|&v| spectral_probe(src, v, p).map(|s| s.magnitude[s.drive_bin]))
        .collect()
}
