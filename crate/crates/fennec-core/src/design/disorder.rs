use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{id2, max_abs, sigma_x, sigma_y, sigma_z, I, M2};
use crate::network::{scattering, Disorder, GyratorCircuit};
use crate::roots::brent;
use crate::C64;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DisorderDeviation {
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub ds: M2,
    /// Pauli components Tr(σ dS)/2 of the first-order deviation.
    pub identity_coeff: [f64; 2],
    pub sigma_x_coeff: [f64; 2],
    pub sigma_y_coeff: [f64; 2],
    pub sigma_z_coeff: [f64; 2],
    /// S(with disorder) − S(without).
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub exact: M2,
    /// max-entry norm of exact − ds.
    pub residual: f64,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// First-order impedance change from the disorder fields of `circ`.
pub fn impedance_deviation(circ: &GyratorCircuit, omega: f64) -> M2 {
    let d = circ.disorder;
    let y0 = circ.y0(omega);
    let p = y0 * y0 + circ.g * circ.g;
    let iw = I * omega;
    let l02 = circ.l0 * circ.l0;
    let z_part = iw * d.d_c0 - d.d_l0 / (iw * l02);
    let x_part = -iw * d.c12 + d.l12 / (iw * l02);
    sigma_z() * (iw * d.d_lc) - (sigma_z() * z_part + sigma_x() * x_part) / p
}

/// dS = −(1 − S) dZ (1 − S)/(2 Z_TL) and the exact recomputation.
pub fn disorder_first_order(circ: &GyratorCircuit, omega: f64) -> Result<DisorderDeviation> {
    circ.validate()?;
    let clean = circ.with_disorder(Disorder::default());
    let s = scattering(&clean, omega)?;
    let dz = impedance_deviation(circ, omega);
    let p = id2() - s;
    let ds = -(p * dz * p) / C64::from(2.0 * circ.z_tl);
    let exact = scattering(circ, omega)? - s;
    let comp = |m: M2| pair((m * ds).trace() / 2.0);
    Ok(DisorderDeviation {
        ds,
        identity_coeff: pair(ds.trace() / 2.0),
        sigma_x_coeff: comp(sigma_x()),
        sigma_y_coeff: comp(sigma_y()),
        sigma_z_coeff: comp(sigma_z()),
        exact,
        residual: max_abs((exact - ds).iter()),
    })
}

/// The matched-point closed form −dZ/Z_TL with dZ collected at ω (valid when S = iσ_y).
pub fn matched_point_ds(circ: &GyratorCircuit, omega: f64) -> M2 {
    let d = circ.disorder;
    let iw = I * omega;
    let g2 = circ.g * circ.g;
    let l02 = circ.l0 * circ.l0;
    let bracket = sigma_z() * (iw * d.d_lc)
        - sigma_z() * ((iw * d.d_c0 - d.d_l0 / (iw * l02)) / g2)
        + sigma_x() * ((iw * d.c12 - d.l12 / (iw * l02)) / g2);
    -bracket / C64::from(circ.z_tl)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderParam {
    DLc,
    DC0,
    DL0,
    C12,
    L12,
}

impl DisorderParam {
    pub const ALL: [DisorderParam; 5] = [
        DisorderParam::DLc,
        DisorderParam::DC0,
        DisorderParam::DL0,
        DisorderParam::C12,
        DisorderParam::L12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DisorderParam::DLc => "d_lc",
            DisorderParam::DC0 => "d_c0",
            DisorderParam::DL0 => "d_l0",
            DisorderParam::C12 => "c12",
            DisorderParam::L12 => "l12",
        }
    }

    /// Disorder with only this field set to `value`.
    pub fn disorder(self, value: f64) -> Disorder {
        let mut d = Disorder::default();
        match self {
            DisorderParam::DLc => d.d_lc = value,
            DisorderParam::DC0 => d.d_c0 = value,
            DisorderParam::DL0 => d.d_l0 = value,
            DisorderParam::C12 => d.c12 = value,
            DisorderParam::L12 => d.l12 = value,
        }
        d
    }

    /// Natural scale: C0 for capacitances, L0 for inductances, L_c (or Z_TL/ω0) for the coupler.
    pub fn scale(self, circ: &GyratorCircuit) -> f64 {
        match self {
            DisorderParam::DC0 | DisorderParam::C12 => circ.c0,
            DisorderParam::DL0 | DisorderParam::L12 => circ.l0,
            DisorderParam::DLc if circ.lc > 0.0 => circ.lc,
            DisorderParam::DLc => circ.z_tl / circ.omega0(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormMetric {
    #[default]
    Max,
    Frobenius,
}

impl NormMetric {
    pub fn apply(self, m: &M2) -> f64 {
        match self {
            NormMetric::Max => max_abs(m.iter()),
            NormMetric::Frobenius => m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToleranceResult {
    pub param: DisorderParam,
    /// Parameter magnitude (SI) producing the error budget.
    pub magnitude: f64,
    /// Magnitude over the parameter's natural scale (C0 or L0).
    pub relative: f64,
    pub deviation: f64,
    pub g: f64,
    pub bracket: [f64; 2],
}

/// Disorder magnitude at which the deviation of S at ω0 (with G = G0) equals `budget`.
pub fn disorder_tolerance(
    circ: &GyratorCircuit,
    which: DisorderParam,
    budget: f64,
    metric: NormMetric,
) -> Result<ToleranceResult> {
    circ.validate()?;
    if !(budget > 0.0 && budget <= 0.2) {
        return Err(Error::param("error_budget", "must be in (0, 0.2]"));
    }
    let g0 = super::optimal_conductance(circ);
    let base = circ.with_disorder(Disorder::default()).with_g(g0);
    let w0 = base.omega0();
    let s0 = scattering(&base, w0)?;
    let dev = |m: f64| -> f64 {
        match scattering(&base.with_disorder(which.disorder(m)), w0) {
            Ok(s) => metric.apply(&(s - s0)),
            Err(_) => f64::INFINITY,
        }
    };
    let scale = which.scale(&base);
    let mut lo = 0.0;
    let mut hi = scale * 1e-6;
    let mut last = 0.0;
    loop {
        let d = dev(hi);
        if d < last * (1.0 - 1e-9) {
            return Err(Error::Domain(format!(
                "non-monotone deviation for {} in bracket [{lo:e}, {hi:e}]",
                which.name()
            )));
        }
        if d >= budget {
            break;
        }
        last = d;
        lo = hi;
        hi *= 2.0;
        if hi > scale * 1e3 {
            return Err(Error::NoRoot(format!(
                "{} never reaches the error budget",
                which.name()
            )));
        }
    }
    let root = brent(|m| dev(m).min(1e3) - budget, lo, hi, 0.0, 1e-10)?;
    Ok(ToleranceResult {
        param: which,
        magnitude: root.x,
        relative: root.x / scale,
        deviation: dev(root.x),
        g: g0,
        bracket: [lo, hi],
    })
}
