use serde::Serialize;

use crate::constants::RESISTANCE_QUANTUM;
use crate::coupling::compression_factor;
use crate::error::{Error, Result};
use crate::network::{scattering, GyratorCircuit};

/// |S12(N)|/|S12(0)| at the compression point: 10^(−0.1), i.e. a 1 dB drop in
/// 10·log10|S12| (2 dB in 20·log10 terms).
pub const DEFAULT_COMPRESSION_RATIO: f64 = 0.794_328_234_724_281_5;

#[derive(Debug, Clone, Serialize)]
pub struct CompressionResult {
    pub n: Vec<f64>,
    pub g: Vec<f64>,
    pub s12_abs: Vec<f64>,
    /// 20·log10|S12|.
    pub s12_db: Vec<f64>,
    pub s11_db: Vec<f64>,
    pub threshold_ratio: f64,
    /// Photon number where |S12| crosses the threshold, interpolated linearly in dB.
    pub n_threshold: f64,
    /// N·πZ0/R_Q at the threshold.
    pub n_threshold_scaled: f64,
    /// R_Q/(πZ0).
    pub n_max_estimate: f64,
    /// Closed form at L_c = 0: x = 1 − q with 2q/(1+q²) = ratio, N = 2xR_Q/(πZ0).
    pub n_threshold_lc0: f64,
}

/// x = πZ0N/(2R_Q) at which 2(1−x)/(1+(1−x)²) equals `ratio`.
pub fn compression_x(ratio: f64) -> f64 {
    let q = (1.0 - (1.0 - ratio * ratio).sqrt()) / ratio;
    1.0 - q
}

/// Transmission at ω0 versus mean photon number N (N1 = N2 = N), with G(N) = G(0)(1 − πZ0N/(2R_Q)).
pub fn compression_curve(
    circ: &GyratorCircuit,
    n_grid: &[f64],
    ratio: f64,
) -> Result<CompressionResult> {
    circ.validate()?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::param("threshold_ratio", "must be in (0, 1)"));
    }
    if n_grid.len() < 2 || n_grid.windows(2).any(|w| w[1] <= w[0]) || n_grid[0] < 0.0 {
        return Err(Error::param(
            "n_grid",
            "need >= 2 strictly increasing photon numbers >= 0",
        ));
    }
    let w0 = circ.omega0();
    let z0 = circ.z0();
    let s0 = scattering(circ, w0)?;
    let ref_db = 20.0 * s0[(0, 1)].norm().log10();
    let mut out = CompressionResult {
        n: n_grid.to_vec(),
        g: Vec::with_capacity(n_grid.len()),
        s12_abs: Vec::with_capacity(n_grid.len()),
        s12_db: Vec::with_capacity(n_grid.len()),
        s11_db: Vec::with_capacity(n_grid.len()),
        threshold_ratio: ratio,
        n_threshold: f64::NAN,
        n_threshold_scaled: f64::NAN,
        n_max_estimate: RESISTANCE_QUANTUM / (std::f64::consts::PI * z0),
        n_threshold_lc0: 2.0 * compression_x(ratio) * RESISTANCE_QUANTUM
            / (std::f64::consts::PI * z0),
    };
    for &n in n_grid {
        let g = circ.g * compression_factor(z0, n);
        out.g.push(g);
        match scattering(&circ.with_g(g), w0) {
            Ok(s) => {
                out.s12_abs.push(s[(0, 1)].norm());
                out.s12_db.push(20.0 * s[(0, 1)].norm().log10());
                out.s11_db.push(20.0 * s[(0, 0)].norm().log10());
            }
            Err(_) => {
                out.s12_abs.push(f64::NAN);
                out.s12_db.push(f64::NAN);
                out.s11_db.push(f64::NAN);
            }
        }
    }
    let target = ref_db + 20.0 * ratio.log10();
    let crossing = out.s12_db.windows(2).enumerate().find_map(|(i, w)| {
        (w[0].is_finite() && w[1].is_finite() && w[0] >= target && w[1] < target).then_some(i)
    });
    let i = crossing.ok_or_else(|| {
        Error::NoRoot("photon-number grid does not cross the compression threshold".into())
    })?;
    let (n0, n1) = (n_grid[i], n_grid[i + 1]);
    let (d0, d1) = (out.s12_db[i], out.s12_db[i + 1]);
    out.n_threshold = n0 + (target - d0) / (d1 - d0) * (n1 - n0);
    out.n_threshold_scaled = out.n_threshold * std::f64::consts::PI * z0 / RESISTANCE_QUANTUM;
    Ok(out)
}
