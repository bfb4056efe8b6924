use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{pauli_tan, GyratorCircuit};
use crate::roots::{bracket_outward, brent};

#[derive(Debug, Clone, Serialize)]
pub struct BandwidthResult {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub delta: f64,
    /// ||tan 2θ| − 1| at each root.
    pub residuals: [f64; 2],
    /// Frequency the outward search started from.
    pub search_start: f64,
    /// δ ≈ Z0 Z_TL/(L_c² ω0), large-L_c estimate; absent for L_c = 0.
    pub large_lc_estimate: Option<f64>,
    /// L_c = 0 closed form 2ω0√(1 + β(Z0/Z_TL)²), 4β = G²Z_TL² + 2|G|Z_TL − 1.
    pub zero_lc_estimate: Option<f64>,
    /// Exact L_c = 0 band edges ω±/ω0 = √(1+s²) ± s, s = εZ0/Z_TL, 4ε² = 4β; δ = 2sω0.
    pub zero_lc_exact: Option<f64>,
}

/// |2G Z_TL D| − |D² − Z_TL²W² − G²Z_TL²|; positive where |tan 2θ| > 1.
fn residual(circ: &GyratorCircuit, w: f64) -> f64 {
    let (_, d, wv) = pauli_tan(circ, w);
    let zt = circ.z_tl;
    let num = 2.0 * circ.g * zt * d;
    let den = d * d - (zt * zt * wv * wv).re - circ.g * circ.g * zt * zt;
    num.abs() - den.abs()
}

fn abs_tan(circ: &GyratorCircuit, w: f64) -> f64 {
    pauli_tan(circ, w).0.abs()
}

/// Search span for band edges, as a factor around ω0.
pub const SEARCH_SPAN: f64 = 1e3;

pub fn bandwidth(circ: &GyratorCircuit) -> Result<BandwidthResult> {
    circ.validate()?;
    let w0 = circ.omega0();
    let f = |w: f64| residual(circ, w);
    let start = if f(w0) > 0.0 {
        w0
    } else {
        let wc = super::central_frequency(circ)
            .map_err(|e| Error::NoRoot(format!("no passband near omega0 ({e})")))?;
        if f(wc) <= 0.0 {
            return Err(Error::NoRoot(
                "|tan 2theta| <= 1 at both omega0 and the central frequency".into(),
            ));
        }
        wc
    };
    let edge = |dir: f64| -> Result<f64> {
        let limit = if dir > 0.0 {
            w0 * SEARCH_SPAN
        } else {
            w0 / SEARCH_SPAN
        };
        let (a, b) = bracket_outward(f, start, dir, 1e-6, 1.05, limit).ok_or_else(|| {
            Error::NoRoot(format!("no |tan 2theta| = 1 crossing towards {limit:e}"))
        })?;
        Ok(brent(f, a, b, 0.0, 1e-13)?.x)
    };
    let lo = edge(-1.0)?;
    let hi = edge(1.0)?;
    let residuals = [
        (abs_tan(circ, lo) - 1.0).abs(),
        (abs_tan(circ, hi) - 1.0).abs(),
    ];
    let n = circ.normalized();
    let large_lc_estimate =
        (circ.lc > 0.0).then(|| circ.z0() * circ.z_tl / (circ.lc * circ.lc * w0));
    let four_beta = n.g * n.g + 2.0 * n.g.abs() - 1.0;
    let zero_lc_estimate =
        (four_beta >= 0.0).then(|| 2.0 * w0 * (1.0 + four_beta / 4.0 * n.z0 * n.z0).sqrt());
    let zero_lc_exact = (four_beta >= 0.0).then(|| 2.0 * w0 * (four_beta / 4.0).sqrt() * n.z0);
    Ok(BandwidthResult {
        omega_minus: lo,
        omega_plus: hi,
        delta: hi - lo,
        residuals,
        search_start: start,
        large_lc_estimate,
        zero_lc_estimate,
        zero_lc_exact,
    })
}
