//! Design problems: impedance matching, central frequency, bandwidth,
//! compression, disorder tolerance and frequency mixing.

mod bandwidth;
mod compression;
mod disorder;
mod mixing;

pub use bandwidth::{bandwidth, BandwidthResult};
pub use compression::{compression_curve, CompressionResult, DEFAULT_COMPRESSION_RATIO};
pub use disorder::{
    disorder_first_order, disorder_tolerance, impedance_deviation, matched_point_ds,
    DisorderDeviation, DisorderParam, NormMetric, ToleranceResult,
};
pub use mixing::{chi, mixing_matrices, response_matrix, MixingBlock, MixingDrive, MixingResult};

use crate::error::{Error, Result};
use crate::network::{pauli_tan, GyratorCircuit};

/// Below this L_cω0/Z_TL the series branch of the matching conductance is used.
pub const SERIES_BRANCH_LIMIT: f64 = 1e-6;

/// G0 = [√(1 + 2x²) − 1]/(Z_TL x²), x = √2 L_cω0/Z_TL, evaluated as 2/(Z_TL(√(1+2x²)+1)).
pub fn optimal_conductance(circ: &GyratorCircuit) -> f64 {
    let lcn = circ.lc * circ.omega0() / circ.z_tl;
    let x2 = 2.0 * lcn * lcn;
    if lcn < SERIES_BRANCH_LIMIT {
        (1.0 - x2 / 2.0 + x2 * x2 / 2.0) / circ.z_tl
    } else {
        2.0 / (circ.z_tl * ((1.0 + 2.0 * x2).sqrt() + 1.0))
    }
}

/// The printed quotient form, kept for branch-consistency checks.
pub fn optimal_conductance_quotient(circ: &GyratorCircuit) -> f64 {
    let x = 2f64.sqrt() * circ.lc * circ.omega0() / circ.z_tl;
    ((1.0 + 2.0 * x * x).sqrt() - 1.0) / (circ.z_tl * x * x)
}

/// Z̄_TL⁻²(ω) − Z̄_0⁻²(ω) − G², scaled by Z_TL² (the tan 2θ denominator over Z_TL²).
pub fn central_residual(circ: &GyratorCircuit, omega: f64) -> f64 {
    let (_, d, w) = pauli_tan(circ, omega);
    let zt = circ.z_tl;
    (d * d / (zt * zt) - (w * w).re - circ.g * circ.g) * zt * zt
}

const CENTRAL_SCAN_STEP: f64 = 1e-5;

/// Root of Z̄_TL⁻² − Z̄_0⁻² − G² nearest ω0 within [0.5ω0, 1.5ω0].
///
/// Sign changes are searched outward from ω0 on a fine grid. A tangent root
/// (the residual touching zero without crossing, as at L_c = 0, G = 1/Z_TL) is
/// accepted when the residual at the local minimum is below 1e-12.
pub fn central_frequency(circ: &GyratorCircuit) -> Result<f64> {
    circ.validate()?;
    let w0 = circ.omega0();
    let f = |w: f64| central_residual(circ, w);
    let f0 = f(w0);
    if f0.abs() <= 1e-12 {
        return Ok(w0);
    }
    let steps = (0.5 / CENTRAL_SCAN_STEP).round() as usize;
    let (mut up_prev, mut dn_prev) = ((w0, f0), (w0, f0));
    let mut best: Option<(f64, f64)> = None;
    for k in 1..=steps {
        let off = k as f64 * CENTRAL_SCAN_STEP * w0;
        for (prev, w) in [(&mut up_prev, w0 + off), (&mut dn_prev, w0 - off)] {
            let fw = f(w);
            if best.is_none() && fw.signum() != prev.1.signum() {
                best = Some(if prev.0 < w { (prev.0, w) } else { (w, prev.0) });
            }
            *prev = (w, fw);
        }
        if let Some((a, b)) = best {
            let r = crate::roots::brent(f, a, b, 0.0, 1e-13)?;
            return Ok(r.x);
        }
    }
    // tangent root: golden-section minimum of f on the scan bracket
    let (mut a, mut b) = (0.5 * w0, 1.5 * w0);
    let mut grid_min = (w0, f0);
    for k in 0..=2000 {
        let w = a + (b - a) * k as f64 / 2000.0;
        let fw = f(w);
        if fw < grid_min.1 {
            grid_min = (w, fw);
        }
    }
    let h = (b - a) / 2000.0;
    a = (grid_min.0 - h).max(a);
    b = (grid_min.0 + h).min(b);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - gr * (b - a);
        let d = a + gr * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let wm = 0.5 * (a + b);
    if f(wm).abs() <= 1e-12 {
        Ok(wm)
    } else {
        Err(Error::NoRoot(format!(
            "no sign change of the central-frequency residual in [0.5, 1.5]*omega0 (min {:e} at {:.6}*omega0)",
            f(wm),
            wm / w0
        )))
    }
}
