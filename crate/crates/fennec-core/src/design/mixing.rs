use nalgebra::DMatrix;
use serde::Serialize;

use crate::constants::RESISTANCE_QUANTUM;
use crate::error::{Error, Result};
use crate::linalg::{id2, inv2, sigma_y, sigma_z, I, M2};
use crate::network::{impedance, scattering, GyratorCircuit};
use crate::C64;

/// χ = 4/(R_Q c ω).
pub fn chi(c: f64, omega: f64) -> f64 {
    4.0 / (RESISTANCE_QUANTUM * c * omega)
}

/// Monochromatic drive at ω0. `weights` split the conductance between the two arms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixingDrive {
    pub amplitudes: [C64; 2],
    pub chi: f64,
    pub weights: [f64; 2],
}

impl MixingDrive {
    pub fn new(amplitudes: [C64; 2], chi: f64) -> Self {
        MixingDrive {
            amplitudes,
            chi,
            weights: [0.5, -0.5],
        }
    }

    /// Rescale `direction` so that the summed mode photon number equals `n`.
    pub fn from_photon_number(
        circ: &GyratorCircuit,
        direction: [C64; 2],
        chi: f64,
        n: f64,
    ) -> Result<Self> {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::param("photon_number", "must be >= 0"));
        }
        let unit = MixingDrive::new(direction, chi);
        let v = mode_amplitudes(circ, &unit)?;
        let n1: f64 = photon_numbers(circ, chi, &v).iter().sum();
        if n1 <= 0.0 {
            return Err(Error::param(
                "amplitudes",
                "drive direction does not excite the modes",
            ));
        }
        let k = (n / n1).sqrt();
        Ok(MixingDrive::new([direction[0] * k, direction[1] * k], chi))
    }

    fn validate(&self) -> Result<()> {
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::param("chi", "must be >= 0"));
        }
        if !self.amplitudes.iter().all(|a| a.is_finite())
            || !self.weights.iter().all(|w| w.is_finite())
        {
            return Err(Error::param("amplitudes", "must be finite"));
        }
        Ok(())
    }
}

/// One block M(ω; ω') with frequencies in units of ω0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixingBlock {
    pub source: f64,
    pub target: f64,
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub m: M2,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingResult {
    pub blocks: Vec<MixingBlock>,
    /// ω − ω' = 0 contribution, equal to dĜ(0)·∂S/∂G.
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub static_block: M2,
    /// Rows b(−3ω0), b(−ω0), b(ω0), b(3ω0); columns a(−ω0), a(ω0); 2×2 blocks each.
    #[serde(serialize_with = "serialize_dense")]
    pub map: DMatrix<C64>,
    pub dg_dc: f64,
    pub dg_2w: [f64; 2],
    pub mode_amplitudes: [[f64; 2]; 2],
    pub photon_numbers: [f64; 2],
}

fn serialize_dense<S: serde::Serializer>(
    m: &DMatrix<C64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    serde::Serialize::serialize(&rows, s)
}

/// A(ω) = (Z/Z_TL − 1)⁻¹ Z_inner(ω)/Z_TL for ω > 0.
pub fn response_matrix(circ: &GyratorCircuit, omega: f64) -> Result<M2> {
    let z = impedance(circ, omega)?.m;
    let lcm = id2() * C64::from(circ.lc) + sigma_z() * C64::from(circ.disorder.d_lc);
    let inner = z - lcm * (I * omega);
    let zn = z / C64::from(circ.z_tl);
    Ok(inv2(&(zn - id2()), 1e-14)? * inner / C64::from(circ.z_tl))
}

fn mode_amplitudes(circ: &GyratorCircuit, drive: &MixingDrive) -> Result<[C64; 2]> {
    let a = response_matrix(circ, circ.omega0())?;
    let v = a * nalgebra::Vector2::new(drive.amplitudes[0], drive.amplitudes[1]);
    Ok([v[0], v[1]])
}

fn photon_numbers(circ: &GyratorCircuit, chi: f64, v: &[C64; 2]) -> [f64; 2] {
    let k = RESISTANCE_QUANTUM * chi / (std::f64::consts::PI * circ.z0());
    [k * v[0].norm_sqr(), k * v[1].norm_sqr()]
}

/// First-order frequency mixing from the drive-induced modulation of G.
pub fn mixing_matrices(circ: &GyratorCircuit, drive: &MixingDrive) -> Result<MixingResult> {
    circ.validate()?;
    drive.validate()?;
    let w0 = circ.omega0();
    let v = mode_amplitudes(circ, drive)?;
    let chi = drive.chi;
    let [g1, g2] = [drive.weights[0] * circ.g, drive.weights[1] * circ.g];
    let dg_dc = 0.5 * chi * (g2 * v[1].norm_sqr() - g1 * v[0].norm_sqr());
    let dg_p2 = (v[1] * v[1] * g2 - v[0] * v[0] * g1) * (0.25 * chi);
    let dg_m2 = dg_p2.conj();

    let a_pos = response_matrix(circ, w0)?;
    let a_neg = a_pos.map(|z| z.conj());
    let kernel = |a: &M2| a * sigma_y() * (I * 2.0) * a * C64::from(circ.z_tl);
    let (k_pos, k_neg) = (kernel(&a_pos), kernel(&a_neg));

    let block = |target: f64, source: f64, dg: C64, k: &M2| MixingBlock {
        source,
        target,
        m: k * (dg * (source / target)),
    };
    let blocks = vec![
        block(-3.0, -1.0, dg_m2, &k_neg),
        block(-1.0, 1.0, dg_m2, &k_pos),
        block(1.0, -1.0, dg_p2, &k_neg),
        block(3.0, 1.0, dg_p2, &k_pos),
    ];
    let static_block = k_pos * C64::from(dg_dc);

    let s0 = scattering(circ, w0)?;
    let mut map = DMatrix::<C64>::zeros(8, 4);
    let mut put = |row: usize, col: usize, m: &M2| {
        for i in 0..2 {
            for j in 0..2 {
                map[(2 * row + i, 2 * col + j)] = m[(i, j)];
            }
        }
    };
    put(0, 0, &blocks[0].m);
    put(1, 0, &s0.map(|z| z.conj()));
    put(1, 1, &blocks[1].m);
    put(2, 0, &blocks[2].m);
    put(2, 1, &s0);
    put(3, 1, &blocks[3].m);

    Ok(MixingResult {
        blocks,
        static_block,
        map,
        dg_dc,
        dg_2w: [dg_p2.re, dg_p2.im],
        mode_amplitudes: [[v[0].re, v[0].im], [v[1].re, v[1].im]],
        photon_numbers: photon_numbers(circ, chi, &v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::compression_factor;
    use crate::linalg::max_abs;
    use crate::network::Normalized;

    fn circ() -> GyratorCircuit {
        let c = GyratorCircuit::from_normalized(
            Normalized {
                lc: 0.5,
                z0: 10.0,
                g: 1.0,
            },
            2e10,
            50.0,
        );
        c.with_g(super::super::optimal_conductance(&c))
    }

    #[test]
    fn zero_drive_gives_zero_blocks() {
        let c = circ();
        let r = mixing_matrices(&c, &MixingDrive::new([C64::from(0.0); 2], 1e-3)).unwrap();
        for b in &r.blocks {
            assert_eq!(max_abs(b.m.iter()), 0.0);
        }
        assert_eq!(r.dg_dc, 0.0);
    }

    #[test]
    fn static_block_is_taylor_term() {
        let c = circ();
        let chi = chi(c.c0, c.omega0());
        let mut last = None;
        for n in [0.4, 0.2, 0.1] {
            let d = MixingDrive::from_photon_number(&c, [C64::from(1.0), C64::from(0.3)], chi, n)
                .unwrap();
            let r = mixing_matrices(&c, &d).unwrap();
            let [n1, n2] = r.photon_numbers;
            let z0 = c.z0();
            let g = c.g * 0.5 * (compression_factor(z0, n1) + compression_factor(z0, n2));
            let s1 = scattering(&c.with_g(g), c.omega0()).unwrap();
            let s0 = scattering(&c, c.omega0()).unwrap();
            let err = max_abs((s1 - s0 - r.static_block).iter());
            if let Some(prev) = last {
                let ratio: f64 = prev / err;
                assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
            }
            last = Some(err);
        }
    }
}
