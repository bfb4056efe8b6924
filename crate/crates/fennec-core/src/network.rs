//! Impedance and scattering matrices of the two-port gyrator and the
//! three-port circulator, and the closed-form Pauli decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{id2, inv2, sigma_x, sigma_y, sigma_z, I, M2, M3};
use crate::C64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disorder {
    #[serde(default)]
    pub d_lc: f64,
    #[serde(default)]
    pub d_c0: f64,
    #[serde(default)]
    pub d_l0: f64,
    #[serde(default)]
    pub c12: f64,
    #[serde(default)]
    pub l12: f64,
}

impl Disorder {
    pub fn is_zero(&self) -> bool {
        *self == Disorder::default()
    }

    pub fn scaled(&self, k: f64) -> Disorder {
        Disorder {
            d_lc: self.d_lc * k,
            d_c0: self.d_c0 * k,
            d_l0: self.d_l0 * k,
            c12: self.c12 * k,
            l12: self.l12 * k,
        }
    }
}

/// Two coupled LC modes, each loaded by a line of impedance Z_TL through L_c,
/// coupled by a gyrator conductance G.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyratorCircuit {
    pub l0: f64,
    pub c0: f64,
    pub lc: f64,
    pub z_tl: f64,
    pub g: f64,
    #[serde(default)]
    pub disorder: Disorder,
}

/// Dimensionless parametrization: ω' = ω/ω0, L_c' = L_cω0/Z_TL, Z0' = Z0/Z_TL, G' = G·Z_TL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub lc: f64,
    pub z0: f64,
    pub g: f64,
}

impl GyratorCircuit {
    pub fn from_normalized(n: Normalized, omega0: f64, z_tl: f64) -> Self {
        let z0 = n.z0 * z_tl;
        GyratorCircuit {
            l0: z0 / omega0,
            c0: 1.0 / (z0 * omega0),
            lc: n.lc * z_tl / omega0,
            z_tl,
            g: n.g / z_tl,
            disorder: Disorder::default(),
        }
    }

    pub fn normalized(&self) -> Normalized {
        Normalized {
            lc: self.lc * self.omega0() / self.z_tl,
            z0: self.z0() / self.z_tl,
            g: self.g * self.z_tl,
        }
    }

    pub fn omega0(&self) -> f64 {
        1.0 / (self.l0 * self.c0).sqrt()
    }

    pub fn z0(&self) -> f64 {
        (self.l0 / self.c0).sqrt()
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_disorder(mut self, d: Disorder) -> Self {
        self.disorder = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("l0", self.l0), ("c0", self.c0), ("z_tl", self.z_tl)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be > 0"));
            }
        }
        if !(self.lc >= 0.0 && self.lc.is_finite()) {
            return Err(Error::param("lc", "must be >= 0"));
        }
        if !self.g.is_finite() {
            return Err(Error::param("g", "must be finite"));
        }
        let d = self.disorder;
        for (name, v) in [
            ("d_lc", d.d_lc),
            ("d_c0", d.d_c0),
            ("d_l0", d.d_l0),
            ("c12", d.c12),
            ("l12", d.l12),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Y0(ω) = iωC0 + 1/(iωL0), zero at resonance.
    pub fn y0(&self, omega: f64) -> C64 {
        I * (omega * self.c0 - 1.0 / (omega * self.l0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortKind {
    Impedance,
    Scattering,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexTwoPort {
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub m: M2,
    pub omega: f64,
    pub kind: PortKind,
}

fn check_finite(m: &M2, what: &str) -> Result<()> {
    if m.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::Singular(format!("{what} has non-finite entries")))
    }
}

/// Z_ω = iωL_c + [iωC + (iωL)⁻¹ + iGσ_y]⁻¹ with disorder in C, L and L_c.
pub fn impedance(circ: &GyratorCircuit, omega: f64) -> Result<ComplexTwoPort> {
    circ.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::param("omega", "must be > 0"));
    }
    let d = circ.disorder;
    let iw = I * omega;
    let cap =
        id2() * C64::from(circ.c0) + sigma_z() * C64::from(d.d_c0) - sigma_x() * C64::from(d.c12);
    let ind =
        id2() * C64::from(circ.l0) + sigma_z() * C64::from(d.d_l0) - sigma_x() * C64::from(d.l12);
    let lcm = id2() * C64::from(circ.lc) + sigma_z() * C64::from(d.d_lc);
    let inv_l = inv2(&ind, 1e-14)?;
    let inner = cap * iw + inv_l / iw + sigma_y() * (I * circ.g);
    // Scale-aware singularity check: compare det against the bare LC admittance scale.
    let scale = omega * circ.c0 + 1.0 / (omega * circ.l0);
    let det = inner[(0, 0)] * inner[(1, 1)] - inner[(0, 1)] * inner[(1, 0)];
    if !(det.norm() > (1e-14 * scale).powi(2)) {
        return Err(Error::Singular(format!(
            "resonance singularity: |det| = {:e} at omega = {omega}",
            det.norm()
        )));
    }
    let inner_inv = M2::new(inner[(1, 1)], -inner[(0, 1)], -inner[(1, 0)], inner[(0, 0)]) / det;
    let z = lcm * iw + inner_inv;
    check_finite(&z, "impedance")?;
    Ok(ComplexTwoPort {
        m: z,
        omega,
        kind: PortKind::Impedance,
    })
}

/// S = (Z/Z_TL − 1)⁻¹ (Z/Z_TL + 1).
pub fn scattering_from_impedance(z: &ComplexTwoPort, z_tl: f64) -> Result<ComplexTwoPort> {
    if !(z_tl > 0.0) {
        return Err(Error::param("z_tl", "must be > 0"));
    }
    let zn = z.m / C64::from(z_tl);
    let lhs = inv2(&(zn - id2()), 1e-14)?;
    let s = lhs * (zn + id2());
    check_finite(&s, "scattering matrix")?;
    Ok(ComplexTwoPort {
        m: s,
        omega: z.omega,
        kind: PortKind::Scattering,
    })
}

/// Convenience: S(ω) of a circuit.
pub fn scattering(circ: &GyratorCircuit, omega: f64) -> Result<M2> {
    Ok(scattering_from_impedance(&impedance(circ, omega)?, circ.z_tl)?.m)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PauliAngle {
    pub tan_2theta: f64,
    /// Z̄_TL(ω) (Ω); real.
    pub z_tl_bar: f64,
    /// Z̄_0(ω) (Ω); purely imaginary, stored as its imaginary part.
    pub z0_bar_im: f64,
    /// Global phase e^{iψ} separating S from cos2θ + i sin2θ σ_y.
    pub phase: [f64; 2],
    pub cos_2theta: f64,
    pub sin_2theta: f64,
}

/// tan 2θ = 2G Z_TL D / (D² − Z_TL² W² − G² Z_TL²) with
/// D = (1 + Z_c Y0)² + G² Z_c², W = 1/Z̄0 = Y0 + Z_c (Y0² + G²), Z̄_TL = Z_TL/D.
pub fn pauli_tan(circ: &GyratorCircuit, omega: f64) -> (f64, f64, C64) {
    let zc = I * omega * circ.lc;
    let y0 = circ.y0(omega);
    let g = circ.g;
    let d = ((1.0 + zc * y0).powi(2) + g * g * zc * zc).re;
    let w = y0 + zc * (y0 * y0 + g * g);
    let zt = circ.z_tl;
    let num = 2.0 * g * zt * d;
    let den = d * d - (zt * zt * w * w).re - g * g * zt * zt;
    (num / den, d, w)
}

/// S = e^{iψ}(cos 2θ·1 + i sin 2θ·σ_y) from the closed form, with the
/// (cos, sin) branch picked to agree with the direct computation.
pub fn pauli_form(circ: &GyratorCircuit, omega: f64) -> Result<(PauliAngle, ComplexTwoPort)> {
    circ.validate()?;
    if !circ.disorder.is_zero() {
        return Err(Error::param(
            "disorder",
            "pauli_form requires zero disorder",
        ));
    }
    let direct = scattering(circ, omega)?;
    let (t, d, w) = pauli_tan(circ, omega);
    // Z = a + bσ_y; det S = N / conj(N) with N = Z_TL² + a² − b² + 2aZ_TL.
    let zc = I * omega * circ.lc;
    let y0 = circ.y0(omega);
    let p = y0 * y0 + circ.g * circ.g;
    let a = (zc * p + y0) / p;
    let b = -I * circ.g / p;
    let zt = circ.z_tl;
    let n = zt * zt + a * a - b * b + 2.0 * a * zt;
    let phase = n / n.norm();
    let (c0, s0) = if t.is_infinite() {
        (0.0, t.signum())
    } else {
        let h = (1.0 + t * t).sqrt();
        (1.0 / h, t / h)
    };
    let build = |c: f64, s: f64| (id2() * C64::from(c) + sigma_y() * (I * s)) * phase;
    let cand = [(c0, s0), (-c0, -s0)];
    let (cos2, sin2) = *cand
        .iter()
        .min_by(|x, y| {
            let ex = crate::linalg::max_abs((build(x.0, x.1) - direct).iter());
            let ey = crate::linalg::max_abs((build(y.0, y.1) - direct).iter());
            ex.total_cmp(&ey)
        })
        .unwrap();
    let angle = PauliAngle {
        tan_2theta: t,
        z_tl_bar: zt / d,
        z0_bar_im: (1.0 / w).im,
        phase: [phase.re, phase.im],
        cos_2theta: cos2,
        sin_2theta: sin2,
    };
    Ok((
        angle,
        ComplexTwoPort {
            m: build(cos2, sin2),
            omega,
            kind: PortKind::Scattering,
        },
    ))
}

/// Three-port circulator S matrix with Z̃0(ω) = Z0(−iωω0)/(ω² − ω0²), evaluated
/// through u = 1/Z̃0 so that the resonance is regular.
pub fn circulator_scattering(z_tl: f64, r: f64, z0: f64, omega0: f64, omega: f64) -> Result<M3> {
    for (name, v) in [
        ("z_tl", z_tl),
        ("r", r),
        ("z0", z0),
        ("omega0", omega0),
        ("omega", omega),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, "must be > 0"));
        }
    }
    let u = I * (omega * omega - omega0 * omega0) / (omega * omega0 * z0);
    let zu = u * z_tl;
    let (rr, zt) = (C64::from(r), C64::from(z_tl));
    let den = zt * zt - rr * rr * (zu - 3.0) * (zu + 1.0);
    let scale = (r * r).max(z_tl * z_tl) * (1.0 + zu.norm()).powi(2);
    if !(den.norm() > 1e-14 * scale) {
        return Err(Error::Singular(format!("circulator denominator {den:e}")));
    }
    let s11 = rr * rr * (zu - 1.0).powi(2) - zt * zt;
    let s33 = rr * rr * (zu + 1.0).powi(2) - zt * zt;
    let two_r = 2.0 * rr;
    let m = M3::new(
        s11,
        two_r * (rr + zt - rr * zu),
        two_r * (rr * (zu + 1.0) - zt),
        two_r * (rr * (1.0 - zu) - zt),
        s11,
        -two_r * (rr * (zu + 1.0) + zt),
        two_r * (rr * (zu + 1.0) + zt),
        -two_r * (rr * (zu + 1.0) - zt),
        s33,
    ) / den;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_defect2, unitarity_defect3};

    fn ideal() -> GyratorCircuit {
        GyratorCircuit::from_normalized(
            Normalized {
                lc: 0.0,
                z0: 10.0,
                g: 1.0,
            },
            2.0 * std::f64::consts::PI * 5e9,
            50.0,
        )
    }

    #[test]
    fn ideal_gyrator_at_resonance() {
        let c = ideal();
        let s = scattering(&c, c.omega0()).unwrap();
        let want = M2::new(
            C64::from(0.0),
            C64::from(1.0),
            C64::from(-1.0),
            C64::from(0.0),
        );
        assert!(max_abs((s - want).iter()) < 1e-12);
    }

    #[test]
    fn decoupled_load_is_diagonal() {
        let c = ideal().with_g(0.0);
        let w = c.omega0() / 2.0;
        let z = impedance(&c, w).unwrap().m;
        let z0w = 1.0 / c.y0(w);
        assert!((z[(0, 0)] - z0w).norm() < 1e-12 * z0w.norm());
        assert!(z[(0, 1)].norm() < 1e-12 * z0w.norm());
    }

    #[test]
    fn zero_coupling_at_resonance_is_singular() {
        let c = ideal().with_g(0.0);
        assert!(matches!(impedance(&c, c.omega0()), Err(Error::Singular(_))));
    }

    #[test]
    fn open_and_short_limits() {
        let big = ComplexTwoPort {
            m: id2() * C64::from(1e12 * 50.0),
            omega: 1.0,
            kind: PortKind::Impedance,
        };
        assert!(max_abs((scattering_from_impedance(&big, 50.0).unwrap().m - id2()).iter()) < 1e-10);
        let zero = ComplexTwoPort {
            m: M2::zeros(),
            omega: 1.0,
            kind: PortKind::Impedance,
        };
        assert!(
            max_abs((scattering_from_impedance(&zero, 50.0).unwrap().m + id2()).iter()) < 1e-15
        );
    }

    #[test]
    fn pauli_matches_direct_off_resonance() {
        let c = GyratorCircuit::from_normalized(
            Normalized {
                lc: 0.5,
                z0: 10.0,
                g: 0.7,
            },
            1.0,
            1.0,
        );
        for k in 1..200 {
            let w = 0.3 + 1.4 * k as f64 / 200.0;
            let (_, p) = pauli_form(&c, w).unwrap();
            let d = scattering(&c, w).unwrap();
            assert!(max_abs((p.m - d).iter()) < 1e-10, "w = {w}");
        }
    }

    #[test]
    fn circulator_ideal_and_unitary() {
        let s = circulator_scattering(50.0, 50.0, 50.0, 1.0, 1.0).unwrap();
        let o = C64::from(0.0);
        let one = C64::from(1.0);
        let want = M3::new(o, one, o, o, o, -one, one, o, o);
        assert!(max_abs((s - want).iter()) < 1e-12);
        let s = circulator_scattering(40.0, 70.0, 20.0, 1.0, 1.3).unwrap();
        assert!(unitarity_defect3(&s) < 1e-12);
    }

    #[test]
    fn reciprocity_breaking() {
        let c = GyratorCircuit::from_normalized(
            Normalized {
                lc: 0.2,
                z0: 3.0,
                g: 0.4,
            },
            1.0,
            1.0,
        );
        let s = scattering(&c, 0.9).unwrap();
        assert!((s[(0, 1)] + s[(1, 0)]).norm() < 1e-14);
        assert!(unitarity_defect2(&s) < 1e-13);
    }
}
