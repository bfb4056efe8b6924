//! Higher-order junction terms: cosine-series coefficients of the junction
//! energy, perturbative inversion of the nonlinear charge relation and a
//! report of the residual error Hamiltonian.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_CHARGE, FLUX_QUANTUM, HBAR, RESISTANCE_QUANTUM};
use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 4;
pub const DEFAULT_M_MAX: usize = 6;
pub const DEFAULT_ORDER: usize = 3;
pub const MAX_ORDER: usize = 4;

/// Generalized binomial C(a, k) by the product formula.
pub fn binomial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Coefficients c_ℓ with sin^{2m}(x/2) = Σ_ℓ c_ℓ cos(ℓx), ℓ = 0..=m.
pub fn sin_power_cosine_series(m: usize) -> Vec<f64> {
    let scale = 4f64.powi(-(m as i32));
    let mut c = vec![0.0; m + 1];
    c[0] = scale * binomial(2.0 * m as f64, m);
    for k in 0..m {
        let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
        c[m - k] += scale * 2.0 * sign * binomial(2.0 * m as f64, k);
    }
    c
}

/// Derivatives ∂ⁿT^m, n = 0..=4, from [T, T', T'', T''', T''''] by Faà di Bruno.
pub fn power_derivatives(t: [f64; 5], m: usize) -> [f64; 5] {
    let f = |k: usize| -> f64 {
        if k > m {
            0.0
        } else {
            factorial(m) / factorial(m - k) * t[0].powi((m - k) as i32)
        }
    };
    let [_, x1, x2, x3, x4] = t;
    [
        f(0),
        f(1) * x1,
        f(1) * x2 + f(2) * x1 * x1,
        f(1) * x3 + f(2) * 3.0 * x1 * x2 + f(3) * x1.powi(3),
        f(1) * x4
            + f(2) * (4.0 * x1 * x3 + 3.0 * x2 * x2)
            + f(3) * 6.0 * x1 * x1 * x2
            + f(4) * x1.powi(4),
    ]
}

/// Derivative inputs for one junction: `power_derivs[m][n]` = ∂ⁿT^m (summed over channels), m = 0..=m_max.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JunctionSeriesInput {
    /// Δ in joules.
    pub gap: f64,
    pub power_derivs: Vec<Vec<f64>>,
}

impl JunctionSeriesInput {
    /// From per-channel [T, T', T'', T''', T''''] via Faà di Bruno.
    pub fn from_channels(gap: f64, channels: &[[f64; 5]], m_max: usize) -> Self {
        let power_derivs = (0..=m_max)
            .map(|m| {
                let mut acc = vec![0.0; 5];
                for ch in channels {
                    for (a, d) in acc.iter_mut().zip(power_derivatives(*ch, m)) {
                        *a += d;
                    }
                }
                acc
            })
            .collect();
        JunctionSeriesInput { gap, power_derivs }
    }

    fn get(&self, m: usize, n: usize) -> f64 {
        self.power_derivs
            .get(m)
            .and_then(|r| r.get(n))
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: usize,
    pub m_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            n_max: DEFAULT_N_MAX,
            m_max: DEFAULT_M_MAX,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesCoefficients {
    /// lambda[j][n][ℓ] for n = 0..=n_max, ℓ = 0..=l_max (ℓ = 0 is identically zero).
    pub lambda: Vec<Vec<Vec<f64>>>,
    /// xi[j][n].
    pub xi: Vec<Vec<f64>>,
    pub n_max: usize,
    pub m_max: usize,
    pub l_max: usize,
}

/// Λ_{j,n,ℓ} and ξ_{j,n}; at n = 0 they expand −Δ√(1 − T sin²(x/2)) = Σ_ℓ Λ cos ℓx − ξ.
pub fn series_coefficients(
    inputs: &[JunctionSeriesInput],
    tr: Truncation,
) -> Result<SeriesCoefficients> {
    if tr.n_max < 1 || tr.m_max < 1 {
        return Err(Error::param("truncation", "orders must be >= 1"));
    }
    for (j, inp) in inputs.iter().enumerate() {
        if !inp.gap.is_finite() || inp.power_derivs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::param(
                "power_derivs",
                format!("junction {j} has non-finite inputs"),
            ));
        }
    }
    let l_max = tr.m_max;
    let mut lambda = Vec::new();
    let mut xi = Vec::new();
    for inp in inputs {
        let q = inp.gap / 4.0;
        let mut lj = vec![vec![0.0; l_max + 1]; tr.n_max + 1];
        let mut xj = vec![0.0; tr.n_max + 1];
        for n in 0..=tr.n_max {
            for m in 0..=tr.m_max {
                let d = inp.get(m, n);
                if d == 0.0 {
                    continue;
                }
                let pre = binomial(0.5, m) * 4f64.powi(1 - m as i32) * q * d;
                let sm = if m % 2 == 0 { 1.0 } else { -1.0 };
                xj[n] += sm * pre * binomial(2.0 * m as f64, m);
                for k in 0..m {
                    let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
                    lj[n][m - k] -= 2.0 * sk * pre * binomial(2.0 * m as f64, k);
                }
            }
        }
        lambda.push(lj);
        xi.push(xj);
    }
    Ok(SeriesCoefficients {
        lambda,
        xi,
        n_max: tr.n_max,
        m_max: tr.m_max,
        l_max,
    })
}

/// q = q0 + CΦ̇ + Σ_{n≥2} g_{n+1}∘Φ̇^∘n/n!, with diagonal g per order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChargeInversion {
    pub c: Matrix2<f64>,
    pub q0: Vector2<f64>,
    /// g[i] multiplies Φ̇^∘(i+2)/(i+2)!.
    pub g: Vec<Vector2<f64>>,
}

impl ChargeInversion {
    pub fn validate(&self) -> Result<()> {
        if self
            .c
            .iter()
            .chain(self.q0.iter())
            .chain(self.g.iter().flatten())
            .any(|x| !x.is_finite())
        {
            return Err(Error::param("charge_inversion", "non-finite entries"));
        }
        if self.c.determinant() == 0.0 {
            return Err(Error::Singular("capacitance matrix".into()));
        }
        Ok(())
    }

    /// q0 + CΦ̇ + Σ g∘Φ̇^∘n/n! − q.
    pub fn residual(&self, q: &Vector2<f64>, phidot: &Vector2<f64>) -> Vector2<f64> {
        let mut r = self.q0 + self.c * phidot - q;
        for (i, g) in self.g.iter().enumerate() {
            let n = i + 2;
            r += g.component_mul(&phidot.map(|x| x.powi(n as i32))) / factorial(n);
        }
        r
    }

    pub fn scaled(&self, lambda: f64) -> ChargeInversion {
        ChargeInversion {
            c: self.c,
            q0: self.q0,
            g: self.g.iter().map(|g| g * lambda).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChargeSeries {
    pub terms: Vec<Vector2<f64>>,
    pub phidot: Vector2<f64>,
}

/// Weak compositions of `total` into `parts` non-negative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Φ̇ ≈ Σ_{k≤K} X_k with X_0 = C⁻¹(q − q0) and
/// X_k = −Σ_n C⁻¹g_{n+1}/n! Σ_{i_1+…+i_n = k−1} X_{i_1}∘…∘X_{i_n}.
pub fn charge_inversion(
    ci: &ChargeInversion,
    q: &Vector2<f64>,
    order: usize,
) -> Result<ChargeSeries> {
    ci.validate()?;
    if order > MAX_ORDER {
        return Err(Error::param("order", format!("must be <= {MAX_ORDER}")));
    }
    let cinv =
        ci.c.try_inverse()
            .ok_or_else(|| Error::Singular("capacitance matrix".into()))?;
    let mut terms = vec![cinv * (q - ci.q0)];
    for k in 1..=order {
        let mut acc = Vector2::zeros();
        for (i, g) in ci.g.iter().enumerate() {
            let n = i + 2;
            let mut sum = Vector2::zeros();
            for comp in compositions(k - 1, n) {
                sum += comp
                    .iter()
                    .fold(Vector2::new(1.0, 1.0), |p, &ix| p.component_mul(&terms[ix]));
            }
            acc += g.component_mul(&sum) / factorial(n);
        }
        terms.push(-(cinv * acc));
    }
    let phidot = terms.iter().sum();
    Ok(ChargeSeries { terms, phidot })
}

/// (q − q0 + g cos(φ − φ_ex))²/2C for one mode, the leading quadratic Hamiltonian.
/// φ = 2πΦ/Φ0. The cosine convention at φ_ex = ±π/2 maps onto the sine form of the
/// flux-charge coupling with the opposite bias.
pub fn quadratic_hamiltonian(q: f64, q0: f64, g: f64, c: f64, phi: f64, phi_ex: f64) -> f64 {
    let x = q - q0 + g * (phi - phi_ex).cos();
    x * x / (2.0 * c)
}

/// ∂²H/∂q∂Φ at q = q0, Φ = 0 of `quadratic_hamiltonian`.
pub fn quadratic_cross_coefficient(g: f64, c: f64, phi_ex: f64) -> f64 {
    2.0 * std::f64::consts::PI / FLUX_QUANTUM * g * phi_ex.sin() / c
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeData {
    /// Total capacitance of the mode whose charge enters the term.
    pub capacitance: f64,
    pub impedance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermClass {
    /// q·cos(ℓφ), ℓ ≥ 2.
    ChargeLinear,
    /// qⁿ·cos(ℓφ), n ≥ 2.
    ChargePower,
    /// qⁿ, n ≥ 3.
    PureCharge,
    CrossCharge,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorTerm {
    pub class: TermClass,
    pub junction: usize,
    pub n: usize,
    pub l: usize,
    /// Coefficient of (q − q0)ⁿ cos(ℓφ) in joules per coulombⁿ.
    pub coefficient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceCheck {
    pub junction: usize,
    pub n: usize,
    pub l: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorHamiltonianReport {
    pub terms: Vec<ErrorTerm>,
    pub checks: Vec<ToleranceCheck>,
    pub much_less_factor: f64,
    pub all_pass: bool,
}

/// Collects every nonzero H_err coefficient and evaluates the impedance tolerance
/// inequalities. The left side is |Λ|(2e)ⁿ/(n!Cⁿ) in units of the mode energy
/// ħ/(ZC); a check passes when lhs < much_less_factor·(4πZ/R_Q)^{n/2}.
pub fn error_hamiltonian_report(
    coeffs: &SeriesCoefficients,
    modes: &[ModeData],
    coupling_capacitance: f64,
    much_less_factor: f64,
) -> Result<ErrorHamiltonianReport> {
    if modes.len() != coeffs.lambda.len() {
        return Err(Error::param("modes", "one entry per junction required"));
    }
    for m in modes {
        if !(m.capacitance > 0.0 && m.impedance > 0.0) {
            return Err(Error::param(
                "modes",
                "capacitance and impedance must be > 0",
            ));
        }
    }
    let mut terms = Vec::new();
    let mut checks = Vec::new();
    for (j, mode) in modes.iter().enumerate() {
        let c = mode.capacitance;
        for n in 1..=coeffs.n_max {
            let cn = factorial(n) * c.powi(n as i32);
            for l in 1..=coeffs.l_max {
                let lam = coeffs.lambda[j][n][l];
                if lam == 0.0 || (n == 1 && l < 2) {
                    continue;
                }
                let class = if n == 1 {
                    TermClass::ChargeLinear
                } else {
                    TermClass::ChargePower
                };
                terms.push(ErrorTerm {
                    class,
                    junction: j,
                    n,
                    l,
                    coefficient: -lam / cn,
                });
                let e_ref = HBAR / (mode.impedance * c);
                let lhs = (lam * (2.0 * ELECTRON_CHARGE).powi(n as i32) / cn).abs() / e_ref;
                let rhs = (4.0 * std::f64::consts::PI * mode.impedance / RESISTANCE_QUANTUM)
                    .powf(n as f64 / 2.0);
                checks.push(ToleranceCheck {
                    junction: j,
                    n,
                    l,
                    lhs,
                    rhs,
                    margin: lhs / rhs,
                    pass: lhs < much_less_factor * rhs,
                });
            }
            if n >= 3 && coeffs.xi[j][n] != 0.0 {
                terms.push(ErrorTerm {
                    class: TermClass::PureCharge,
                    junction: j,
                    n,
                    l: 0,
                    coefficient: -coeffs.xi[j][n] / cn,
                });
            }
        }
    }
    if coupling_capacitance != 0.0 && modes.len() == 2 {
        terms.push(ErrorTerm {
            class: TermClass::CrossCharge,
            junction: 0,
            n: 1,
            l: 0,
            coefficient: coupling_capacitance / (modes[0].capacitance * modes[1].capacitance),
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(ErrorHamiltonianReport {
        terms,
        checks,
        much_less_factor,
        all_pass,
    })
}
