use nalgebra::{DMatrix, DVector, Schur};
use serde::Serialize;

use super::fock::FockSystem;
use super::liouvillian::Liouvillian;
use super::{build_hamiltonian, QuantumGyratorConfig};
use crate::error::{Error, Result};
use crate::linalg::{expm_action, M2};
use crate::C64;

const TAYLOR_TOL: f64 = 1e-16;

/// Propagates every column of `x` over `periods` drive periods with midpoint-sampled substeps.
pub fn evolve(l: &Liouvillian, x: &mut DMatrix<C64>, substeps: usize, periods: usize) {
    let dt = l.period() / substeps as f64;
    for _ in 0..periods {
        for k in 0..substeps {
            let lk = l.at((k as f64 + 0.5) * dt);
            expm_action(&lk, dt, x, TAYLOR_TOL);
        }
    }
}

#[derive(Debug, Clone)]
pub struct PeriodPropagator {
    pub v: DMatrix<C64>,
    pub substeps: usize,
    pub period: f64,
    pub dim: usize,
    /// Largest deviation of Tr(Vρ) from Tr ρ over the matrix-unit basis.
    pub trace_defect: f64,
}

/// V(T) as the time-ordered product of exp(L(t_k)Δt) over one period.
pub fn period_propagator(l: &Liouvillian, substeps: usize) -> Result<PeriodPropagator> {
    if substeps < 64 {
        return Err(Error::param("substeps", "must be >= 64"));
    }
    let n = l.dim * l.dim;
    let mut v = DMatrix::<C64>::identity(n, n);
    evolve(l, &mut v, substeps, 1);
    if !v.iter().all(|z| z.is_finite()) {
        return Err(Error::Domain("propagator has non-finite entries".into()));
    }
    let d = l.dim;
    let mut defect = 0.0f64;
    for j in 0..n {
        let tr: C64 = (0..d).map(|i| v[(i * d + i, j)]).sum();
        let want = if j % (d + 1) == 0 { 1.0 } else { 0.0 };
        defect = defect.max((tr - want).norm());
    }
    Ok(PeriodPropagator {
        v,
        substeps,
        period: l.period(),
        dim: d,
        trace_defect: defect,
    })
}

/// Eigenvalues of V, sorted by descending modulus.
pub fn spectrum(v: &DMatrix<C64>) -> Vec<C64> {
    let (_, t) = Schur::new(v.clone()).unpack();
    let mut ev: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    ev
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    #[serde(skip)]
    pub rho: DMatrix<C64>,
    pub fixed_point_residual: f64,
    pub leading_modulus: f64,
    pub second_modulus: f64,
    /// 1 − |λ₂|.
    pub gap: f64,
    pub min_eigenvalue: f64,
}

fn unstack(x: &[C64], d: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(d, d, x)
}

/// Unit-eigenvalue right eigenvector of V, via (V − 1) with one row swapped for the trace.
pub fn steady_state(p: &PeriodPropagator) -> Result<SteadyState> {
    let d = p.dim;
    let n = d * d;
    let ev = spectrum(&p.v);
    let leading = ev[0].norm();
    let second = ev.get(1).map_or(0.0, |z| z.norm());
    if leading > 1.0 + 1e-6 {
        return Err(Error::Domain(format!(
            "propagator is not contractive: spectral radius {leading}"
        )));
    }
    if second >= 1.0 - 1e-8 {
        return Err(Error::Domain(format!(
            "degenerate unit eigenvalue: |lambda_2| = {second}"
        )));
    }
    let mut m = &p.v - DMatrix::<C64>::identity(n, n);
    for j in 0..n {
        m[(0, j)] = if j % (d + 1) == 0 {
            C64::from(1.0)
        } else {
            C64::from(0.0)
        };
    }
    let mut rhs = DVector::<C64>::zeros(n);
    rhs[0] = C64::from(1.0);
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("steady-state system".into()))?;
    let r = unstack(x.as_slice(), d);
    let mut rho = (&r + r.adjoint()) * C64::from(0.5);
    let tr = rho.trace();
    rho /= tr;
    let min_eigenvalue = rho.clone().symmetric_eigenvalues().min();
    if min_eigenvalue < -1e-8 {
        return Err(Error::Domain(format!(
            "steady state has negative eigenvalue {min_eigenvalue:e}"
        )));
    }
    let xs = DVector::from_column_slice(rho.as_slice());
    let fixed_point_residual = (&p.v * &xs - &xs)
        .iter()
        .fold(0.0f64, |a, z| a.max(z.norm()));
    Ok(SteadyState {
        rho,
        fixed_point_residual,
        leading_modulus: leading,
        second_modulus: second,
        gap: 1.0 - second,
        min_eigenvalue,
    })
}

/// Period average of e^{iω_s t} Tr[b_j ρ(t)] along the steady orbit, sampled at substep midpoints.
pub fn rotating_amplitudes(
    l: &Liouvillian,
    fock: &FockSystem,
    rho: &DMatrix<C64>,
    substeps: usize,
) -> [C64; 2] {
    let d = l.dim;
    let dt = l.period() / substeps as f64;
    let mut x = DMatrix::from_column_slice(d * d, 1, rho.as_slice());
    let mut acc = [C64::new(0.0, 0.0); 2];
    for k in 0..substeps {
        let t = (k as f64 + 0.5) * dt;
        let lk = l.at(t);
        expm_action(&lk, dt / 2.0, &mut x, TAYLOR_TOL);
        let r = unstack(x.as_slice(), d);
        let phase = C64::from_polar(1.0, l.omega * t);
        for (j, b) in fock.b.iter().enumerate() {
            acc[j] += phase * (b * &r).trace();
        }
        expm_action(&lk, dt / 2.0, &mut x, TAYLOR_TOL);
    }
    acc.map(|a| a / substeps as f64)
}

pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let m = a - b;
    let h = (&m + m.adjoint()) * C64::from(0.5);
    0.5 * h
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
}

/// One column S_ij = −2√κ α_i/β_j − δ_ij.
pub fn extract_scattering(
    kappa: f64,
    alpha: [C64; 2],
    beta: C64,
    column: usize,
) -> Result<[C64; 2]> {
    if beta.norm() == 0.0 {
        return Err(Error::param(
            "beta",
            format!("port {} is driven with zero amplitude", column + 1),
        ));
    }
    let k = -2.0 * kappa.sqrt();
    let mut s = [alpha[0] * k / beta, alpha[1] * k / beta];
    s[column] -= 1.0;
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnDiagnostics {
    pub photon_numbers: [f64; 2],
    pub gap: f64,
    pub second_modulus: f64,
    pub fixed_point_residual: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumScattering {
    #[serde(serialize_with = "crate::linalg::serialize_m2")]
    pub s: M2,
    pub columns: Vec<ColumnDiagnostics>,
    pub eta: f64,
    pub substeps: usize,
}

/// Drives each port in turn with its configured amplitude and assembles S.
pub fn quantum_scattering(
    cfg: &QuantumGyratorConfig,
    substeps: usize,
) -> Result<QuantumScattering> {
    let (fock, ham) = build_hamiltonian(cfg)?;
    let mut s = M2::zeros();
    let mut columns = Vec::with_capacity(2);
    for j in 0..2 {
        let mut beta = [C64::new(0.0, 0.0); 2];
        beta[j] = cfg.beta[j];
        if beta[j].norm() == 0.0 {
            return Err(Error::param(
                "beta",
                format!("port {} is driven with zero amplitude", j + 1),
            ));
        }
        let l = Liouvillian::new(&cfg.with_beta(beta), &fock, &ham.h);
        let p = period_propagator(&l, substeps)?;
        let ss = steady_state(&p)?;
        let alpha = rotating_amplitudes(&l, &fock, &ss.rho, substeps);
        let col = extract_scattering(cfg.kappa, alpha, beta[j], j)?;
        s[(0, j)] = col[0];
        s[(1, j)] = col[1];
        let occ = |b: &DMatrix<C64>| (b.adjoint() * b * &ss.rho).trace().re;
        columns.push(ColumnDiagnostics {
            photon_numbers: [occ(&fock.b[0]), occ(&fock.b[1])],
            gap: ss.gap,
            second_modulus: ss.second_modulus,
            fixed_point_residual: ss.fixed_point_residual,
            trace_defect: p.trace_defect,
            min_eigenvalue: ss.min_eigenvalue,
        });
    }
    Ok(QuantumScattering {
        s,
        columns,
        eta: ham.eta,
        substeps,
    })
}
