use nalgebra::DMatrix;

use super::fock::FockSystem;
use super::QuantumGyratorConfig;
use crate::linalg::{Csr, I};
use crate::C64;

/// L(t) = L0 + e^{−iω_s t} D₊ + e^{iω_s t} D₋ acting on column-stacked ρ.
/// The three parts share one sparsity pattern so L(t) is assembled cheaply.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub dim: usize,
    pub omega: f64,
    pattern: Csr,
    parts: [Vec<C64>; 3],
}

type Trip = Vec<(usize, usize, C64)>;

fn nonzeros(a: &DMatrix<C64>) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let v = a[(r, c)];
            if v != C64::new(0.0, 0.0) {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// I ⊗ A.
fn spre(t: &mut Trip, a: &DMatrix<C64>, k: C64) {
    let d = a.nrows();
    for (r, c, v) in nonzeros(a) {
        for m in 0..d {
            t.push((m * d + r, m * d + c, k * v));
        }
    }
}

/// Aᵀ ⊗ I.
fn spost(t: &mut Trip, a: &DMatrix<C64>, k: C64) {
    let d = a.nrows();
    for (q, p, v) in nonzeros(a) {
        for m in 0..d {
            t.push((p * d + m, q * d + m, k * v));
        }
    }
}

/// conj(B) ⊗ A, the superoperator of ρ ↦ AρB†.
fn sandwich(t: &mut Trip, a: &DMatrix<C64>, b: &DMatrix<C64>, k: C64) {
    let d = a.nrows();
    let na = nonzeros(a);
    for (p, q, bv) in nonzeros(b) {
        for &(r, s, av) in &na {
            t.push((p * d + r, q * d + s, k * bv.conj() * av));
        }
    }
}

fn commutator(a: &DMatrix<C64>) -> Trip {
    let mut t = Vec::new();
    spre(&mut t, a, -I);
    spost(&mut t, a, I);
    t
}

impl Liouvillian {
    pub fn new(cfg: &QuantumGyratorConfig, fock: &FockSystem, h: &DMatrix<C64>) -> Self {
        let d = fock.dim();
        let n = d * d;
        let mut l0 = commutator(h);
        for b in &fock.b {
            let bdb = b.adjoint() * b;
            sandwich(&mut l0, b, b, C64::from(cfg.kappa));
            spre(&mut l0, &bdb, C64::from(-0.5 * cfg.kappa));
            spost(&mut l0, &bdb, C64::from(-0.5 * cfg.kappa));
        }
        let amp = -I * (cfg.kappa.sqrt() / 2.0);
        let a =
            fock.b[0].adjoint() * (amp * cfg.beta[0]) + fock.b[1].adjoint() * (amp * cfg.beta[1]);
        let dp = commutator(&a);
        let dm = commutator(&a.adjoint());

        let parts = [
            Csr::from_triplets(n, n, l0),
            Csr::from_triplets(n, n, dp),
            Csr::from_triplets(n, n, dm),
        ];
        let mut union = Vec::new();
        for p in &parts {
            union.extend(
                p.to_triplets()
                    .into_iter()
                    .map(|(i, j, _)| (i, j, C64::new(1.0, 0.0))),
            );
        }
        let pattern = Csr::from_triplets(n, n, union);
        let scatter = |p: &Csr| {
            let mut out = vec![C64::new(0.0, 0.0); pattern.nnz()];
            for (i, j, v) in p.to_triplets() {
                let row = &pattern.indices[pattern.indptr[i]..pattern.indptr[i + 1]];
                let k = row.binary_search(&j).expect("entry in union pattern");
                out[pattern.indptr[i] + k] = v;
            }
            out
        };
        let data = [scatter(&parts[0]), scatter(&parts[1]), scatter(&parts[2])];
        Liouvillian {
            dim: d,
            omega: cfg.omega_s,
            pattern,
            parts: data,
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn at(&self, t: f64) -> Csr {
        let ep = C64::from_polar(1.0, -self.omega * t);
        let em = ep.conj();
        let data = (0..self.pattern.nnz())
            .map(|k| self.parts[0][k] + ep * self.parts[1][k] + em * self.parts[2][k])
            .collect();
        Csr {
            data,
            ..self.pattern.clone()
        }
    }

    pub fn dense(&self, t: f64) -> DMatrix<C64> {
        self.at(t).to_dense()
    }

    pub fn nnz(&self) -> usize {
        self.pattern.nnz()
    }

    /// Largest |Tr(L(t)ρ)| over the basis of column-stacked matrix units.
    pub fn trace_defect(&self, t: f64) -> f64 {
        let l = self.at(t);
        let d = self.dim;
        let mut col_sum = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let row = i * d + i;
            for k in l.indptr[row]..l.indptr[row + 1] {
                col_sum[l.indices[k]] += l.data[k];
            }
        }
        col_sum.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}
