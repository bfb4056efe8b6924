use nalgebra::DMatrix;

use crate::C64;

/// Two-mode Fock space truncated to n1 + n2 ≤ cap and n_i < levels.
#[derive(Debug, Clone)]
pub struct FockSystem {
    pub levels: usize,
    pub cap: usize,
    /// Basis states ordered by total excitation, then by descending n1.
    pub basis: Vec<(usize, usize)>,
    pub b: [DMatrix<C64>; 2],
    pub eta: f64,
    /// n̂ = (b − b†)/(2iη).
    pub n: [DMatrix<C64>; 2],
    /// φ̂ = η(b + b†).
    pub phi: [DMatrix<C64>; 2],
}

impl FockSystem {
    pub fn new(levels: usize, cap: usize, eta: f64) -> Self {
        let mut basis = Vec::new();
        for total in 0..=cap {
            for a in (0..=total).rev() {
                if a < levels && total - a < levels {
                    basis.push((a, total - a));
                }
            }
        }
        let d = basis.len();
        let index = |s: (usize, usize)| basis.iter().position(|&t| t == s);
        let mut b = [DMatrix::zeros(d, d), DMatrix::zeros(d, d)];
        for (i, &(n1, n2)) in basis.iter().enumerate() {
            if n1 > 0 {
                if let Some(j) = index((n1 - 1, n2)) {
                    b[0][(j, i)] = C64::from((n1 as f64).sqrt());
                }
            }
            if n2 > 0 {
                if let Some(j) = index((n1, n2 - 1)) {
                    b[1][(j, i)] = C64::from((n2 as f64).sqrt());
                }
            }
        }
        let quad = |x: &DMatrix<C64>| {
            let xd = x.adjoint();
            (
                (x - &xd) / C64::new(0.0, 2.0 * eta),
                (x + &xd) * C64::from(eta),
            )
        };
        let (n0, p0) = quad(&b[0]);
        let (n1, p1) = quad(&b[1]);
        FockSystem {
            levels,
            cap,
            basis,
            b,
            eta,
            n: [n0, n1],
            phi: [p0, p1],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, n1: usize, n2: usize) -> Option<usize> {
        self.basis.iter().position(|&s| s == (n1, n2))
    }

    /// Largest |[b_i, b_i†] − 1| over states below the top excitation shell.
    pub fn commutator_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for b in &self.b {
            let bd = b.adjoint();
            let c = b * &bd - &bd * b;
            for (i, &(n1, n2)) in self.basis.iter().enumerate() {
                if n1 + n2 + 1 > self.cap {
                    continue;
                }
                for (j, &(m1, m2)) in self.basis.iter().enumerate() {
                    if m1 + m2 + 1 > self.cap {
                        continue;
                    }
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((c[(i, j)] - C64::from(target)).norm());
                }
            }
        }
        worst
    }
}

/// Odd Taylor polynomial of sin to the given order, evaluated on a matrix.
pub fn sin_poly(p: &DMatrix<C64>, order: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(p.nrows(), p.ncols());
    let mut term = p.clone();
    let p2 = p * p;
    let mut k = 1;
    while k <= order {
        out += &term;
        term = &term * &p2 * C64::from(-1.0 / ((k + 1) * (k + 2)) as f64);
        k += 2;
    }
    out
}

pub fn hermiticity_defect(h: &DMatrix<C64>) -> f64 {
    (h - h.adjoint()).iter().fold(0.0, |m, z| m.max(z.norm()))
}
