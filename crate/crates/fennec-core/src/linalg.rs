//! Small dense helpers, a compressed sparse row matrix, and the matrix exponential.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type M2 = Matrix2<C64>;
pub type M3 = Matrix3<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn id2() -> M2 {
    M2::identity()
}

pub fn sigma_x() -> M2 {
    M2::new(r(0.0), r(1.0), r(1.0), r(0.0))
}

pub fn sigma_y() -> M2 {
    M2::new(r(0.0), -I, I, r(0.0))
}

pub fn sigma_z() -> M2 {
    M2::new(r(1.0), r(0.0), r(0.0), r(-1.0))
}

/// Closed-form 2×2 inverse; fails when |det| is below `rel_tol` times the entry scale squared.
pub fn inv2(m: &M2, rel_tol: f64) -> Result<M2> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !det.is_finite() || det.norm() <= rel_tol * scale * scale || scale == 0.0 {
        return Err(Error::Singular(format!(
            "2x2 determinant {det:e} at scale {scale:e}"
        )));
    }
    Ok(M2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// Cofactor 3×3 inverse with the same determinant check as [`inv2`].
pub fn inv3(m: &M3, rel_tol: f64) -> Result<M3> {
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ([1, 0, 0][i], [2, 2, 1][i]);
        let (c0, c1) = ([1, 0, 0][j], [2, 2, 1][j]);
        let minor = m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    let det = m[(0, 0)] * cof(0, 0) + m[(0, 1)] * cof(0, 1) + m[(0, 2)] * cof(0, 2);
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !det.is_finite() || scale == 0.0 || det.norm() <= rel_tol * scale.powi(3) {
        return Err(Error::Singular(format!(
            "3x3 determinant {det:e} at scale {scale:e}"
        )));
    }
    let mut out = M3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[(j, i)] = cof(i, j) / det;
        }
    }
    Ok(out)
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖S†S − 1‖ in the max-entry norm.
pub fn unitarity_defect2(s: &M2) -> f64 {
    max_abs((s.adjoint() * s - id2()).iter())
}

pub fn unitarity_defect3(s: &M3) -> f64 {
    max_abs((s.adjoint() * s - M3::identity()).iter())
}

/// Compressed sparse row complex matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<C64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets, summing duplicates and dropping exact zeros.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, C64)>) -> Self {
        trip.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut data: Vec<C64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trip {
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
                continue;
            }
            indices.push(j);
            data.push(v);
            indptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        let mut m = Csr {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        };
        m.prune();
        m
    }

    fn prune(&mut self) {
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.data[k] != C64::new(0.0, 0.0) {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.data = data;
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn to_triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                out.push((i, self.indices[k], self.data[k]));
            }
        }
        out
    }

    /// a·self + b·other, both with the same shape.
    pub fn lin_comb(&self, a: C64, other: &Csr, b: C64) -> Csr {
        let mut trip: Vec<_> = self
            .to_triplets()
            .into_iter()
            .map(|(i, j, v)| (i, j, a * v))
            .collect();
        trip.extend(
            other
                .to_triplets()
                .into_iter()
                .map(|(i, j, v)| (i, j, b * v)),
        );
        Csr::from_triplets(self.nrows, self.ncols, trip)
    }

    pub fn mul_slice(&self, x: &[C64], y: &mut [C64]) {
        for i in 0..self.nrows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::zeros(self.nrows);
        self.mul_slice(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.to_triplets() {
            m[(i, j)] += v;
        }
        m
    }
}

/// Applies exp(dt·L) to every column of `x` by a Taylor series truncated once the
/// newest term drops below `tol` relative to the running sum.
pub fn expm_action(l: &Csr, dt: f64, x: &mut DMatrix<C64>, tol: f64) {
    let n = x.nrows();
    let mut term = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    for mut col in x.column_iter_mut() {
        term.copy_from_slice(col.as_slice());
        for j in 1..=60 {
            l.mul_slice(&term, &mut next);
            let f = dt / j as f64;
            let mut tmax = 0.0f64;
            let mut smax = 0.0f64;
            for (k, t) in next.iter().enumerate() {
                let v = t * f;
                term[k] = v;
                col[k] += v;
                tmax = tmax.max(v.norm());
                smax = smax.max(col[k].norm());
            }
            if tmax <= tol * smax.max(1.0) {
                break;
            }
        }
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Dense matrix exponential by Padé(13) scaling and squaring.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let theta13 = 5.371920351148152;
    let s = if norm1 > theta13 {
        (norm1 / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / C64::new(2f64.powi(s), 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut x = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular for scaled input");
    for _ in 0..s {
        x = &x * &x;
    }
    x
}


/// Row-major nested `[re, im]` pairs, the JSON layout used by reports.
pub fn rows<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> Vec<Vec<[f64; 2]>> {
    (0..N)
        .map(|i| (0..N).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn serialize_m2<S: serde::Serializer>(m: &M2, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&rows(m), s)
}
