//! Cubic smoothing spline (Reinsch form). Smoothing 0 gives the natural
//! interpolating spline. No extrapolation outside the knot hull.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CubicSpline {
    x: Vec<f64>,
    // per-interval coefficients of a + b·t + c·t² + d·t³, t = x − x_i
    coef: Vec<[f64; 4]>,
    smoothing: f64,
}

impl CubicSpline {
    pub fn interpolating(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::smoothing(x, y, 0.0)
    }

    /// Minimizes Σ (y_i − f(x_i))² + λ ∫ f''² dx.
    pub fn smoothing(x: &[f64], y: &[f64], lambda: f64) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::param(
                "values",
                format!("length {} differs from grid length {n}", y.len()),
            ));
        }
        if n < 4 {
            return Err(Error::param(
                "voltage_grid",
                format!("need at least 4 points, got {n}"),
            ));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::param("smoothing", "must be finite and >= 0"));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite sample"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("voltage_grid", "must be strictly increasing"));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n - 2;
        // Q has three nonzeros per column j (rows j, j+1, j+2).
        let q = |j: usize| [1.0 / h[j], -1.0 / h[j] - 1.0 / h[j + 1], 1.0 / h[j + 1]];
        // symmetric pentadiagonal system, band[i][k] = A[i][i-k]
        let mut band = vec![[0.0f64; 3]; m];
        let mut rhs = vec![0.0f64; m];
        for j in 0..m {
            band[j][0] = (h[j] + h[j + 1]) / 3.0;
            if j > 0 {
                band[j][1] = h[j] / 6.0;
            }
            let qj = q(j);
            rhs[j] = qj[0] * y[j] + qj[1] * y[j + 1] + qj[2] * y[j + 2];
            if lambda > 0.0 {
                // (QᵀQ)[j][j-k] = Σ_r Q[r][j] Q[r][j-k]
                for k in 0..3.min(j + 1) {
                    let qk = q(j - k);
                    let mut s = 0.0;
                    for (a, qa) in qj.iter().enumerate() {
                        let row = j + a;
                        if row >= j - k && row < j - k + 3 {
                            s += qa * qk[row - (j - k)];
                        }
                    }
                    band[j][k] += lambda * s;
                }
            }
        }
        let gamma_in = banded_cholesky_solve(&band, &rhs)?;
        let mut gamma = vec![0.0; n];
        gamma[1..n - 1].copy_from_slice(&gamma_in);
        let mut g = y.to_vec();
        if lambda > 0.0 {
            for (j, gj) in gamma_in.iter().enumerate() {
                let qj = q(j);
                for a in 0..3 {
                    g[j + a] -= lambda * qj[a] * gj;
                }
            }
        }
        let coef = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                [
                    g[i],
                    (g[i + 1] - g[i]) / hi - hi * (2.0 * gamma[i] + gamma[i + 1]) / 6.0,
                    gamma[i] / 2.0,
                    (gamma[i + 1] - gamma[i]) / (6.0 * hi),
                ]
            })
            .collect();
        Ok(Self {
            x: x.to_vec(),
            coef,
            smoothing: lambda,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn smoothing_parameter(&self) -> f64 {
        self.smoothing
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// Value (order 0) or derivative of order 1..=3 at `x`.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        let (lo, hi) = self.hull();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfHull { x, lo, hi });
        }
        if order > 3 {
            return Err(Error::param(
                "order",
                format!("cubic spline has no derivative of order {order}"),
            ));
        }
        let i = self
            .x
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(self.coef.len() - 1);
        let t = x - self.x[i];
        let [a, b, c, d] = self.coef[i];
        Ok(match order {
            0 => a + t * (b + t * (c + t * d)),
            1 => b + t * (2.0 * c + 3.0 * d * t),
            2 => 2.0 * c + 6.0 * d * t,
            _ => 6.0 * d,
        })
    }
}

fn banded_cholesky_solve(band: &[[f64; 3]], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = band.len();
    let mut l = vec![[0.0f64; 3]; m];
    for i in 0..m {
        for k in (0..3.min(i + 1)).rev() {
            let j = i - k;
            let mut s = band[i][k];
            // Σ_{p < j, p >= i-2} L[i][p] L[j][p]
            for p in i.saturating_sub(2)..j {
                s -= l[i][i - p] * l[j][j - p];
            }
            if k == 0 {
                if s <= 0.0 {
                    return Err(Error::Singular(
                        "spline system not positive definite".into(),
                    ));
                }
                l[i][0] = s.sqrt();
            } else {
                l[i][k] = s / l[j][0];
            }
        }
    }
    let mut z = vec![0.0; m];
    for i in 0..m {
        let mut s = rhs[i];
        for k in 1..3.min(i + 1) {
            s -= l[i][k] * z[i - k];
        }
        z[i] = s / l[i][0];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = z[i];
        for k in 1..3 {
            if i + k < m {
                s -= l[i + k][k] * x[i + k];
            }
        }
        x[i] = s / l[i][0];
    }
    Ok(x)
}
