//! Bracketing scalar root finding (Brent's method) and outward bracket search.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's method on [a, b]. Requires f(a), f(b) of opposite sign (or one zero).
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, rtol: f64) -> Result<Root> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRoot(format!(
            "non-finite endpoint values on [{a}, {b}]"
        )));
    }
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{a}, {b}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (xtol + rtol * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: it,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let rr = fb / fc;
                p = s * (2.0 * m * qa * (qa - rr) - (b - a) * (rr - 1.0));
                q = (qa - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoRoot(format!("non-finite value at x = {b}")));
        }
    }
    Err(Error::NotConverged("brent exceeded 200 iterations".into()))
}

/// Walks from `x0` in direction `dir` (±1) with geometrically growing relative
/// offsets `x0·(1 + dir·h0·growth^k)` until the sign of `f` changes or `limit` is passed.
/// Returns the bracketing pair ordered as (lo, hi).
pub fn bracket_outward<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    dir: f64,
    h0: f64,
    growth: f64,
    limit: f64,
) -> Option<(f64, f64)> {
    let f0 = f(x0);
    let mut prev = x0;
    let mut fprev = f0;
    let mut h = h0;
    loop {
        let x = if dir > 0.0 {
            x0 * (1.0 + h)
        } else {
            x0 / (1.0 + h)
        };
        let past = if dir > 0.0 { x > limit } else { x < limit };
        let x = if past { limit } else { x };
        let fx = f(x);
        if fx.is_finite() && fprev.is_finite() && fx.signum() != fprev.signum() {
            return Some(if prev < x { (prev, x) } else { (x, prev) });
        }
        if past {
            return None;
        }
        prev = x;
        fprev = fx;
        h *= growth;
    }
}
