//! Python bindings. Plain numbers and complex lists go straight through;
//! structured inputs and results cross the boundary as JSON-compatible dicts.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use fennec::coupling;
use fennec::design;
use fennec::junction::{self, JunctionSpec};
use fennec::lindblad::{self, QuantumGyratorConfig};
use fennec::network::{self, GyratorCircuit, Normalized};

fn err(e: fennec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj
        .py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn named<T: DeserializeOwned>(name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn rows<M: Index<(usize, usize), Output = Complex64>>(m: &M, n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Circuit from dimensionless parameters. `g=None` picks the matched conductance G0.
fn circuit(lc: f64, z0: f64, g: Option<f64>, f0_ghz: f64, z_tl: f64) -> GyratorCircuit {
    let omega0 = 2.0 * PI * f0_ghz * 1e9;
    let base = GyratorCircuit::from_normalized(Normalized { lc, z0, g: 1.0 }, omega0, z_tl);
    match g {
        Some(g) => base.with_g(g / z_tl),
        None => base.with_g(design::optimal_conductance(&base)),
    }
}

/// 2x2 S matrix of the gyrator at ω/ω0 = `omega`.
#[pyfunction]
#[pyo3(signature = (lc, z0, g=None, omega=1.0, f0_ghz=7.0, z_tl=50.0))]
fn gyrator_scattering(
    lc: f64,
    z0: f64,
    g: Option<f64>,
    omega: f64,
    f0_ghz: f64,
    z_tl: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let c = circuit(lc, z0, g, f0_ghz, z_tl);
    let s = network::scattering(&c, omega * c.omega0()).map_err(err)?;
    Ok(rows(&s, 2))
}

/// Normalized G0·Z_TL for the given circuit.
#[pyfunction]
#[pyo3(signature = (lc, z0, f0_ghz=7.0, z_tl=50.0))]
fn optimal_conductance(lc: f64, z0: f64, f0_ghz: f64, z_tl: f64) -> f64 {
    circuit(lc, z0, None, f0_ghz, z_tl).g * z_tl
}

/// 3x3 S matrix of the three-port circulator.
#[pyfunction]
#[pyo3(signature = (z0, r=None, omega=1.0, z_tl=50.0))]
fn circulator_scattering(
    z0: f64,
    r: Option<f64>,
    omega: f64,
    z_tl: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let s = network::circulator_scattering(z_tl, r.unwrap_or(z_tl), z0, 1.0, omega).map_err(err)?;
    Ok(rows(&s, 3))
}

/// Band edges in units of ω0.
#[pyfunction]
#[pyo3(signature = (lc, z0, g=None, z_tl=50.0))]
fn bandwidth(py: Python<'_>, lc: f64, z0: f64, g: Option<f64>, z_tl: f64) -> PyResult<Py<PyAny>> {
    let c = circuit(lc, z0, g, 1.0 / (2.0 * PI * 1e9), z_tl);
    to_py(py, &design::bandwidth(&c).map_err(err)?)
}

/// |S12| against photon number, with the compression threshold.
#[pyfunction]
#[pyo3(signature = (lc, z0, n, ratio=design::DEFAULT_COMPRESSION_RATIO, f0_ghz=7.0, z_tl=50.0))]
fn compression_curve(
    py: Python<'_>,
    lc: f64,
    z0: f64,
    n: Vec<f64>,
    ratio: f64,
    f0_ghz: f64,
    z_tl: f64,
) -> PyResult<Py<PyAny>> {
    let c = circuit(lc, z0, None, f0_ghz, z_tl);
    to_py(py, &design::compression_curve(&c, &n, ratio).map_err(err)?)
}

/// Largest disorder in `param` keeping the deviation of S at ω0 within `budget`.
#[pyfunction]
#[pyo3(signature = (lc, z0, param, budget=0.01, metric="max", f0_ghz=7.0, z_tl=50.0))]
fn disorder_tolerance(
    py: Python<'_>,
    lc: f64,
    z0: f64,
    param: &str,
    budget: f64,
    metric: &str,
    f0_ghz: f64,
    z_tl: f64,
) -> PyResult<Py<PyAny>> {
    let c = circuit(lc, z0, None, f0_ghz, z_tl);
    let r = design::disorder_tolerance(&c, named(param)?, budget, named(metric)?).map_err(err)?;
    to_py(py, &r)
}

/// Andreev bound-state energy (J) of a junction described by a dict.
#[pyfunction]
fn abs_energy(spec: &Bound<'_, PyAny>, phi1: f64, v: f64) -> PyResult<f64> {
    let spec: JunctionSpec = from_py(spec)?;
    junction::abs_energy(&spec, phi1, v).map_err(err)
}

/// Weak-transmission E_J (J).
#[pyfunction]
fn weak_limit_ej(spec: &Bound<'_, PyAny>, v: f64) -> PyResult<f64> {
    let spec: JunctionSpec = from_py(spec)?;
    junction::weak_limit_ej(&spec, v).map_err(err)
}

/// Maximum flux-charge coupling (S) for ∂E_J/∂V in J/V.
#[pyfunction]
fn g_max(ej_prime: f64) -> f64 {
    coupling::g_max(ej_prime)
}

#[pyfunction]
fn gatemon_invert(f_q: f64, e_c: f64) -> f64 {
    junction::gatemon_invert(f_q, e_c)
}

fn quantum_config(
    e_c: f64,
    e_l: f64,
    g: f64,
    kappa: f64,
    beta: [Complex64; 2],
    omega_s: Option<f64>,
    levels: usize,
    cap: usize,
    sin_order: usize,
) -> QuantumGyratorConfig {
    let omega_s = omega_s.unwrap_or((8.0 * e_c * e_l).sqrt());
    QuantumGyratorConfig {
        levels,
        cap,
        sin_order,
        ..QuantumGyratorConfig::new(e_c, e_l, g, kappa, beta, omega_s)
    }
}

/// Driven-dissipative S matrix from the Floquet steady state, with diagnostics.
#[pyfunction]
#[pyo3(signature = (e_c, e_l, g, kappa, beta, omega_s=None, levels=6, cap=5, sin_order=5, substeps=512))]
#[allow(clippy::too_many_arguments)]
fn quantum_scattering(
    py: Python<'_>,
    e_c: f64,
    e_l: f64,
    g: f64,
    kappa: f64,
    beta: [Complex64; 2],
    omega_s: Option<f64>,
    levels: usize,
    cap: usize,
    sin_order: usize,
    substeps: usize,
) -> PyResult<Py<PyAny>> {
    let cfg = quantum_config(e_c, e_l, g, kappa, beta, omega_s, levels, cap, sin_order);
    let q = py
        .detach(|| lindblad::quantum_scattering(&cfg, substeps))
        .map_err(err)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("s", rows(&q.s, 2))?;
    out.set_item("eta", q.eta)?;
    out.set_item("columns", to_py(py, &q.columns)?)?;
    out.set_item("warnings", cfg.warnings())?;
    Ok(out.into_any().unbind())
}

/// Linear-response S matrix of the same device.
#[pyfunction]
#[pyo3(signature = (e_c, e_l, g, kappa, omega_s=None))]
fn mean_field_scattering(
    e_c: f64,
    e_l: f64,
    g: f64,
    kappa: f64,
    omega_s: Option<f64>,
) -> PyResult<Vec<Vec<Complex64>>> {
    let zero = Complex64::new(0.0, 0.0);
    let cfg = quantum_config(e_c, e_l, g, kappa, [zero; 2], omega_s, 6, 5, 5);
    Ok(rows(
        &lindblad::mean_field_scattering(&cfg).map_err(err)?,
        2,
    ))
}

#[pymodule]
#[pyo3(name = "fennec")]
fn fennec_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gyrator_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_conductance, m)?)?;
    m.add_function(wrap_pyfunction!(circulator_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(compression_curve, m)?)?;
    m.add_function(wrap_pyfunction!(disorder_tolerance, m)?)?;
    m.add_function(wrap_pyfunction!(abs_energy, m)?)?;
    m.add_function(wrap_pyfunction!(weak_limit_ej, m)?)?;
    m.add_function(wrap_pyfunction!(g_max, m)?)?;
    m.add_function(wrap_pyfunction!(gatemon_invert, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field_scattering, m)?)?;
    Ok(())
}
