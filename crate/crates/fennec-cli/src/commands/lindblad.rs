use fennec::linalg::rows;
use fennec::lindblad::{
    mean_field_scattering, quantum_scattering, QuantumGyratorConfig, DEFAULT_SUBSTEPS,
};
use fennec::C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{row, schema, Context, PointOutput, Subcommand};
use crate::config::{typed, SchemaError};

pub struct Lindblad;

/// Energies and rates as angular frequencies with ħ = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    e_c: f64,
    e_l: f64,
    g: f64,
    kappa: f64,
    /// Incoming amplitude per port as [re, im].
    beta: [[f64; 2]; 2],
    #[serde(default)]
    omega_s: Option<f64>,
    #[serde(default = "sin_order")]
    sin_order: usize,
    #[serde(default = "levels")]
    levels: usize,
    #[serde(default = "cap")]
    cap: usize,
    #[serde(default = "substeps")]
    substeps: usize,
}

fn sin_order() -> usize {
    5
}
fn levels() -> usize {
    6
}
fn cap() -> usize {
    5
}
fn substeps() -> usize {
    DEFAULT_SUBSTEPS
}

pub struct Input {
    cfg: QuantumGyratorConfig,
    substeps: usize,
}

impl Subcommand for Lindblad {
    type Shared = ();
    type Input = Input;

    const NAME: &'static str = "lindblad";
    const SWEEPABLE: &'static [&'static str] = &["e_c", "e_l", "g", "kappa", "omega_s"];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<Input, SchemaError> {
        let p: Params = typed(params)?;
        let beta = p.beta.map(|[re, im]| C64::new(re, im));
        let omega_s = p.omega_s.unwrap_or_else(|| (8.0 * p.e_c * p.e_l).sqrt());
        let mut cfg = QuantumGyratorConfig::new(p.e_c, p.e_l, p.g, p.kappa, beta, omega_s);
        cfg.sin_order = p.sin_order;
        cfg.levels = p.levels;
        cfg.cap = p.cap;
        cfg.validate().map_err(schema)?;
        if p.substeps < 64 {
            return Err(SchemaError::new("params.substeps", "must be >= 64"));
        }
        if beta.iter().any(|b| b.norm() == 0.0) {
            return Err(SchemaError::new(
                "params.beta",
                "both ports need a nonzero amplitude",
            ));
        }
        Ok(Input {
            cfg,
            substeps: p.substeps,
        })
    }

    fn evaluate(_: &(), p: &Input) -> fennec::Result<PointOutput> {
        let q = quantum_scattering(&p.cfg, p.substeps)?;
        let mf = mean_field_scattering(&p.cfg)?;
        let c = &p.cfg;
        let mut r = row([
            ("omega_s", c.omega_s),
            ("e_c", c.e_c),
            ("e_l", c.e_l),
            ("g", c.g),
            ("kappa", c.kappa),
        ]);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            r.push((format!("re_S{}{}", i + 1, j + 1), q.s[(i, j)].re));
            r.push((format!("im_S{}{}", i + 1, j + 1), q.s[(i, j)].im));
        }
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            r.push((format!("re_S{}{}_mf", i + 1, j + 1), mf[(i, j)].re));
            r.push((format!("im_S{}{}_mf", i + 1, j + 1), mf[(i, j)].im));
        }
        for (k, col) in q.columns.iter().enumerate() {
            r.push((format!("n1_drive{}", k + 1), col.photon_numbers[0]));
            r.push((format!("n2_drive{}", k + 1), col.photon_numbers[1]));
            r.push((format!("gap_drive{}", k + 1), col.gap));
            r.push((format!("residual_drive{}", k + 1), col.fixed_point_residual));
        }
        let json = json!({
            "inputs": { "config": c, "substeps": p.substeps, "eta": q.eta, "warnings": c.warnings() },
            "s": rows(&q.s),
            "mean_field_s": rows(&mf),
            "steady_photon_numbers": q.columns.iter().map(|col| col.photon_numbers).collect::<Vec<_>>(),
            "v_eigen_gap": q.columns.iter().map(|col| json!({ "gap": col.gap, "second_modulus": col.second_modulus })).collect::<Vec<_>>(),
            "convergence": q.columns.iter().map(|col| json!({
                "fixed_point_residual": col.fixed_point_residual,
                "trace_defect": col.trace_defect,
                "min_eigenvalue": col.min_eigenvalue,
            })).collect::<Vec<_>>(),
        });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}
