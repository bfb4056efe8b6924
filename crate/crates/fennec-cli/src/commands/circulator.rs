use fennec::linalg::{rows, unitarity_defect3};
use fennec::network::circulator_scattering;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{db, row, Context, PointOutput, Subcommand};
use crate::config::{typed, SchemaError};

pub struct Circulator;

/// Impedances in ohms; frequency in units of the mode resonance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    #[serde(default = "default_z")]
    z_tl: f64,
    #[serde(default)]
    r: Option<f64>,
    z0: f64,
    #[serde(default = "one")]
    omega_norm: f64,
}

fn default_z() -> f64 {
    50.0
}

fn one() -> f64 {
    1.0
}

impl Subcommand for Circulator {
    type Shared = ();
    type Input = Input;

    const NAME: &'static str = "circulator";
    const SWEEPABLE: &'static [&'static str] = &["z_tl", "r", "z0", "omega_norm"];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<Input, SchemaError> {
        let mut input: Input = typed(params)?;
        input.r = Some(input.r.unwrap_or(input.z_tl));
        for (name, v) in [
            ("z_tl", input.z_tl),
            ("r", input.r.unwrap()),
            ("z0", input.z0),
            ("omega_norm", input.omega_norm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SchemaError::new(format!("params.{name}"), "must be > 0"));
            }
        }
        Ok(input)
    }

    fn evaluate(_: &(), p: &Input) -> fennec::Result<PointOutput> {
        let s = circulator_scattering(p.z_tl, p.r.unwrap(), p.z0, 1.0, p.omega_norm)?;
        let mut r = row([("omega_norm", p.omega_norm)]);
        for i in 0..3 {
            for j in 0..3 {
                r.push((format!("re_S{}{}", i + 1, j + 1), s[(i, j)].re));
                r.push((format!("im_S{}{}", i + 1, j + 1), s[(i, j)].im));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                r.push((format!("|S{}{}|_dB", i + 1, j + 1), db(s[(i, j)].norm())));
            }
        }
        let defect = unitarity_defect3(&s);
        r.push(("unitarity_defect".into(), defect));
        let json = json!({ "inputs": p, "s": rows(&s), "unitarity_defect": defect });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}
