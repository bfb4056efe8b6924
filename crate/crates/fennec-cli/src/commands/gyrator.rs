use fennec::linalg::{rows, unitarity_defect2};
use fennec::network::{scattering, GyratorCircuit};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{
    circuit_echo, db, row, split, CircuitParams, Context, PointOutput, Subcommand,
    CIRCUIT_SWEEPABLE,
};
use crate::config::{typed, SchemaError};

pub struct GyratorSweep;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Extra {
    #[serde(default = "one")]
    omega_norm: f64,
}

fn one() -> f64 {
    1.0
}

pub struct Input {
    circ: GyratorCircuit,
    omega_norm: f64,
}

impl Subcommand for GyratorSweep {
    type Shared = ();
    type Input = Input;

    const NAME: &'static str = "gyrator-sweep";
    const SWEEPABLE: &'static [&'static str] = &[
        "omega_norm",
        "f0_ghz",
        "z_tl",
        "lc",
        "z0",
        "g",
        "d_lc",
        "d_c0",
        "d_l0",
        "c12",
        "l12",
    ];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        debug_assert!(CIRCUIT_SWEEPABLE
            .iter()
            .all(|p| Self::SWEEPABLE.contains(p)));
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<Input, SchemaError> {
        let (extra, rest) = split(params, &["omega_norm"]);
        let extra: Extra = typed(&extra)?;
        if !(extra.omega_norm > 0.0 && extra.omega_norm.is_finite()) {
            return Err(SchemaError::new("params.omega_norm", "must be > 0"));
        }
        Ok(Input {
            circ: CircuitParams::parse(&rest)?,
            omega_norm: extra.omega_norm,
        })
    }

    fn evaluate(_: &(), input: &Input) -> fennec::Result<PointOutput> {
        let c = &input.circ;
        let s = scattering(c, input.omega_norm * c.omega0())?;
        let n = c.normalized();
        let mut r = row([("omega_norm", input.omega_norm)]);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            r.push((format!("re_S{}{}", i + 1, j + 1), s[(i, j)].re));
            r.push((format!("im_S{}{}", i + 1, j + 1), s[(i, j)].im));
        }
        r.push(("|S11|_dB".into(), db(s[(0, 0)].norm())));
        r.push(("|S12|_dB".into(), db(s[(0, 1)].norm())));
        r.extend(row([("lc_norm", n.lc), ("z0_norm", n.z0), ("g_norm", n.g)]));
        let json = json!({
            "inputs": { "omega_norm": input.omega_norm, "circuit": circuit_echo(c) },
            "s": rows(&s),
            "s11_db": db(s[(0, 0)].norm()),
            "s12_db": db(s[(0, 1)].norm()),
            "unitarity_defect": unitarity_defect2(&s),
        });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}
