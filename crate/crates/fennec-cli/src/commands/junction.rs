use fennec::junction::{abs_energy, weak_limit_ej, weak_limit_valid, JunctionSpec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{row, schema, split, Context, PointOutput, Subcommand};
use crate::config::{typed, SchemaError};

pub struct JunctionEnergy;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Extra {
    /// Φ1 in units of Φ0.
    #[serde(default)]
    phi1: f64,
    /// Gate voltage in volts.
    #[serde(default)]
    v: f64,
    /// Largest transmission for which the weak limit is reported as valid.
    #[serde(default = "default_threshold")]
    weak_threshold: f64,
}

fn default_threshold() -> f64 {
    0.1
}

pub struct Input {
    spec: JunctionSpec,
    extra: Extra,
}

impl Subcommand for JunctionEnergy {
    type Shared = ();
    type Input = Input;

    const NAME: &'static str = "junction-energy";
    const SWEEPABLE: &'static [&'static str] = &["phi1", "v", "external_flux"];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<Input, SchemaError> {
        let (extra, rest) = split(params, &["phi1", "v", "weak_threshold"]);
        let extra: Extra = typed(&extra)?;
        if let Some(k) = rest
            .keys()
            .find(|k| !["gap", "channels", "external_flux"].contains(&k.as_str()))
        {
            return Err(SchemaError::new(format!("params.{k}"), "unknown field"));
        }
        let spec: JunctionSpec = typed(&rest)?;
        spec.validate().map_err(schema)?;
        if spec.channels.is_empty() {
            return Err(SchemaError::new(
                "params.channels",
                "at least one channel is required",
            ));
        }
        Ok(Input { spec, extra })
    }

    fn evaluate(_: &(), p: &Input) -> fennec::Result<PointOutput> {
        let Extra {
            phi1,
            v,
            weak_threshold,
        } = p.extra;
        let e = abs_energy(&p.spec, phi1, v)?;
        let gap = p.spec.gap_si();
        let ej = weak_limit_ej(&p.spec, v)?;
        let valid = weak_limit_valid(&p.spec, v, weak_threshold)?;
        let transmissions: Vec<f64> = p
            .spec
            .channels
            .iter()
            .map(|c| c.value(v))
            .collect::<fennec::Result<_>>()?;
        let r = row([
            ("v", v),
            ("phi1", phi1),
            ("external_flux", p.spec.external_flux),
            ("energy_j", e),
            ("energy_over_gap", e / gap),
            ("weak_ej_j", ej),
            ("weak_valid", if valid { 1.0 } else { 0.0 }),
        ]);
        let json = json!({
            "inputs": { "junction": p.spec, "phi1": phi1, "v": v },
            "result": { "energy_j": e, "energy_over_gap": e / gap, "transmissions": transmissions },
            "analytic": { "weak_limit_ej_j": ej, "weak_limit_valid": valid },
        });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}
