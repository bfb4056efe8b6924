use fennec::nonlinear::{
    error_hamiltonian_report, series_coefficients, JunctionSeriesInput, ModeData, Truncation,
    DEFAULT_M_MAX, DEFAULT_N_MAX,
};
use fennec::units::Energy;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{row, Context, PointOutput, Subcommand};
use crate::config::{typed, SchemaError};

pub struct NonlinearReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JunctionJets {
    gap: Energy,
    /// Per channel [T, T', T'', T''', T''''] at the operating voltage (derivatives in 1/V^n).
    channels: Vec<[f64; 5]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    junctions: Vec<JunctionJets>,
    modes: Vec<ModeData>,
    #[serde(default)]
    coupling_capacitance: f64,
    #[serde(default = "n_max")]
    n_max: usize,
    #[serde(default = "m_max")]
    m_max: usize,
    #[serde(default = "factor")]
    much_less_factor: f64,
}

fn n_max() -> usize {
    DEFAULT_N_MAX
}
fn m_max() -> usize {
    DEFAULT_M_MAX
}
fn factor() -> f64 {
    0.1
}

impl Subcommand for NonlinearReport {
    type Shared = ();
    type Input = Params;

    const NAME: &'static str = "nonlinear-report";
    const SWEEPABLE: &'static [&'static str] = &["coupling_capacitance", "much_less_factor"];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<Params, SchemaError> {
        let p: Params = typed(params)?;
        if p.junctions.is_empty() {
            return Err(SchemaError::new(
                "params.junctions",
                "at least one junction is required",
            ));
        }
        if p.modes.len() != p.junctions.len() {
            return Err(SchemaError::new(
                "params.modes",
                "one entry per junction required",
            ));
        }
        if !(p.much_less_factor > 0.0) {
            return Err(SchemaError::new("params.much_less_factor", "must be > 0"));
        }
        if p.n_max < 1 || p.n_max > 4 || p.m_max < 1 {
            return Err(SchemaError::new(
                "params.n_max",
                "need 1 <= n_max <= 4 and m_max >= 1",
            ));
        }
        Ok(p)
    }

    fn evaluate(_: &(), p: &Params) -> fennec::Result<PointOutput> {
        let inputs: Vec<JunctionSeriesInput> = p
            .junctions
            .iter()
            .map(|j| JunctionSeriesInput::from_channels(j.gap.si(), &j.channels, p.m_max))
            .collect();
        let coeffs = series_coefficients(
            &inputs,
            Truncation {
                n_max: p.n_max,
                m_max: p.m_max,
            },
        )?;
        let report = error_hamiltonian_report(
            &coeffs,
            &p.modes,
            p.coupling_capacitance,
            p.much_less_factor,
        )?;
        let checks = report
            .checks
            .iter()
            .map(|c| {
                row([
                    ("junction", c.junction as f64),
                    ("n", c.n as f64),
                    ("l", c.l as f64),
                    ("lhs", c.lhs),
                    ("rhs", c.rhs),
                    ("margin", c.margin),
                    ("pass", if c.pass { 1.0 } else { 0.0 }),
                ])
            })
            .collect();
        let json = json!({ "inputs": p, "coefficients": coeffs, "report": report });
        Ok(PointOutput {
            json,
            tables: vec![("", checks)],
        })
    }
}
