//! Subcommand implementations. Each one turns a parameter block into typed
//! inputs (schema stage) and evaluates a single grid point (solver stage).

use std::path::PathBuf;

use fennec::design::{optimal_conductance, DisorderParam};
use fennec::network::{Disorder, GyratorCircuit, Normalized};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{typed, GridPoint, SchemaError, SweepSpec};

pub mod circulator;
pub mod coupling;
pub mod design;
pub mod gyrator;
pub mod junction;
pub mod lindblad;
pub mod nonlinear;

/// Named numeric columns of one CSV row.
pub type Row = Vec<(String, f64)>;

#[derive(Debug, Clone, Default)]
pub struct PointOutput {
    pub json: Value,
    /// (table name, rows); the empty name is the main table.
    pub tables: Vec<(&'static str, Vec<Row>)>,
}

pub struct Context {
    /// Directory of the config file; relative data paths resolve against it.
    pub base_dir: PathBuf,
}

pub trait Subcommand {
    type Shared: Sync;
    type Input: Send + Sync;

    const NAME: &'static str;
    const SWEEPABLE: &'static [&'static str];

    fn shared(ctx: &Context, params: &Map<String, Value>) -> Result<Self::Shared, SchemaError>;

    /// Sweep used when the config has none.
    fn default_sweep(
        _shared: &Self::Shared,
        _params: &Map<String, Value>,
    ) -> Result<Vec<SweepSpec>, SchemaError> {
        Ok(Vec::new())
    }

    fn prepare(
        shared: &Self::Shared,
        params: &Map<String, Value>,
    ) -> Result<Self::Input, SchemaError>;

    fn evaluate(shared: &Self::Shared, input: &Self::Input) -> fennec::Result<PointOutput>;

    fn summary(
        _shared: &Self::Shared,
        _points: &[(GridPoint, Result<PointOutput, String>)],
    ) -> Option<Value> {
        None
    }
}

/// Maps a validation failure from the core library onto the config field.
pub fn schema(e: fennec::Error) -> SchemaError {
    match e {
        fennec::Error::InvalidParameter { field, reason } => {
            SchemaError::new(format!("params.{field}"), reason)
        }
        other => SchemaError::new("params", other.to_string()),
    }
}

/// Separates the keys in `names` from the rest of the block.
pub fn split(
    params: &Map<String, Value>,
    names: &[&str],
) -> (Map<String, Value>, Map<String, Value>) {
    let mut picked = Map::new();
    let mut rest = Map::new();
    for (k, v) in params {
        if names.contains(&k.as_str()) {
            picked.insert(k.clone(), v.clone());
        } else {
            rest.insert(k.clone(), v.clone());
        }
    }
    (picked, rest)
}

pub fn row(pairs: impl IntoIterator<Item = (impl Into<String>, f64)>) -> Row {
    pairs.into_iter().map(|(k, v)| (k.into(), v)).collect()
}

pub fn db(x: f64) -> f64 {
    20.0 * x.log10()
}

/// Either a normalized conductance G·Z_TL or the string "G0" for the matching value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConductanceSpec {
    Value(f64),
    Named(String),
}

impl Default for ConductanceSpec {
    fn default() -> Self {
        ConductanceSpec::Named("G0".into())
    }
}

fn default_f0() -> f64 {
    7.0
}

fn default_z_tl() -> f64 {
    50.0
}

/// Normalized two-port parameters. Disorder entries are fractions of the
/// natural scale of each element (C0, L0, or L_c).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    #[serde(default = "default_f0")]
    pub f0_ghz: f64,
    #[serde(default = "default_z_tl")]
    pub z_tl: f64,
    pub lc: f64,
    pub z0: f64,
    #[serde(default)]
    pub g: ConductanceSpec,
    #[serde(default)]
    pub d_lc: f64,
    #[serde(default)]
    pub d_c0: f64,
    #[serde(default)]
    pub d_l0: f64,
    #[serde(default)]
    pub c12: f64,
    #[serde(default)]
    pub l12: f64,
}

pub const CIRCUIT_SWEEPABLE: [&str; 10] = [
    "f0_ghz", "z_tl", "lc", "z0", "g", "d_lc", "d_c0", "d_l0", "c12", "l12",
];

impl CircuitParams {
    pub fn parse(params: &Map<String, Value>) -> Result<GyratorCircuit, SchemaError> {
        typed::<CircuitParams>(params)?.build()
    }

    pub fn build(&self) -> Result<GyratorCircuit, SchemaError> {
        if !(self.f0_ghz > 0.0 && self.f0_ghz.is_finite()) {
            return Err(SchemaError::new("params.f0_ghz", "must be > 0"));
        }
        if !(self.z_tl > 0.0 && self.z_tl.is_finite()) {
            return Err(SchemaError::new("params.z_tl", "must be > 0"));
        }
        let omega0 = 2.0 * std::f64::consts::PI * self.f0_ghz * 1e9;
        let base = GyratorCircuit::from_normalized(
            Normalized {
                lc: self.lc,
                z0: self.z0,
                g: 1.0,
            },
            omega0,
            self.z_tl,
        );
        let g = match &self.g {
            ConductanceSpec::Value(v) => v / self.z_tl,
            ConductanceSpec::Named(s) if s == "G0" => optimal_conductance(&base),
            ConductanceSpec::Named(s) => {
                return Err(SchemaError::new(
                    "params.g",
                    format!("expected a number or \"G0\", got \"{s}\""),
                ))
            }
        };
        let mut d = Disorder::default();
        for (p, frac) in DisorderParam::ALL
            .iter()
            .zip([self.d_lc, self.d_c0, self.d_l0, self.c12, self.l12])
        {
            if !frac.is_finite() {
                return Err(SchemaError::new(
                    format!("params.{}", p.name()),
                    "must be finite",
                ));
            }
            let v = frac * p.scale(&base);
            match p {
                DisorderParam::DLc => d.d_lc = v,
                DisorderParam::DC0 => d.d_c0 = v,
                DisorderParam::DL0 => d.d_l0 = v,
                DisorderParam::C12 => d.c12 = v,
                DisorderParam::L12 => d.l12 = v,
            }
        }
        let circ = base.with_g(g).with_disorder(d);
        circ.validate().map_err(schema)?;
        Ok(circ)
    }
}

/// Echo of the normalized circuit actually simulated.
pub fn circuit_echo(c: &GyratorCircuit) -> Value {
    let n = c.normalized();
    serde_json::json!({
        "omega0": c.omega0(),
        "z_tl": c.z_tl,
        "lc_norm": n.lc,
        "z0_norm": n.z0,
        "g_norm": n.g,
        "circuit": c,
    })
}
