//! Spectroscopy → E_J'(V) → G_max(V) pipeline.

use std::path::PathBuf;

use fennec::coupling::g_max;
use fennec::io::{load_spectroscopy, sidecar_path};
use fennec::junction::{ej_derivative, TabulatedEnergy};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{row, split, Context, PointOutput, Subcommand};
use crate::config::{typed, GridPoint, Scale, SchemaError, SweepSpec};

pub struct EstimateCoupling;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Source {
    /// `voltage,value` CSV; relative paths resolve against the config file.
    data: PathBuf,
    /// Metadata JSON; defaults to the data path with a `.json` extension.
    #[serde(default)]
    sidecar: Option<PathBuf>,
    /// Samples across the data range when no sweep over `v` is given.
    #[serde(default = "default_count")]
    v_count: usize,
}

fn default_count() -> usize {
    101
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointParams {
    v: f64,
    /// Φ_ex − Φ1 in units of Φ0; 0.25 gives |sin| = 1.
    #[serde(default = "default_flux")]
    flux_bias: f64,
}

fn default_flux() -> f64 {
    0.25
}

pub struct Shared {
    tab: TabulatedEnergy,
    v_count: usize,
    data: PathBuf,
    sidecar: PathBuf,
}

const SOURCE_KEYS: [&str; 3] = ["data", "sidecar", "v_count"];

impl Subcommand for EstimateCoupling {
    type Shared = Shared;
    type Input = PointParams;

    const NAME: &'static str = "estimate-coupling";
    const SWEEPABLE: &'static [&'static str] = &["v", "flux_bias"];

    fn shared(ctx: &Context, params: &Map<String, Value>) -> Result<Shared, SchemaError> {
        let (src, _) = split(params, &SOURCE_KEYS);
        let src: Source = typed(&src)?;
        let data = ctx.base_dir.join(&src.data);
        let sidecar = src
            .sidecar
            .map(|p| ctx.base_dir.join(p))
            .unwrap_or_else(|| sidecar_path(&data));
        let tab = load_spectroscopy(&data, Some(&sidecar)).map_err(|e| {
            let field = match &e {
                fennec::Error::Json(_) => "params.sidecar".to_string(),
                fennec::Error::InvalidParameter { field, .. } => format!("params.{field}"),
                _ => "params.data".to_string(),
            };
            SchemaError::new(field, e.to_string())
        })?;
        if src.v_count < 2 {
            return Err(SchemaError::new("params.v_count", "must be >= 2"));
        }
        Ok(Shared {
            tab,
            v_count: src.v_count,
            data,
            sidecar,
        })
    }

    fn default_sweep(
        shared: &Shared,
        params: &Map<String, Value>,
    ) -> Result<Vec<SweepSpec>, SchemaError> {
        if params.contains_key("v") {
            return Ok(Vec::new());
        }
        let (lo, hi) = shared.tab.hull();
        Ok(vec![SweepSpec {
            parameter: "v".into(),
            start: lo,
            stop: hi,
            count: shared.v_count,
            scale: Scale::Lin,
        }])
    }

    fn prepare(_: &Shared, params: &Map<String, Value>) -> Result<PointParams, SchemaError> {
        let (_, rest) = split(params, &SOURCE_KEYS);
        let p: PointParams = typed(&rest)?;
        if !p.v.is_finite() || !p.flux_bias.is_finite() {
            return Err(SchemaError::new("params.v", "must be finite"));
        }
        Ok(p)
    }

    fn evaluate(shared: &Shared, p: &PointParams) -> fennec::Result<PointOutput> {
        let ej = shared.tab.ej(p.v)?;
        let d1 = ej_derivative(&shared.tab, p.v, 1)?;
        let gm = g_max(d1);
        let g = gm * (2.0 * std::f64::consts::PI * p.flux_bias).sin();
        let r = row([
            ("v", p.v),
            ("ej_j", ej),
            ("ej_prime_j_per_v", d1),
            ("g_max_s", gm),
            ("g_s", g),
        ]);
        let json = json!({ "v": p.v, "flux_bias": p.flux_bias, "ej_j": ej, "ej_prime_j_per_v": d1, "g_max_s": gm, "g_s": g });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }

    fn summary(
        shared: &Shared,
        points: &[(GridPoint, Result<PointOutput, String>)],
    ) -> Option<Value> {
        let best = points
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .filter_map(|o| Some((o.json["v"].as_f64()?, o.json["g_max_s"].as_f64()?)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
        let (lo, hi) = shared.tab.hull();
        Some(json!({
            "best_v0": best.0,
            "g_max_at_best_s": best.1,
            "data": shared.data,
            "sidecar": shared.sidecar,
            "kind": shared.tab.kind,
            "unit": shared.tab.unit,
            "samples": shared.tab.voltage.len(),
            "voltage_range": [lo, hi],
        }))
    }
}
