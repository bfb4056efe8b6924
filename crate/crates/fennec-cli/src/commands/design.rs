//! bandwidth, compression, disorder-tolerance and mixing.

use fennec::constants::RESISTANCE_QUANTUM;
use fennec::design::{
    bandwidth, chi, compression_curve, disorder_first_order, disorder_tolerance, mixing_matrices,
    DisorderParam, MixingDrive, NormMetric, DEFAULT_COMPRESSION_RATIO,
};
use fennec::linalg::rows;
use fennec::network::GyratorCircuit;
use fennec::C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{
    circuit_echo, row, schema, split, CircuitParams, Context, PointOutput, Subcommand,
    CIRCUIT_SWEEPABLE,
};
use crate::config::{typed, SchemaError};

fn normalize(x: Option<f64>, w0: f64) -> Option<f64> {
    x.map(|v| v / w0)
}

pub struct Bandwidth;

impl Subcommand for Bandwidth {
    type Shared = ();
    type Input = GyratorCircuit;

    const NAME: &'static str = "bandwidth";
    const SWEEPABLE: &'static [&'static str] = &CIRCUIT_SWEEPABLE;

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<GyratorCircuit, SchemaError> {
        CircuitParams::parse(params)
    }

    fn evaluate(_: &(), c: &GyratorCircuit) -> fennec::Result<PointOutput> {
        let b = bandwidth(c)?;
        let w0 = c.omega0();
        let n = c.normalized();
        let json = json!({
            "inputs": circuit_echo(c),
            "result": {
                "omega_minus_norm": b.omega_minus / w0,
                "omega_plus_norm": b.omega_plus / w0,
                "delta_norm": b.delta / w0,
                "delta": b.delta,
                "search_start_norm": b.search_start / w0,
            },
            "residuals": b.residuals,
            "analytic": {
                "large_lc_delta_norm": normalize(b.large_lc_estimate, w0),
                "zero_lc_delta_norm": normalize(b.zero_lc_estimate, w0),
                "zero_lc_exact_delta_norm": normalize(b.zero_lc_exact, w0),
            },
        });
        let nan = f64::NAN;
        let r = row([
            ("lc_norm", n.lc),
            ("z0_norm", n.z0),
            ("g_norm", n.g),
            ("omega_minus_norm", b.omega_minus / w0),
            ("omega_plus_norm", b.omega_plus / w0),
            ("delta_norm", b.delta / w0),
            ("residual_minus", b.residuals[0]),
            ("residual_plus", b.residuals[1]),
            (
                "large_lc_delta_norm",
                b.large_lc_estimate.map_or(nan, |x| x / w0),
            ),
            (
                "zero_lc_delta_norm",
                b.zero_lc_estimate.map_or(nan, |x| x / w0),
            ),
        ]);
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}

pub struct Compression;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompressionExtra {
    /// Grid end in units of R_Q/(πZ0).
    #[serde(default = "default_n_max_scaled")]
    n_max_scaled: f64,
    #[serde(default = "default_n_count")]
    n_count: usize,
    #[serde(default = "default_ratio")]
    ratio: f64,
}

fn default_n_max_scaled() -> f64 {
    4.0
}
fn default_n_count() -> usize {
    2001
}
fn default_ratio() -> f64 {
    DEFAULT_COMPRESSION_RATIO
}

pub struct CompressionInput {
    circ: GyratorCircuit,
    grid: Vec<f64>,
    ratio: f64,
}

impl Subcommand for Compression {
    type Shared = ();
    type Input = CompressionInput;

    const NAME: &'static str = "compression";
    const SWEEPABLE: &'static [&'static str] = &[
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
        "n_max_scaled",
        "ratio",
    ];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<CompressionInput, SchemaError> {
        let (extra, rest) = split(params, &["n_max_scaled", "n_count", "ratio"]);
        let extra: CompressionExtra = typed(&extra)?;
        let circ = CircuitParams::parse(&rest)?;
        if !(extra.n_max_scaled > 0.0 && extra.n_max_scaled.is_finite()) {
            return Err(SchemaError::new("params.n_max_scaled", "must be > 0"));
        }
        if extra.n_count < 2 {
            return Err(SchemaError::new("params.n_count", "must be >= 2"));
        }
        if !(extra.ratio > 0.0 && extra.ratio < 1.0) {
            return Err(SchemaError::new("params.ratio", "must be in (0, 1)"));
        }
        let top = extra.n_max_scaled * RESISTANCE_QUANTUM / (std::f64::consts::PI * circ.z0());
        let grid = (0..extra.n_count)
            .map(|k| top * k as f64 / (extra.n_count - 1) as f64)
            .collect();
        Ok(CompressionInput {
            circ,
            grid,
            ratio: extra.ratio,
        })
    }

    fn evaluate(_: &(), p: &CompressionInput) -> fennec::Result<PointOutput> {
        let r = compression_curve(&p.circ, &p.grid, p.ratio)?;
        let z0 = p.circ.z0();
        let nz = p.circ.normalized().z0;
        let scale = std::f64::consts::PI * z0 / RESISTANCE_QUANTUM;
        let surface = (0..r.n.len())
            .map(|k| {
                row([
                    ("z0_ohm", z0),
                    ("n", r.n[k]),
                    ("n_scaled", r.n[k] * scale),
                    ("g_si", r.g[k]),
                    ("|S12|", r.s12_abs[k]),
                    ("|S12|_dB", r.s12_db[k]),
                    ("|S11|_dB", r.s11_db[k]),
                ])
            })
            .collect();
        let threshold = row([
            ("z0_norm", nz),
            ("z0_ohm", z0),
            ("n_1db", r.n_threshold),
            ("n_1db_scaled", r.n_threshold_scaled),
            ("n_max_estimate", r.n_max_estimate),
            ("n_1db_closed_form", r.n_threshold_lc0),
        ]);
        let json = json!({
            "inputs": { "circuit": circuit_echo(&p.circ), "ratio": p.ratio, "grid_points": p.grid.len() },
            "result": {
                "n_1db": r.n_threshold,
                "n_1db_scaled": r.n_threshold_scaled,
                "curve": { "n": r.n, "s12_db": r.s12_db, "s11_db": r.s11_db },
            },
            "residuals": { "closed_form_relative": (r.n_threshold - r.n_threshold_lc0).abs() / r.n_threshold_lc0 },
            "analytic": { "n_max": r.n_max_estimate, "n_1db_closed_form": r.n_threshold_lc0 },
        });
        Ok(PointOutput {
            json,
            tables: vec![("surface", surface), ("threshold", vec![threshold])],
        })
    }
}

pub struct DisorderTolerance;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ParamSelection {
    One(DisorderParam),
    Keyword(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceExtra {
    #[serde(default = "all")]
    param: ParamSelection,
    #[serde(default = "default_budget")]
    budget: f64,
    #[serde(default)]
    metric: NormMetric,
}

fn all() -> ParamSelection {
    ParamSelection::Keyword("all".into())
}
fn default_budget() -> f64 {
    0.01
}

pub struct ToleranceInput {
    circ: GyratorCircuit,
    params: Vec<DisorderParam>,
    budget: f64,
    metric: NormMetric,
}

impl Subcommand for DisorderTolerance {
    type Shared = ();
    type Input = ToleranceInput;

    const NAME: &'static str = "disorder-tolerance";
    const SWEEPABLE: &'static [&'static str] = &[
        "f0_ghz", "z_tl", "lc", "z0", "g", "d_lc", "d_c0", "d_l0", "c12", "l12", "budget",
    ];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<ToleranceInput, SchemaError> {
        let (extra, rest) = split(params, &["param", "budget", "metric"]);
        let extra: ToleranceExtra = typed(&extra)?;
        let params = match extra.param {
            ParamSelection::One(p) => vec![p],
            ParamSelection::Keyword(k) if k == "all" => DisorderParam::ALL.to_vec(),
            ParamSelection::Keyword(k) => {
                return Err(SchemaError::new(
                    "params.param",
                    format!("unknown disorder parameter `{k}`"),
                ));
            }
        };
        if !(extra.budget > 0.0 && extra.budget <= 0.2) {
            return Err(SchemaError::new("params.budget", "must be in (0, 0.2]"));
        }
        Ok(ToleranceInput {
            circ: CircuitParams::parse(&rest)?,
            params,
            budget: extra.budget,
            metric: extra.metric,
        })
    }

    fn evaluate(_: &(), p: &ToleranceInput) -> fennec::Result<PointOutput> {
        let w0 = p.circ.omega0();
        let n = p.circ.normalized();
        let mut r = row([("lc_norm", n.lc), ("z0_norm", n.z0), ("g_norm", n.g)]);
        let mut results = Vec::new();
        let mut residuals = Map::new();
        let mut analytic = Map::new();
        for &which in &p.params {
            let t = disorder_tolerance(&p.circ, which, p.budget, p.metric)?;
            // first-order slope of the metric per unit of this parameter
            let h = 1e-6 * which.scale(&p.circ);
            let base = p.circ.disorder;
            let probe = fennec::network::Disorder {
                d_lc: base.d_lc + which.disorder(h).d_lc,
                d_c0: base.d_c0 + which.disorder(h).d_c0,
                d_l0: base.d_l0 + which.disorder(h).d_l0,
                c12: base.c12 + which.disorder(h).c12,
                l12: base.l12 + which.disorder(h).l12,
            };
            let ds = disorder_first_order(&p.circ.with_disorder(probe), w0)?.ds;
            let estimate = p.budget * h / p.metric.apply(&ds) / which.scale(&p.circ);
            let name = which.name();
            r.push((format!("{name}_relative"), t.relative));
            r.push((format!("{name}_deviation"), t.deviation));
            r.push((format!("{name}_first_order"), estimate));
            residuals.insert(
                name.into(),
                json!((t.deviation - p.budget).abs() / p.budget),
            );
            analytic.insert(name.into(), json!({ "first_order_relative": estimate }));
            results.push(t);
        }
        let json = json!({
            "inputs": { "circuit": circuit_echo(&p.circ), "budget": p.budget, "metric": p.metric },
            "result": results,
            "residuals": residuals,
            "analytic": analytic,
        });
        Ok(PointOutput {
            json,
            tables: vec![("", vec![r])],
        })
    }
}

pub struct Mixing;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixingExtra {
    #[serde(default = "default_photons")]
    photon_number: f64,
    /// Incoming drive direction per port as [re, im].
    #[serde(default = "default_direction")]
    drive: [[f64; 2]; 2],
    /// Nonlinearity χ; defaults to 4/(R_Q C0 ω0).
    #[serde(default)]
    chi: Option<f64>,
}

fn default_photons() -> f64 {
    1.0
}
fn default_direction() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 0.0]]
}

pub struct MixingInput {
    circ: GyratorCircuit,
    drive: MixingDrive,
    photon_number: f64,
}

impl Subcommand for Mixing {
    type Shared = ();
    type Input = MixingInput;

    const NAME: &'static str = "mixing";
    const SWEEPABLE: &'static [&'static str] = &[
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
        "photon_number",
        "chi",
    ];

    fn shared(_: &Context, _: &Map<String, Value>) -> Result<(), SchemaError> {
        Ok(())
    }

    fn prepare(_: &(), params: &Map<String, Value>) -> Result<MixingInput, SchemaError> {
        let (extra, rest) = split(params, &["photon_number", "drive", "chi"]);
        let extra: MixingExtra = typed(&extra)?;
        let circ = CircuitParams::parse(&rest)?;
        let x = extra.chi.unwrap_or_else(|| chi(circ.c0, circ.omega0()));
        let dir = extra.drive.map(|[re, im]| C64::new(re, im));
        let drive =
            MixingDrive::from_photon_number(&circ, dir, x, extra.photon_number).map_err(schema)?;
        Ok(MixingInput {
            circ,
            drive,
            photon_number: extra.photon_number,
        })
    }

    fn evaluate(_: &(), p: &MixingInput) -> fennec::Result<PointOutput> {
        let m = mixing_matrices(&p.circ, &p.drive)?;
        let blocks = m
            .blocks
            .iter()
            .map(|b| {
                let mut r = row([
                    ("photon_number", p.photon_number),
                    ("target", b.target),
                    ("source", b.source),
                ]);
                for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    r.push((format!("re_M{}{}", i + 1, j + 1), b.m[(i, j)].re));
                    r.push((format!("im_M{}{}", i + 1, j + 1), b.m[(i, j)].im));
                }
                r
            })
            .collect();
        let json = json!({
            "inputs": {
                "circuit": circuit_echo(&p.circ),
                "photon_number": p.photon_number,
                "chi": p.drive.chi,
                "amplitudes": p.drive.amplitudes.map(|a| [a.re, a.im]),
            },
            "result": m,
            "static_block": rows(&m.static_block),
        });
        Ok(PointOutput {
            json,
            tables: vec![("", blocks)],
        })
    }
}
