//! Run configuration: a parameter block, an optional Cartesian sweep, and
//! output grouping.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Configuration problem, reported with exit status 2.
#[derive(Debug)]
pub struct SchemaError {
    pub field: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn record(&self) -> Value {
        serde_json::json!({ "error": "schema", "field": self.field, "message": self.message })
    }
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error in `{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_scale")]
    pub scale: Scale,
}

fn default_scale() -> Scale {
    Scale::Lin
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Lin => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub sweep: Vec<SweepSpec>,
    /// Sweep parameters that each get their own CSV file, one per value.
    #[serde(default)]
    pub split_by: Vec<String>,
}

pub fn load(path: &Path) -> Result<RunConfig, SchemaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError::new("--config", format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." {
            "config".to_string()
        } else {
            path
        };
        SchemaError::new(field, e.into_inner().to_string())
    })
}

/// One point of the sweep grid: the parameter block with swept values substituted.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub swept: Vec<(String, f64)>,
    pub params: Map<String, Value>,
}

impl RunConfig {
    /// Checks the sweep against the parameters a subcommand accepts.
    pub fn validate(&self, sweepable: &[&str]) -> Result<(), SchemaError> {
        for (i, s) in self.sweep.iter().enumerate() {
            let field = |f: &str| format!("sweep[{i}].{f}");
            if !sweepable.contains(&s.parameter.as_str()) {
                return Err(SchemaError::new(
                    field("parameter"),
                    format!(
                        "unknown parameter `{}`; sweepable: {}",
                        s.parameter,
                        sweepable.join(", ")
                    ),
                ));
            }
            if self.sweep[..i].iter().any(|o| o.parameter == s.parameter) {
                return Err(SchemaError::new(
                    field("parameter"),
                    format!("`{}` is swept twice", s.parameter),
                ));
            }
            if s.count < 2 {
                return Err(SchemaError::new(field("count"), "must be >= 2"));
            }
            if !(s.start.is_finite() && s.stop.is_finite()) {
                return Err(SchemaError::new(field("start"), "endpoints must be finite"));
            }
            if !(s.start < s.stop) {
                return Err(SchemaError::new(
                    field("stop"),
                    "must be greater than start",
                ));
            }
            if s.scale == Scale::Log && s.start <= 0.0 {
                return Err(SchemaError::new(
                    field("start"),
                    "log sweeps need start > 0",
                ));
            }
        }
        for (i, name) in self.split_by.iter().enumerate() {
            if !self.sweep.iter().any(|s| &s.parameter == name) {
                return Err(SchemaError::new(
                    format!("split_by[{i}]"),
                    format!("`{name}` is not swept"),
                ));
            }
        }
        Ok(())
    }

    /// Row-major Cartesian grid: the first sweep entry varies slowest.
    pub fn grid(&self) -> Vec<GridPoint> {
        let axes: Vec<Vec<f64>> = self.sweep.iter().map(SweepSpec::values).collect();
        let total: usize = axes.iter().map(Vec::len).product();
        (0..total)
            .map(|index| {
                let mut rem = index;
                let mut idx = vec![0; axes.len()];
                for (k, axis) in axes.iter().enumerate().rev() {
                    idx[k] = rem % axis.len();
                    rem /= axis.len();
                }
                let mut params = self.params.clone();
                let mut swept = Vec::with_capacity(axes.len());
                for ((s, axis), &j) in self.sweep.iter().zip(&axes).zip(&idx) {
                    params.insert(s.parameter.clone(), Value::from(axis[j]));
                    swept.push((s.parameter.clone(), axis[j]));
                }
                GridPoint {
                    index,
                    swept,
                    params,
                }
            })
            .collect()
    }
}

/// Deserialises a parameter block, naming the offending field on failure.
pub fn typed<T: serde::de::DeserializeOwned>(
    params: &Map<String, Value>,
) -> Result<T, SchemaError> {
    let v = Value::Object(params.clone());
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." {
            "params".to_string()
        } else {
            format!("params.{path}")
        };
        SchemaError::new(field, e.into_inner().to_string())
    })
}
