//! Spectroscopy ingestion: `voltage,value` CSV plus a JSON sidecar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::junction::{TabKind, TabulatedEnergy};
use crate::units::{Energy, EnergyUnit};

/// Sidecar metadata. `E_C` is given in `unit`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectroscopyMeta {
    pub kind: TabKind,
    #[serde(default)]
    pub unit: EnergyUnit,
    #[serde(rename = "E_C", default)]
    pub e_c: Option<f64>,
    #[serde(default)]
    pub smoothing: f64,
}

/// Reads `voltage,value` rows. Lines starting with '#' are skipped.
pub fn read_spectroscopy_csv<R: std::io::Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Ingest(format!("missing column `{name}`")))
    };
    let (iv, ix) = (col("voltage")?, col("value")?);
    let (mut v, mut y) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize, name: &str| -> Result<f64> {
            let s = rec
                .get(i)
                .ok_or_else(|| Error::Ingest(format!("row {}: missing {name}", line + 1)))?;
            s.parse::<f64>()
                .map_err(|_| Error::Ingest(format!("row {}: bad {name} `{s}`", line + 1)))
        };
        v.push(parse(iv, "voltage")?);
        y.push(parse(ix, "value")?);
    }
    if v.is_empty() {
        return Err(Error::Ingest("no data rows".into()));
    }
    Ok((v, y))
}

/// Default sidecar location: `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn load_spectroscopy(csv_path: &Path, meta_path: Option<&Path>) -> Result<TabulatedEnergy> {
    let meta_path = meta_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| sidecar_path(csv_path));
    let meta: SpectroscopyMeta = serde_json::from_reader(std::fs::File::open(&meta_path)?)?;
    let (v, y) = read_spectroscopy_csv(std::fs::File::open(csv_path)?)?;
    tabulate(v, y, &meta)
}

pub fn tabulate(v: Vec<f64>, y: Vec<f64>, meta: &SpectroscopyMeta) -> Result<TabulatedEnergy> {
    let e_c = meta.e_c.map(|x| Energy::new(x, meta.unit));
    TabulatedEnergy::new(v, y, meta.kind, meta.unit, e_c, meta.smoothing)
}
