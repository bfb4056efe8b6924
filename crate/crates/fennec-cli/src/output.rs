//! CSV and JSON writers. Rows arrive in grid order; every file starts with
//! the config echo.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::commands::{PointOutput, Row};
use crate::config::{GridPoint, RunConfig};

pub type Outcomes = [(GridPoint, Result<PointOutput, String>)];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// 0.05 → "0.05", 5.0 → "5"; used in split file names.
fn label(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn swept_json(p: &GridPoint) -> Value {
    Value::Object(p.swept.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

pub fn write_json(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    summary: Option<&Value>,
    points: &Outcomes,
) -> std::io::Result<Vec<PathBuf>> {
    let pts: Vec<Value> = points
        .iter()
        .map(|(p, r)| match r {
            Ok(o) => json!({ "index": p.index, "swept": swept_json(p), "status": "ok", "result": o.json }),
            Err(e) => json!({ "index": p.index, "swept": swept_json(p), "status": "error", "error": e }),
        })
        .collect();
    let failures = points.iter().filter(|(_, r)| r.is_err()).count();
    let doc = json!({
        "subcommand": name,
        "config": cfg,
        "summary": summary,
        "failures": failures,
        "points": pts,
    });
    let path = dir.join(format!("{name}.json"));
    let mut text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(vec![path])
}

struct CsvFile {
    name: String,
    errors: Vec<String>,
    rows: Vec<Row>,
}

/// Files keep first-seen order.
fn entry(files: &mut Vec<CsvFile>, name: String) -> &mut CsvFile {
    match files.iter().position(|f| f.name == name) {
        Some(i) => &mut files[i],
        None => {
            files.push(CsvFile {
                name,
                errors: Vec::new(),
                rows: Vec::new(),
            });
            files.last_mut().unwrap()
        }
    }
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    summary: Option<&Value>,
    points: &Outcomes,
) -> std::io::Result<Vec<PathBuf>> {
    let echo = serde_json::to_string(cfg).map_err(std::io::Error::other)?;
    let split_idx: Vec<usize> = cfg
        .split_by
        .iter()
        .filter_map(|s| cfg.sweep.iter().position(|w| &w.parameter == s))
        .collect();
    let file_key = |p: &GridPoint| -> String {
        split_idx
            .iter()
            .map(|&i| format!("_{}_{}", p.swept[i].0, label(p.swept[i].1)))
            .collect()
    };

    let mut files: Vec<CsvFile> = Vec::new();
    let table_names: Vec<&str> = points
        .iter()
        .find_map(|(_, r)| r.as_ref().ok())
        .map(|o| o.tables.iter().map(|(t, _)| *t).collect())
        .unwrap_or_else(|| vec![""]);
    let fname = |table: &str, key: &str| {
        let t = if table.is_empty() {
            String::new()
        } else {
            format!("_{table}")
        };
        format!("{name}{t}{key}.csv")
    };
    for (p, r) in points {
        let key = file_key(p);
        match r {
            Ok(o) => {
                for (table, rows) in &o.tables {
                    let f = entry(&mut files, fname(table, &key));
                    for row in rows {
                        let mut row = row.clone();
                        for (k, v) in &p.swept {
                            if !row.iter().any(|(c, _)| c == k) {
                                row.push((k.clone(), *v));
                            }
                        }
                        f.rows.push(row);
                    }
                }
            }
            Err(e) => {
                let at: Vec<String> = p
                    .swept
                    .iter()
                    .map(|(k, v)| format!("{k}={}", num(*v)))
                    .collect();
                for table in &table_names {
                    entry(&mut files, fname(table, &key)).errors.push(format!(
                        "# error at point {} ({}): {}",
                        p.index,
                        at.join(", "),
                        e.replace('\n', " ")
                    ));
                }
            }
        }
    }

    let mut written = Vec::new();
    for CsvFile {
        name: f,
        errors,
        rows,
    } in files
    {
        let mut text = String::new();
        writeln!(text, "# fennec {name}").unwrap();
        writeln!(text, "# config: {echo}").unwrap();
        if let Some(s) = summary {
            writeln!(text, "# summary: {s}").unwrap();
        }
        for e in &errors {
            writeln!(text, "{e}").unwrap();
        }
        if let Some(first) = rows.first() {
            let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
            writeln!(text, "{}", header.join(",")).unwrap();
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|(_, v)| num(*v)).collect();
                writeln!(text, "{}", cells.join(",")).unwrap();
            }
        }
        let path = dir.join(&f);
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_numbers() {
        assert_eq!(label(0.05), "0.05");
        assert_eq!(label(5.000000000000001), "5");
        assert_eq!(label(0.5), "0.5");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
