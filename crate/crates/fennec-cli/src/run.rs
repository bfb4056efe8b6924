//! Sweep dispatch: validate every grid point, evaluate in parallel, write outputs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use crate::commands::{Context, PointOutput, Subcommand};
use crate::config::{GridPoint, RunConfig, SchemaError};
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Options {
    pub config_path: PathBuf,
    pub out: PathBuf,
    pub format: Format,
    pub jobs: Option<usize>,
    pub verbose: bool,
}

pub enum Failure {
    Schema(SchemaError),
    AllFailed(Vec<String>),
    Io(std::io::Error),
}

pub struct Report {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

pub fn run<C: Subcommand>(mut cfg: RunConfig, opts: &Options) -> Result<Report, Failure> {
    let base_dir = opts
        .config_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let ctx = Context { base_dir };
    let shared = C::shared(&ctx, &cfg.params).map_err(Failure::Schema)?;
    if cfg.sweep.is_empty() {
        cfg.sweep = C::default_sweep(&shared, &cfg.params).map_err(Failure::Schema)?;
    }
    cfg.validate(C::SWEEPABLE).map_err(Failure::Schema)?;
    let grid = cfg.grid();
    let inputs: Vec<C::Input> = grid
        .iter()
        .map(|p| {
            C::prepare(&shared, &p.params).map_err(|mut e| {
                if grid.len() > 1 {
                    e.message = format!("{} (grid point {})", e.message, p.index);
                }
                e
            })
        })
        .collect::<Result<_, _>>()
        .map_err(Failure::Schema)?;
    if opts.verbose {
        eprintln!("{}: {} grid point(s)", C::NAME, grid.len());
    }

    let eval = || -> Vec<Result<PointOutput, String>> {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| {
                let r = C::evaluate(&shared, input).map_err(|e| e.to_string());
                if opts.verbose {
                    eprintln!("  point {i}: {}", if r.is_ok() { "ok" } else { "failed" });
                }
                r
            })
            .collect()
    };
    let results = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Io(std::io::Error::other(e)))?
            .install(eval),
        None => eval(),
    };

    let outcomes: Vec<(GridPoint, Result<PointOutput, String>)> =
        grid.into_iter().zip(results).collect();
    let warnings: Vec<String> = outcomes
        .iter()
        .filter_map(|(p, r)| {
            r.as_ref()
                .err()
                .map(|e| format!("point {} failed: {e}", p.index))
        })
        .collect();
    if !outcomes.is_empty() && warnings.len() == outcomes.len() {
        return Err(Failure::AllFailed(warnings));
    }
    let summary: Option<Value> = C::summary(&shared, &outcomes);
    std::fs::create_dir_all(&opts.out).map_err(Failure::Io)?;
    let files = match opts.format {
        Format::Csv => output::write_csv(&opts.out, C::NAME, &cfg, summary.as_ref(), &outcomes),
        Format::Json => output::write_json(&opts.out, C::NAME, &cfg, summary.as_ref(), &outcomes),
    }
    .map_err(Failure::Io)?;
    Ok(Report { files, warnings })
}
