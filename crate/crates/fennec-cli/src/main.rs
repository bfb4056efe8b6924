mod commands;
mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};

use commands::{circulator, coupling, design, gyrator, junction, lindblad, nonlinear};
use run::{Failure, Format, Options};

#[derive(Parser)]
#[command(
    name = "fennec",
    version,
    about = "Flux-charge gyrator and circulator design sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(ClapSubcommand, Clone, Copy)]
enum Command {
    /// Andreev bound-state energy of a multichannel junction.
    JunctionEnergy,
    /// E_J'(V) and G_max(V) from spectroscopy data.
    EstimateCoupling,
    /// Two-port S-parameters over frequency and circuit parameters.
    GyratorSweep,
    /// Band edges where |S11| = |S12|.
    Bandwidth,
    /// |S12| against drive photon number and the 1 dB point.
    Compression,
    /// Largest disorder per element within an error budget on S.
    DisorderTolerance,
    /// First-order frequency-mixing matrices under a drive.
    Mixing,
    /// Three-port circulator S-parameters.
    Circulator,
    /// Quantum scattering from the driven master equation.
    Lindblad,
    /// Higher-order junction terms and impedance tolerance checks.
    NonlinearReport,
}

fn dispatch(cmd: Command, cfg: config::RunConfig, opts: &Options) -> Result<run::Report, Failure> {
    match cmd {
        Command::JunctionEnergy => run::run::<junction::JunctionEnergy>(cfg, opts),
        Command::EstimateCoupling => run::run::<coupling::EstimateCoupling>(cfg, opts),
        Command::GyratorSweep => run::run::<gyrator::GyratorSweep>(cfg, opts),
        Command::Bandwidth => run::run::<design::Bandwidth>(cfg, opts),
        Command::Compression => run::run::<design::Compression>(cfg, opts),
        Command::DisorderTolerance => run::run::<design::DisorderTolerance>(cfg, opts),
        Command::Mixing => run::run::<design::Mixing>(cfg, opts),
        Command::Circulator => run::run::<circulator::Circulator>(cfg, opts),
        Command::Lindblad => run::run::<lindblad::Lindblad>(cfg, opts),
        Command::NonlinearReport => run::run::<nonlinear::NonlinearReport>(cfg, opts),
    }
}

fn schema_exit(e: &config::SchemaError) -> ExitCode {
    eprintln!("error: {e}");
    eprintln!("{}", e.record());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config_path) = cli.config.clone() else {
        return schema_exit(&config::SchemaError::new(
            "--config",
            "a configuration file is required",
        ));
    };
    let cfg = match config::load(&config_path) {
        Ok(c) => c,
        Err(e) => return schema_exit(&e),
    };
    let opts = Options {
        config_path,
        out: cli.out,
        format: cli.format,
        jobs: cli.jobs,
        verbose: cli.verbose,
    };
    match dispatch(cli.command, cfg, &opts) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &report.files {
                if opts.verbose {
                    eprintln!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Schema(e)) => schema_exit(&e),
        Err(Failure::AllFailed(msgs)) => {
            for m in &msgs {
                eprintln!("error: {m}");
            }
            eprintln!(
                "{}",
                serde_json::json!({ "error": "all_points_failed", "points": msgs })
            );
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
