//! `mazer`: emission-probability sweeps, figure presets and densities as CSV.

mod config;
mod output;
mod presets;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, Settings, Task};

#[derive(Parser)]
#[command(name = "mazer", version, about = "Induced emission of atoms falling through a detuned cavity")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a sweep (or amplitude scan) and write it as CSV.
    Run(RunArgs),
    /// Probability densities |phi_a|^2, |phi_b|^2 at one parameter point.
    Density(RunArgs),
    /// Airy functions on a uniform grid.
    #[command(hide = true)]
    AiryTable {
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Figure preset.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES), conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV (stdout when absent). Peaks go to <out>.peaks.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// mesa, bvp or auto.
    #[arg(long)]
    solver: Option<String>,
    /// Integration tolerance for the bvp solver.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;

fn load(args: &RunArgs) -> Result<(Config, Settings), String> {
    let text = match (&args.preset, &args.config) {
        (Some(p), None) => presets::text(p).ok_or_else(|| format!("unknown preset {p}"))?.to_string(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?,
        _ => return Err("give exactly one of --preset or --config".into()),
    };
    let cfg = config::parse(&text)?;
    let settings = cfg.settings(args.solver.as_deref(), args.tol, args.threads)?;
    if let Some(n) = settings.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok((cfg, settings))
}

fn finish(out: &run::Outcome, path: Option<&PathBuf>) -> ExitCode {
    for n in &out.notes {
        eprintln!("{n}");
    }
    if let Err(e) = output::write_outcome(out, path) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if out.gaps.is_empty() {
        return ExitCode::SUCCESS;
    }
    eprintln!("{} point(s) failed:", out.gaps.len());
    for g in &out.gaps {
        eprintln!("  {} = {:.16e} [{}]: {}", out.table.header[0], g.x, g.column, g.error);
    }
    ExitCode::from(EXIT_SOLVER)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Run(args) => {
            let (cfg, settings) = match load(&args).and_then(|(c, s)| c.task(&s).map(|t| (t, s))) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let outcome = match &cfg {
                Task::Sweep(t) => run::sweep(t, &settings),
                Task::Amplitude(t) => run::amplitude(t),
            };
            finish(&outcome, args.out.as_ref())
        }
        Cmd::Density(args) => {
            let (task, settings) = match load(&args).and_then(|(c, s)| c.density_task().map(|t| (t, s))) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            match run::density(&task, &settings) {
                Ok(o) => finish(&o, args.out.as_ref()),
                Err(e) => {
                    eprintln!("solver error: {e}");
                    ExitCode::from(EXIT_SOLVER)
                }
            }
        }
        Cmd::AiryTable { from, to, count, out } => match output::airy_table(from, to, count) {
            Ok(o) => finish(&o, out.as_ref()),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
