//! `rydcoh`: run the coherence and gate experiments, fit data, and work
//! the coherence budget from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.

mod budget;
mod failure;
mod fit;
mod output;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rydcoh_core::experiments::{ExperimentKind, PRESET_NAMES};

use crate::failure::Outcome;

#[derive(Parser)]
#[command(name = "rydcoh", version, about = "Ground-Rydberg coherence and blockade-gate simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write result.csv, manifest.json and optional fit.csv / plot.svg.
    Run(RunCmd),
    /// Fit a model to an x,y[,y_err] CSV file.
    Fit(FitCmd),
    /// Complete the coherence budget 1/tau_gr = 1/T2* + 1/T2' + 1/(2 T1).
    Budget(BudgetCmd),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunCmd {
    /// Experiment kind, e.g. ramsey-gr or cz-scan.
    kind: ExperimentKind,
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset (fig2b, fig3a, ...).
    #[arg(long)]
    preset: Option<String>,
    /// Master seed (default: the config's, else 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo shots.
    #[arg(long)]
    shots: Option<u64>,
    /// Output directory.
    #[arg(long, default_value_os_t = run::default_out())]
    out: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
    /// Fit model applied to the result curve.
    #[arg(long)]
    fit: Option<String>,
}

#[derive(Args)]
struct FitCmd {
    /// CSV with columns x, y and optionally y_err; a header row is allowed.
    data: PathBuf,
    /// Model name (damped-cosine, cosine, exponential, exponential-no-offset,
    /// exponential-half-offset, gaussian, kuhr, parabola, pi-train).
    #[arg(long, alias = "fit")]
    model: String,
    /// Fix the ground detection efficiency of the pi-train model.
    #[arg(long)]
    p1d: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    plot: bool,
}

/// Times accept unit suffixes (57us, 0.122ms) or bare seconds.
#[derive(Args)]
struct BudgetCmd {
    #[arg(long)]
    tau_gr: Option<String>,
    #[arg(long)]
    t2_echo: Option<String>,
    #[arg(long)]
    t1: Option<String>,
    #[arg(long)]
    t2_star: Option<String>,
    #[arg(long)]
    t2_prime: Option<String>,
}

fn execute(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Run(c) => {
            let args = run::RunArgs {
                kind: c.kind,
                config: c.config,
                preset: c.preset,
                seed: c.seed,
                shots: c.shots,
                out: c.out,
                plot: c.plot,
                fit: c.fit,
            };
            let manifest = run::cmd_run(&args)?;
            println!("wrote {}", manifest.display());
        }
        Command::Fit(c) => {
            let args = fit::FitArgs { data: c.data, model: c.model, p1d: c.p1d, out: c.out, plot: c.plot };
            let manifest = fit::cmd_fit(&args)?;
            println!("wrote {}", manifest.display());
        }
        Command::Budget(c) => {
            let args = budget::BudgetArgs { tau_gr: c.tau_gr, t2_echo: c.t2_echo, t1: c.t1, t2_star: c.t2_star, t2_prime: c.t2_prime };
            print!("{}", budget::cmd_budget(&args)?);
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                let c = rydcoh_core::experiments::preset(name)?;
                println!("{name:6} {}", c.kind.map(|k| k.to_string()).unwrap_or_default());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rydcoh: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
