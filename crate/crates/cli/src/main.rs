use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meanforce_cli::config::ScenarioConfig;
use meanforce_cli::output::output_path;
use meanforce_cli::plot::{render, PlotSpec};
use meanforce_cli::{dynamics, equilibrium, hmf, validate, with_pool, CliError};

#[derive(Parser, Debug)]
#[command(name = "meanforce", version, about = "Mean-force Gibbs states and refined Bloch-Redfield dynamics")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overrides the exact-diagonalisation tolerance (equilibrium, hmf) or
    /// the HEOM depth tolerance (dynamics).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Population and coherence sweeps over lambda, beta and Omega.
    Equilibrium { config: PathBuf },
    /// HEOM and Bloch-Redfield trajectories plus a steady-state summary.
    Dynamics { config: PathBuf },
    /// Hamiltonians of mean force per approximation, as JSON.
    Hmf { config: PathBuf },
    /// Invariant checks; exits with 1 if any fail.
    Validate,
    /// One SVG per observable and facet of a CSV.
    Plot { csv: PathBuf, plotspec: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    match cli.command {
        Command::Equilibrium { config } => {
            let s = ScenarioConfig::load(&config)?.equilibrium(cli.tol)?;
            let (path, rows) = with_pool(cli.jobs, || equilibrium::run_to_file(&s, &cli.out))??;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("wrote {} ({} rows, {failed} failed)", path.display(), rows.len());
        }
        Command::Dynamics { config } => {
            let s = ScenarioConfig::load(&config)?.dynamics(cli.tol)?;
            let (traj, summary, rows) = with_pool(cli.jobs, || dynamics::run_to_files(&s, &cli.out))??;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("wrote {} and {} ({failed} failed runs)", traj.display(), summary.display());
        }
        Command::Hmf { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let entries = with_pool(cli.jobs, || hmf::run(&cfg, cli.tol))??;
            let json = serde_json::to_string_pretty(&entries).map_err(|e| CliError::Io(e.to_string()))?;
            std::fs::create_dir_all(&cli.out)?;
            let path = output_path(&cli.out, &cfg.name, "hmf.json");
            std::fs::write(&path, &json)?;
            println!("{json}");
        }
        Command::Validate => {
            let path = cli.out.join("validate.json");
            let report = with_pool(cli.jobs, || validate::run_to_file(&path))??;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("report: {}", path.display());
            if !report.passed {
                return Err(CliError::ValidationFailed(report.failures));
            }
        }
        Command::Plot { csv, plotspec } => {
            let spec = PlotSpec::load(&plotspec)?;
            for p in render(&csv, &spec, &cli.out)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
