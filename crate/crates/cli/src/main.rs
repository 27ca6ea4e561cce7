use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use swankit::config::{self, ModelConfig};
use swankit::report::{Report, Table};
use swankit::{commands, verify, CliError};

/// Swanson-oscillator toolkit: gauge transformations, position-dependent
/// mass forms, quasi-solvable sectors, and grid spectra from one JSON model
/// file. Exit code 0 means every check passed, 1 means the configuration
/// was rejected, 2 means a numerical check failed.
#[derive(Parser)]
#[command(name = "swankit", version, max_term_width = 100)]
struct Cli {
    /// Model configuration file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the emitted table to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Replace the per-command default check tolerance.
    #[arg(long, global = true, value_name = "EPS")]
    tol: Option<f64>,

    /// Emit a single JSON document on stdout instead of text and CSV.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gauge-transform the model; tabulate x, V_eff, sigma.
    Hermitize {
        /// Table rows, spaced uniformly over the domain.
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Recast the model in position-dependent-mass form; tabulate x, m, u, V.
    Pdm {
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Check the ansatz structure conditions and fit the invariant sector.
    TypeaCheck {
        /// Points for the sup-norm certificates.
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Solve the sector condition for the ansatz slope; tabulate u, B0.
    Riccati {
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Sector state to solve through (sorted by energy).
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Diagonalize the hermitized model on a grid; tabulate eigenvalues.
    Spectrum {
        /// Number of eigenvalues, counted from the bottom.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Override the configured grid (MIN:MAX:N; MIN may be negative).
        #[arg(
            long,
            value_parser = parse_grid_spec,
            value_name = "MIN:MAX:N",
            allow_hyphen_values = true
        )]
        grid: Option<(f64, f64, usize)>,
    },
    /// Run the full acceptance suite; needs no config.
    Verify,
}

fn parse_grid_spec(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected MIN:MAX:N, got `{text}`"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad MIN `{}`", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad MAX `{}`", parts[1]))?;
    let n: usize = parts[2].parse().map_err(|_| format!("bad N `{}`", parts[2]))?;
    Ok((lo, hi, n))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Hermitize { samples } => {
            let cfg = require_config(&cli)?;
            let (report, table) = commands::hermitize(&cfg, samples, cli.tol)?;
            emit(&cli, &report, Some(&table))
        }
        Command::Pdm { samples } => {
            let cfg = require_config(&cli)?;
            let (report, table) = commands::pdm(&cfg, samples, cli.tol)?;
            emit(&cli, &report, Some(&table))
        }
        Command::TypeaCheck { samples } => {
            let cfg = require_config(&cli)?;
            let (report, table) = commands::typea_check(&cfg, samples, cli.tol)?;
            emit(&cli, &report, table.as_ref())
        }
        Command::Riccati { samples, k } => {
            let cfg = require_config(&cli)?;
            let (report, table) = commands::riccati(&cfg, k, samples, cli.tol)?;
            emit(&cli, &report, Some(&table))
        }
        Command::Spectrum { k, grid } => {
            let cfg = require_config(&cli)?;
            let (report, table) = commands::spectrum(&cfg, k, grid, cli.tol)?;
            emit(&cli, &report, Some(&table))
        }
        Command::Verify => run_verify(cli.json),
    }
}

fn require_config(cli: &Cli) -> Result<ModelConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("this command needs --config <FILE>".into()))?;
    config::load(path)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Route the report and table to their channels.
///
/// JSON mode prints one document on stdout; the table rides along inside it
/// unless `--out` redirected the CSV to a file. Text mode keeps stdout
/// machine-readable: the CSV goes to stdout (report on stderr) unless
/// `--out` takes it, in which case the report gets stdout. Commands without
/// a table put the report text wherever `--out` points, or stdout.
fn emit(cli: &Cli, report: &Report, table: Option<&Table>) -> Result<ExitCode, CliError> {
    let out_display = cli.out.as_ref().map(|p| p.display().to_string());
    if let (Some(path), Some(table)) = (cli.out.as_ref(), table) {
        write_file(path, &table.to_csv())?;
    }

    if cli.json {
        let doc = report.to_json(table, out_display.as_deref());
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        match (table, cli.out.as_ref()) {
            (Some(_), Some(_)) => print!("{}", report.render_text()),
            (Some(table), None) => {
                print!("{}", table.to_csv());
                eprint!("{}", report.render_text());
            }
            (None, Some(path)) => write_file(path, &report.render_text())?,
            (None, None) => print!("{}", report.render_text()),
        }
    }

    Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run_verify(as_json: bool) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    if as_json {
        let criteria = verify::run_all();
        let passed = criteria.iter().filter(|c| c.pass).count();
        let doc = json!({
            "command": "verify",
            "criteria": criteria
                .iter()
                .map(|c| {
                    json!({
                        "index": c.index,
                        "name": c.name,
                        "pass": c.pass,
                        "detail": c.detail,
                        "seconds": c.seconds,
                    })
                })
                .collect::<Vec<_>>(),
            "passed": passed,
            "total": verify::COUNT,
            "seconds": start.elapsed().as_secs_f64(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("suite serializes"));
        return Ok(exit_for(passed));
    }

    let mut passed = 0usize;
    for index in 1..=verify::COUNT {
        let c = verify::run(index);
        println!("{}", verify::render_line(&c));
        if c.pass {
            passed += 1;
        }
    }
    println!(
        "verify: {passed}/{} criteria passed in {:.1}s",
        verify::COUNT,
        start.elapsed().as_secs_f64()
    );
    Ok(exit_for(passed))
}

fn exit_for(passed: usize) -> ExitCode {
    if passed == verify::COUNT {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
