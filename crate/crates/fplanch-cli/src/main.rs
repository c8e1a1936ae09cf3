//! Command-line driver: verification suites and data sweeps for the
//! truncated Fourier-Plancherel functional model.
//!
//! Exit codes: 0 all checks pass / output written, 1 check failure,
//! 2 usage or configuration error.

mod checks;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use config::RunConfig;
use fplanch::io;
use fplanch::spectral::{
    fit_loglog_slope, non_normality_witness, resolvent_bounds_operator, SpectrumSegment,
};
use fplanch::unitary::{forward_u, inverse_u};

#[derive(Parser)]
#[command(name = "fplanch", version, about = "Truncated Fourier-Plancherel functional model")]
struct Cli {
    /// JSON configuration file; every field has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Machine-readable JSON output only.
    #[arg(long, global = true)]
    json: bool,

    /// Output directory for CSV sweeps.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the number of log-grid nodes.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Override the mu-grid upper end.
    #[arg(long, global = true, value_name = "MU")]
    mu_max: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every identity suite and emit a pass/fail report.
    Verify {
        /// Include the dense spectral-radius and operator-norm estimates.
        #[arg(long)]
        slow: bool,
    },
    /// Write the eigenvalue curves with the segment endpoints as metadata.
    Spectrum,
    /// Sweep the analytic resolvent bounds and the numeric oracle over the z grid.
    Resolvent,
    /// Apply a transform to samples from a CSV file.
    Transform {
        /// Input CSV (with its JSON sidecar next to it).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Output CSV path.
        #[arg(long)]
        output: PathBuf,
    },
    /// Tabulate the non-normality witness along the normal at the origin.
    Witness {
        /// Comma-separated decreasing offsets; defaults to the config list.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Half-line samples to model-space channels.
    Forward,
    /// Model-space channels back to half-line samples.
    Inverse,
    /// The truncated Fourier operator on half-line samples.
    Fourier,
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(mu_max) = cli.mu_max {
        cfg.mu_max = mu_max;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("configuration error: {msg}");
            return ExitCode::from(2);
        }
    };

    let outcome = match &cli.command {
        Command::Verify { slow } => cmd_verify(&cfg, *slow, cli.json),
        Command::Spectrum => cmd_spectrum(&cfg, cli.json),
        Command::Resolvent => cmd_resolvent(&cfg, cli.json),
        Command::Transform {
            input,
            direction,
            output,
        } => cmd_transform(&cfg, input, *direction, output, cli.json),
        Command::Witness { deltas } => cmd_witness(&cfg, deltas.as_deref(), cli.json),
    };

    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_verify(cfg: &RunConfig, slow: bool, json: bool) -> Result<ExitCode, String> {
    let report = checks::run_verify(cfg, slow);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        );
    } else {
        for c in &report.checks {
            println!(
                "{} {:<28} value = {:>12.5e}  tolerance = {:>9.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.check,
                c.value,
                c.tolerance
            );
        }
        let passed = report.checks.iter().filter(|c| c.pass).count();
        println!("{passed}/{} checks passed", report.checks.len());
        if let Some(first) = report.first_failure() {
            println!("first failure: {}", first.check);
        }
    }
    Ok(if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_spectrum(cfg: &RunConfig, json: bool) -> Result<ExitCode, String> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
    let path = cfg.out_dir.join("spectrum.csv");
    io::write_eigencurve_csv(&path, &cfg.mu_grid()).map_err(|e| e.to_string())?;
    emit_path_note(json, "spectrum", &path);
    Ok(ExitCode::SUCCESS)
}

fn cmd_resolvent(cfg: &RunConfig, json: bool) -> Result<ExitCode, String> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
    let mu_grid = cfg.mu_grid();
    let seg = SpectrumSegment;
    let zg = &cfg.z_grid;
    let mut rows = Vec::new();
    for i in 0..zg.steps {
        for j in 0..zg.steps {
            let re = zg.re_min + (zg.re_max - zg.re_min) * i as f64 / (zg.steps - 1) as f64;
            let im = zg.im_min + (zg.im_max - zg.im_min) * j as f64 / (zg.steps - 1) as f64;
            let z = Complex64::new(re, im);
            if seg.distance_to(z) < 1e-6 {
                continue;
            }
            rows.push(resolvent_bounds_operator(z, &mu_grid).map_err(|e| e.to_string())?);
        }
    }
    let path = cfg.out_dir.join("resolvent.csv");
    io::write_resolvent_field_csv(&path, &rows).map_err(|e| e.to_string())?;
    emit_path_note(json, "resolvent", &path);
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(
    cfg: &RunConfig,
    input: &PathBuf,
    direction: Direction,
    output: &PathBuf,
    json: bool,
) -> Result<ExitCode, String> {
    match direction {
        Direction::Forward => {
            let x = io::read_halfline_csv(input).map_err(|e| e.to_string())?;
            let phi = forward_u(&x, &cfg.mu_grid());
            io::write_model_csv(output, &phi).map_err(|e| e.to_string())?;
        }
        Direction::Inverse => {
            let phi = io::read_model_csv(input).map_err(|e| e.to_string())?;
            let x = inverse_u(&phi, &cfg.log_grid());
            io::write_halfline_csv(output, &x).map_err(|e| e.to_string())?;
        }
        Direction::Fourier => {
            let x = io::read_halfline_csv(input).map_err(|e| e.to_string())?;
            let fx = fplanch::apply_trunc_fourier(&x);
            io::write_halfline_csv(output, &fx).map_err(|e| e.to_string())?;
        }
    }
    emit_path_note(json, "transform", output);
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(cfg: &RunConfig, deltas: Option<&[f64]>, json: bool) -> Result<ExitCode, String> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
    let deltas = deltas.unwrap_or(&cfg.deltas);
    let rows = non_normality_witness(deltas, &cfg.mu_grid()).map_err(|e| e.to_string())?;
    let path = cfg.out_dir.join("witness.csv");
    io::write_witness_csv(&path, &rows).map_err(|e| e.to_string())?;
    let slope = fit_loglog_slope(&rows);
    if json {
        println!(
            "{}",
            serde_json::json!({
                "output": path,
                "rows": rows.len(),
                "loglog_slope": slope,
            })
        );
    } else {
        println!("witness table written to {}", path.display());
        match slope {
            Some(s) => println!("fitted log-log slope of the resolvent norm: {s:.6}"),
            None => println!("single row; no slope fit"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_path_note(json: bool, what: &str, path: &std::path::Path) {
    if json {
        println!("{}", serde_json::json!({ "command": what, "output": path }));
    } else {
        println!("{what} written to {}", path.display());
    }
}
