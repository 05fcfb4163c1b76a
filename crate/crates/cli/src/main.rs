use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eprfw_cli::commands;
use eprfw_cli::config::{Format, Layer, RunConfig, Sweep};
use eprfw_cli::error::{CliError, EXIT_CHECK_FAILED, EXIT_OK};
use eprfw_cli::output::{emit, render};
use eprfw_core::geometry::SpinConnectionSign;
use eprfw_core::transport::TransportOptions;
use eprfw_core::verify::VerifyOptions;

/// Spin transport and Bell correlations of EPR pairs orbiting a cosmic string.
#[derive(Debug, Parser)]
#[command(name = "eprfw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric, tetrad and connection components with oracle values.
    Geometry,
    /// Closed-form and numeric spin transport operators.
    Transport,
    /// CHSH values of the transported singlet.
    Bell,
    /// Run every invariant and oracle check; exit 1 on any failure.
    Verify,
}

#[derive(Debug, Args)]
struct Flags {
    /// String parameter alpha, 0 < alpha <= 1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Orbital rapidity.
    #[arg(long, global = true, conflicts_with = "beta", allow_hyphen_values = true)]
    xi: Option<f64>,
    /// Orbital speed v/c in [0, 1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Orbit radius.
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Azimuth swept by each particle.
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Speed of light.
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<f64>,
    /// var:start:stop:count with var one of alpha, xi, beta, phi. Repeatable.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sweep: Vec<String>,
    /// Step count of the numeric integrator.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Read angle inputs in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    /// key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, hide = true)]
    inject_omega_flip: bool,
}

impl Flags {
    fn layer(&self) -> Result<Layer, CliError> {
        Ok(Layer {
            alpha: self.alpha,
            xi: self.xi,
            beta: self.beta,
            rho: self.rho,
            phi: self.phi,
            c: self.c,
            steps: self.steps,
            sweeps: self.sweep.iter().map(|s| s.parse::<Sweep>()).collect::<Result<_, _>>()?,
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse::<Format>).transpose()?,
            degrees: self.degrees.then_some(true),
        })
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let file = match &cli.flags.config {
        Some(path) => Layer::read_config(path)?,
        None => Layer::default(),
    };
    let cfg = RunConfig::resolve(&cli.flags.layer()?, &file)?;
    let transport = TransportOptions {
        omega_sign: if cli.flags.inject_omega_flip {
            SpinConnectionSign::Literal
        } else {
            SpinConnectionSign::Tabulated
        },
        ..TransportOptions::default()
    };
    let (name, table, status) = match cli.command {
        Command::Geometry => ("geometry", commands::geometry(&cfg)?, EXIT_OK),
        Command::Transport => ("transport", commands::transport(&cfg, &transport)?, EXIT_OK),
        Command::Bell => ("bell", commands::bell(&cfg)?, EXIT_OK),
        Command::Verify => {
            let mut opts = VerifyOptions {
                transport,
                ..VerifyOptions::default()
            };
            if let Some(n) = cli.flags.steps.or(file.steps) {
                opts.fine_steps = n.max(1);
            }
            let (table, passed) = commands::verify(&opts)?;
            let failed = table.rows.iter().filter(|r| r[4] == eprfw_cli::output::Cell::Bool(false)).count();
            eprintln!("verify: {} checks, {} failed", table.rows.len(), failed);
            ("verify", table, if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    };
    emit(&render(&table, name, &cfg)?, cfg.out.as_deref())?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
