use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use melnikov::exactalg::rational::parse_rational;
use melnikov::Rational;
use melnikov_cli::{
    cmd_normal_form, cmd_sample_curve, cmd_scan, cmd_verify, cmd_zeros, exit_code, CliError,
    Format, InstanceSpec, Output, ScanParams, VerifyParams,
};

/// Melnikov functions, certified zero counts and limit cycles of perturbed
/// piecewise-rational centers.
#[derive(Parser)]
#[command(name = "melnikov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Instance file.
    #[arg(long)]
    spec: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact normal form of the Melnikov function.
    NormalForm {
        #[command(flatten)]
        common: Common,
    },
    /// Certify the zeros of the Melnikov function.
    Zeros {
        #[command(flatten)]
        common: Common,
        /// Decimal digits for interval endpoints.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Compare certified zeros with limit cycles of the perturbed flow.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Perturbation size, overrides `eps` in the spec.
        #[arg(long, value_parser = rational)]
        eps: Option<Rational>,
        /// Number of grid labels scanned for cycles.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Count zeros over random coefficients from the box of the spec.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tabulate certified values of the Melnikov function.
    SampleCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Enclosure width is at most 10^-precision.
        #[arg(long)]
        precision: Option<u32>,
    },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<InstanceSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    InstanceSpec::parse(&text)
        .map_err(|e| CliError::Validation(format!("{}:{}: {}", path.display(), e.line, e.message)))
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>), CliError> {
    let (common, output) = match &cli.command {
        Command::NormalForm { common } => {
            let spec = load(&common.spec)?;
            (
                common,
                cmd_normal_form(&spec, common.format.unwrap_or(Format::Text))?,
            )
        }
        Command::Zeros { common, precision } => {
            let spec = load(&common.spec)?;
            (
                common,
                cmd_zeros(&spec, common.format.unwrap_or(Format::Text), *precision)?,
            )
        }
        Command::Verify {
            common,
            eps,
            points,
            precision,
        } => {
            let spec = load(&common.spec)?;
            let params = VerifyParams {
                eps: eps.clone(),
                grid: *points,
                precision: *precision,
            };
            (
                common,
                cmd_verify(&spec, common.format.unwrap_or(Format::Text), &params)?,
            )
        }
        Command::Scan {
            common,
            samples,
            seed,
        } => {
            let spec = load(&common.spec)?;
            let params = ScanParams {
                samples: *samples,
                seed: *seed,
            };
            (
                common,
                cmd_scan(&spec, common.format.unwrap_or(Format::Csv), &params)?,
            )
        }
        Command::SampleCurve {
            common,
            points,
            precision,
        } => {
            let spec = load(&common.spec)?;
            (
                common,
                cmd_sample_curve(
                    &spec,
                    common.format.unwrap_or(Format::Csv),
                    *points,
                    *precision,
                )?,
            )
        }
    };
    Ok((output, common.out.clone()))
}

fn emit(output: &Output, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, &output.body)
                .with_context(|| format!("writing {}", path.display()))?;
            println!("{}", output.summary);
        }
        None => print!("{}", output.body),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, out)) => {
            if let Err(e) = emit(&output, out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(3);
            }
            if exit_code(output.status) != 0 {
                eprintln!("{}", output.summary);
            }
            ExitCode::from(exit_code(output.status) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
