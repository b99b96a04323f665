use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use contact_bounds::cli::{self, ConfigError, ProblemConfig, RunError};

#[derive(Parser)]
#[command(
    name = "contact-bounds",
    version,
    about = "Admissible load intervals for hyperelastic bodies in unilateral contact"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration and report intervals, energies and checks.
    Run(Common),
    /// Closed-form intervals over a range of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of a1, a2, a, g, A, b1, b2, C1, C2, C.
        #[arg(long)]
        param: String,
        /// lo,hi,steps
        #[arg(long, value_parser = parse_range)]
        range: (f64, f64, usize),
    },
    /// Check every invariant for a configuration; exit 1 on any failure.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Report,
    Csv,
    Json,
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi, steps] => Ok((
            lo.parse().map_err(|_| format!("bad lower bound {lo}"))?,
            hi.parse().map_err(|_| format!("bad upper bound {hi}"))?,
            steps.parse().map_err(|_| format!("bad step count {steps}"))?,
        )),
        _ => Err("expected lo,hi,steps".into()),
    }
}

fn load(common: &Common) -> Result<ProblemConfig, RunError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| ConfigError::Validation(format!("cannot read {}: {e}", common.config.display())))?;
    let mut config = cli::parse_config(&text)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(q) = common.quad_order {
        config.quad_order = q;
    }
    if let Some(n) = common.grid_n {
        config.grid_n = n;
    }
    config.validate()?;
    Ok(config)
}

fn emit(common: &Common, text: &str) -> Result<(), RunError> {
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| ConfigError::Validation(format!("cannot write {}: {e}", path.display())).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: &Command) -> Result<i32, RunError> {
    match command {
        Command::Run(common) => {
            let report = cli::run(&load(common)?)?;
            let text = match common.format {
                Format::Report => cli::render_report(&report),
                Format::Csv => cli::render_run_csv(&report),
                Format::Json => cli::render_structured(&report),
            };
            emit(common, &text)?;
            Ok(0)
        }
        Command::Sweep { common, param, range } => {
            let rows = cli::sweep(&load(common)?, param, range.0, range.1, range.2)?;
            emit(common, &cli::render_csv(&rows))?;
            Ok(0)
        }
        Command::Verify(common) => {
            let report = cli::verify(&load(common)?)?;
            emit(common, &report.render())?;
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
