use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accel_qed::{execute, CliError, Command, Format, Options, RunConfig};
use accel_qed_core::constants::CONSTANT_SET_ID;
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "accel-qed", version = long_version(), about = "Radiative shifts and dispersion energies of accelerated atoms")]
struct Cli {
    /// unruh, lamb, wall, pair or sweep
    #[arg(value_parser = parse_command)]
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output file (a directory for sweep); stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; otherwise taken from the config or the --out extension
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
}

fn long_version() -> String {
    format!("{} (constants {CONSTANT_SET_ID})", env!("CARGO_PKG_VERSION"))
}

fn parse_command(s: &str) -> Result<Command, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let text = fs::read_to_string(&cli.config).map_err(|source| CliError::Io {
        path: cli.config.clone(),
        source,
    })?;
    let cfg = RunConfig::parse(&text, Some(cli.command))?;
    let opts = Options {
        out: cli.out.clone(),
        format: cli.format,
        threads: cli.threads,
        base_dir: cli.config.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    };
    let report = execute(&cfg, &opts, &mut io::stdout().lock())?;
    if report.failed > 0 {
        eprintln!("accel-qed: {} of {} rows did not converge", report.failed, report.rows);
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for partial failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("accel-qed: {e}");
            ExitCode::from(1)
        }
    }
}
