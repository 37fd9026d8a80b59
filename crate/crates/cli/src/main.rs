use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use vnls_cli::{Mode, Overrides, Status};

/// Exact vector soliton constructions and property checks.
#[derive(Debug, Parser)]
#[command(name = "vnls", version)]
struct Args {
    #[arg(value_enum)]
    mode: Mode,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suite seed (overrides `suite.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Suite sample count (overrides `suite.samples`).
    #[arg(long)]
    samples: Option<usize>,
}

fn execute(args: &Args) -> Result<u8> {
    let overrides = Overrides { out: args.out.clone(), seed: args.seed, samples: args.samples };
    let outcome = vnls_cli::run_file(args.mode, &args.config, &overrides)?;
    for check in &outcome.report.checks {
        let status = match check.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Recorded => "info",
        };
        match check.tolerance {
            Some(t) => println!("{status:4} {:<32} {:.3e} (tolerance {t:.0e})", check.name, check.residual),
            None => println!("{status:4} {:<32} {:.3e}", check.name, check.residual),
        }
    }
    println!("wrote {}", outcome.out_dir.display());
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
