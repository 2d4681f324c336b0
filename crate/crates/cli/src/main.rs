mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let (report, out, format) = match cli.command {
        Command::Spectrum(a) => {
            let cfg = RunConfig::from_args(&a.common)?;
            (commands::spectrum(&cfg)?, cfg.out, cfg.format)
        }
        Command::Condition(a) => (commands::condition(&a)?, a.common.out, a.common.format),
        Command::Convergence(a) => (commands::convergence(&a)?, a.common.out, a.common.format),
        Command::EtaSweep(a) => (commands::sweep(&a)?, a.common.out, a.common.format),
        Command::Dispersion(a) => {
            let cfg = RunConfig::from_args(&a)?;
            (commands::dispersion(&cfg)?, cfg.out, cfg.format)
        }
        Command::Verify(a) => {
            let (report, ok) = commands::verify(&a)?;
            report.emit(a.format, a.out.as_deref())?;
            if !ok {
                let failed = report.rows.iter().filter(|r| r[1] == output::Cell::Bool(false)).count();
                return Err(CliError::Verification(format!("{failed} check(s) failed")));
            }
            return Ok(());
        }
    };
    report.emit(format, out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("softiga: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
