//! `pencillab`: run compatibility and curvature checks on metric pairs and
//! explicit families, printing a summary and optionally writing a JSON report.
//!
//! Exit codes: 0 when every check holds, 2 when any fails or is
//! inconclusive, 1 on usage, input or I/O errors.

mod args;
mod pairfile;
mod report;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run::run(&cli) {
        Ok(report) => {
            for r in &report.records {
                println!("{}", r.summary);
            }
            if let Some(path) = cli.common().report.as_deref() {
                if let Err(e) = report.write_atomic(path) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
