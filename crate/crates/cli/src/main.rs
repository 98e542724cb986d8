use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nilgeom_cli::{run, Cli, CliError, RunConfig, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            if cfg.output.is_none() {
                let _ = std::io::stdout().write_all(outcome.report.as_bytes());
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
