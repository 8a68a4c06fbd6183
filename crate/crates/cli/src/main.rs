mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use levsplit::harness::HarnessError;

use args::{expand_config, Cli};

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage_error { 1 } else { 0 });
        }
    };
    match commands::execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let diverged = matches!(
                e.downcast_ref::<HarnessError>(),
                Some(HarnessError::Divergence { .. })
            );
            ExitCode::from(if diverged { 2 } else { 1 })
        }
    }
}
