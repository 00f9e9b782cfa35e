mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use output::{emit, error_object, pretty};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            print!("{}", pretty(&error_object("usage", e.render().to_string().trim())));
            return ExitCode::from(1);
        }
    };
    let (result, out) = match &cli.command {
        Command::Weights(a) => (commands::weights(a), a.family.output.out.clone()),
        Command::Verify(a) => (commands::verify(a), a.family.output.out.clone()),
        Command::Recurrence(a) => (commands::recurrence(a), a.family.output.out.clone()),
        Command::Moments(a) => (commands::moments(a), a.family.output.out.clone()),
        Command::Validate(a) => (commands::validate_cmd(a), a.family.output.out.clone()),
        Command::Families(o) => (commands::families(o), o.out.clone()),
    };
    match result {
        Ok(outcome) => match emit(out.as_deref(), &outcome.body) {
            Ok(()) => ExitCode::from(outcome.exit),
            Err(e) => {
                print!("{}", pretty(&error_object("io", &e.to_string())));
                ExitCode::from(1)
            }
        },
        Err(e) => {
            print!("{}", pretty(&error_object(e.kind(), &e.to_string())));
            ExitCode::from(1)
        }
    }
}
