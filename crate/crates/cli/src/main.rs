mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Validate(a) => a.threads.threads,
        Command::Flow(a) => a.threads.threads,
        Command::Behaviour(a) => a.threads.threads,
        Command::Synth(a) => a.threads.threads,
        Command::Report(a) => a.threads.threads,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Flow(a) => commands::flow(a),
        Command::Behaviour(a) => commands::behaviour(a),
        Command::Synth(a) => commands::synth(a),
        Command::Report(a) => commands::report(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error());
            ExitCode::from(match e {
                CliError::Input(_) => 1,
                CliError::Invariant(_) => 2,
            })
        }
    }
}
