//! The `hqfnn` command line.

pub mod args;
pub mod commands;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Run the command line and return the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match args::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match &cli.command {
        Command::Train(a) => a.common.threads,
        Command::Eval(a) => a.common.threads,
        Command::Gradcheck(a) => a.common.threads,
        Command::NoiseSweep(a) => a.common.threads,
    };
    if threads > 0 {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match cli.command {
        Command::Train(a) => commands::cmd_train(a),
        Command::Eval(a) => commands::cmd_eval(a),
        Command::Gradcheck(a) => commands::cmd_gradcheck(a),
        Command::NoiseSweep(a) => commands::cmd_noise_sweep(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure { code, message }) => {
            eprintln!("error: {}", one_line(&message));
            code
        }
    }
}
