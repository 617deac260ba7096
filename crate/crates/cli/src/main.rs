//! `zsl` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
//! Malformed input files surface as errors on stderr, never as panics.

mod args;
mod commands;
mod manifest;

use clap::Parser;

use args::{Cli, Command, EvalMode};
use zsl_core::Error;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::BuildVocab(a) => commands::build_vocab(a),
        Command::Synth(a) => commands::synth(a),
        Command::Train(a) => commands::train(a),
        Command::Classify(a) => commands::classify(a),
        Command::Eval(a) => match &a.mode {
            EvalMode::Auc(a) => commands::eval_auc(a),
            EvalMode::Error(a) => commands::eval_error(a),
            EvalMode::Curve(a) => commands::eval_curve(a),
        },
        Command::Nn(a) => commands::nn(a),
        Command::Export(a) => commands::export(a),
        Command::Split(a) => commands::split(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Usage errors are bad invocations; everything the input files cause is data.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFiniteLoss { .. } => 3,
        Error::InvalidConfig(_) | Error::BadFractions(_) | Error::KTooLarge { .. } => 1,
        _ => 2,
    }
}
