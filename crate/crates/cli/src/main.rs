//! `hiz`: expansions, coefficient queries and verification suites.
//!
//! Exit codes: 0 success, 1 verification failure or solver failure,
//! 2 invalid arguments.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hiz_core::HizError;
use serde_json::json;

use args::{Cli, Command, Format};

fn run(cli: &Cli) -> commands::CmdResult {
    match &cli.command {
        Command::Expand { k, coupling, order, symbolic, labels, seed } => {
            commands::expand(*k, coupling, *order, *symbolic, *labels, seed.seed)
        }
        Command::Solve { k, beta, backend, seed } => commands::solve(*k, *beta, *backend, seed.seed),
        Command::Coeff(a) => commands::coeff(a),
        Command::K3(a) => commands::k3(a),
        Command::Graph { k, weights, labels, seed } => commands::graph(*k, *weights, *labels, seed.seed),
        Command::Verify(a) => commands::verify(a),
        Command::Largey { order, k, check, seed } => commands::largey(*order, *k, *check, seed.seed),
        Command::Mc { ensemble, k, samples, seed, x, lambda } => {
            commands::mc(ensemble, *k, *samples, seed.seed, x, lambda)
        }
    }
}

fn exit_code(e: &HizError) -> u8 {
    match e {
        HizError::InconsistentSystem { .. } | HizError::Collocation(_) | HizError::NonFinite(_) => 1,
        _ => 2,
    }
}

fn error_kind(e: &HizError) -> &'static str {
    match e {
        HizError::CoincidentEigenvalues(_) => "coincident_eigenvalues",
        HizError::MismatchedK { .. } => "mismatched_k",
        HizError::InvalidArgument(_) => "invalid_argument",
        HizError::UnsupportedK { .. } => "unsupported_k",
        HizError::UndefinedRule { .. } => "undefined_rule",
        HizError::Parse(_) => "parse",
        HizError::InconsistentSystem { .. } => "inconsistent_system",
        HizError::Collocation(_) => "collocation",
        HizError::InsufficientSamples(_) => "insufficient_samples",
        HizError::NonFinite(_) => "non_finite",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json output"),
            };
            // a closed pipe is not an error worth reporting
            let _ = writeln!(stdout, "{body}");
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(e) => {
            let code = exit_code(&e);
            match cli.format {
                Format::Json => {
                    let err = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() }, "exit_code": code });
                    let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&err).expect("json output"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(code)
        }
    }
}
