mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use crate::commands::run;
use crate::config::{Cli, RunConfig};

fn emit_error(record: serde_json::Value) {
    eprintln!("{record}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error(json!({ "error": "invalid_config", "message": e.kind().to_string(), "detail": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::try_from(cli) {
        Ok(c) => c,
        Err(msg) => {
            emit_error(json!({ "error": "invalid_config", "message": msg }));
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
            let _ = writeln!(std::io::stdout(), "{text}");
            if let Some(dir) = &cfg.out {
                if let Err(e) = output::write_json(&dir.join(format!("{}_summary.json", cfg.command.name())), &outcome.summary)
                {
                    emit_error(json!({ "error": "io", "message": e.to_string() }));
                    return ExitCode::from(1);
                }
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                emit_error(json!({ "error": "certification", "message": "at least one check was refused; see the summary" }));
                ExitCode::from(1)
            }
        }
        Err(f) => {
            emit_error(f.record());
            ExitCode::from(1)
        }
    }
}
