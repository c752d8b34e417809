use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kzdk_cli::commands::{exit_code, run, Cli};
use serde_json::json;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("KZDK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = run(&cli);
    let code = exit_code(&result);
    let doc = match &result {
        Ok(report) => report.to_json(cli.emit_matrices),
        Err(e) => json!({ "schemaVersion": kzdk_cli::report::SCHEMA_VERSION, "error": e.to_string(), "exitCode": code }),
    };
    let text = serde_json::to_string_pretty(&doc).expect("serializable report");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(code as u8)
}
