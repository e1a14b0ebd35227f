mod args;
mod manifest;
mod run;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, UsageError};
use manifest::{read_manifest, sha256_hex, write_atomic, ErrorRecord, OutputFile, RunManifest, MANIFEST_FILE};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(n) = std::env::var("SKINBENCH_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return usage(format!("SKINBENCH_THREADS must be a positive integer, got {n:?}")),
        }
    }
    let cmd = match prepare(&cli) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    execute(&cmd, &cli.out)
}

/// Resolves the command to run from flags, config file or a replayed
/// manifest.
fn prepare(cli: &Cli) -> Result<Command, UsageError> {
    let mut cmd = if let Some(path) = &cli.replay {
        if cli.command.is_some() {
            return Err(UsageError("--replay takes no subcommand".into()));
        }
        let m = read_manifest(path).map_err(UsageError)?;
        if m.tool_version != env!("CARGO_PKG_VERSION") {
            eprintln!("warning: manifest written by version {}, running {}", m.tool_version, env!("CARGO_PKG_VERSION"));
        }
        args::merge(&m.command, m.config, json!({}))?
    } else {
        let Some(cmd) = &cli.command else {
            return Err(UsageError("a subcommand or --replay is required".into()));
        };
        let file = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| UsageError(format!("bad config {}: {e}", p.display())))?
            }
            None => json!({}),
        };
        args::merge(cmd.name(), file, args::to_json(cmd))?
    };
    args::resolve(&mut cmd)?;
    Ok(cmd)
}

fn execute(cmd: &Command, out: &Path) -> ExitCode {
    let name = cmd.name();
    let config = args::to_json(cmd);
    let hash = sha256_hex(serde_json::to_string(&json!({ "command": name, "config": config })).unwrap().as_bytes());
    let precision = args::precision_of(cmd);
    let ctx = precision.ctx().expect("resolved precision");
    let start = Instant::now();
    let result = run::run(cmd, &hash[..16]);
    let mut manifest = RunManifest {
        command: name.into(),
        config,
        precision_digits: ctx.digits(),
        precision_bits: ctx.bits(),
        double_emulation: precision.double_emulation.unwrap_or(false),
        seeds: BTreeMap::new(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        wall_time_seconds: 0.0,
        outputs: vec![],
        metrics: Value::Null,
        notes: vec![],
        status: "ok".into(),
        error: None,
    };
    let code = match result {
        Ok(outcome) => {
            for (file, body) in &outcome.files {
                if let Err(e) = write_atomic(&out.join(file), body.as_bytes()) {
                    eprintln!("error: cannot write {}: {e}", out.join(file).display());
                    return ExitCode::FAILURE;
                }
                manifest.outputs.push(OutputFile { file: file.clone(), sha256: sha256_hex(body.as_bytes()), bytes: body.len() });
            }
            manifest.metrics = outcome.metrics;
            manifest.seeds = outcome.seeds;
            manifest.notes = outcome.notes;
            ExitCode::SUCCESS
        }
        Err(e) if e.is_numerical() || matches!(e, skinbench::Error::FitFailure(_)) => {
            eprintln!("numerical failure: {e}");
            manifest.status = "numerical_failure".into();
            manifest.error = Some(ErrorRecord { kind: error_kind(&e), message: e.to_string() });
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(e) => return usage(e),
    };
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    if let Err(e) = write_atomic(&out.join(MANIFEST_FILE), text.as_bytes()) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::FAILURE;
    }
    if manifest.status == "ok" {
        println!("{name}: wrote {} file(s) to {}", manifest.outputs.len(), out.display());
        println!("{}", serde_json::to_string_pretty(&manifest.metrics).unwrap_or_default());
    }
    code
}

fn error_kind(e: &skinbench::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}
