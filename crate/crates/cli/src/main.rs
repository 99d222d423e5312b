mod cli;
mod commands;
mod config;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};

use cli::{Cli, Command};
use config::{ExperimentConfig, FileConfig, Format};
use error::CliError;

const THREADS_VAR: &str = "PEAKON_SPECTRA_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Validation(format!("{THREADS_VAR} = {raw:?} is not a positive integer"))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn sink(cfg: &ExperimentConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(
    command: Command,
    cli: &Cli,
    resolved: &mut Option<ExperimentConfig>,
) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.opts.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = resolved.insert(ExperimentConfig::resolve(command, file, &cli.opts)?);
    let outcome = commands::run(command, cfg)?;

    let mut report = Map::new();
    report.insert("command".into(), json!(command.name()));
    report.insert("pass".into(), json!(outcome.pass));
    report.insert(
        "config".into(),
        serde_json::to_value(&*cfg).expect("serializable"),
    );
    report.extend(outcome.result);
    let report = Value::Object(report);

    match cfg.format {
        Format::Json => output::write_json(sink(cfg)?, &report)?,
        Format::Csv => {
            outcome.table.write(sink(cfg)?)?;
            if cfg.output_path.is_some() {
                output::write_json(io::stdout().lock(), &report)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own failure code collides with the numerical-failure code
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let command = cli.command;
    let mut resolved = None;
    match execute(command, &cli, &mut resolved) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("peakon-spectra {}: {err}", command.name());
            let record = json!({
                "command": command.name(),
                "config": resolved.as_ref().map(|c| serde_json::to_value(c).expect("serializable")),
                "error": err.record(),
            });
            let _ = output::write_json(io::stdout().lock(), &record);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
