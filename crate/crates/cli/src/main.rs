mod args;
mod commands;
mod error;
mod input;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Common, Format};
use commands::{config_of, Outcome};
use error::{CliError, CliResult};

const THREADS_VAR: &str = "IGK_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| error::invalid(format!("{THREADS_VAR} must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| error::invalid(format!("cannot size the thread pool: {e}")))
}

fn dispatch(cmd: &Command) -> (&'static str, &Common, Map<String, Value>, CliResult<Outcome>) {
    match cmd {
        Command::Tensor(a) => ("tensor", &a.common, config_of(a), commands::tensor(a)),
        Command::Pushforward(a) => ("pushforward", &a.common, config_of(a), commands::pushforward(a)),
        Command::Infoloss(a) => ("infoloss", &a.common, config_of(a), commands::infoloss(a)),
        Command::Sufficient(a) => ("sufficient", &a.common, config_of(a), commands::sufficient(a)),
        Command::Factorize(a) => ("factorize", &a.common, config_of(a), commands::factorize(a)),
        Command::DecomposeKernel(a) => ("decompose-kernel", &a.common, config_of(a), commands::decompose(a)),
        Command::CheckIntegrability(a) => (
            "check-integrability",
            &a.common,
            config_of(a),
            commands::integrability(a),
        ),
        Command::PaperExample(a) => ("paper-example", &a.common, config_of(a), commands::example(a)),
    }
}

fn render(name: &str, common: &Common, config: Map<String, Value>, outcome: Outcome) -> CliResult<String> {
    match common.format {
        Format::Json => {
            let mut report = Map::new();
            report.insert("tool".into(), json!("igk"));
            report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            report.insert("command".into(), json!(name));
            report.insert("config".into(), Value::Object(config));
            report.extend(outcome.fields);
            let text = serde_json::to_string_pretty(&Value::Object(report))
                .map_err(|e| CliError::Io(format!("cannot serialize the report: {e}")))?;
            Ok(text + "\n")
        }
        Format::Csv => outcome
            .csv
            .ok_or_else(|| error::invalid(format!("`{name}` has no CSV form"))),
    }
}

fn emit(text: &str, output: Option<&str>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write `{path}`: {e}"))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let (name, common, config, outcome) = dispatch(&cli.command);
    let text = render(name, common, config, outcome?)?;
    emit(&text, common.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
