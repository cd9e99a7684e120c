use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{Map, Value};

use rotor_open_qs::config::{run, Experiment, ExperimentConfig, RunError};

/// Run one named rotor experiment and write its CSV table.
#[derive(Parser, Debug)]
#[command(name = "rotor-open-qs", version)]
struct Cli {
    /// entropy-sweep, kicked-map, lindblad-kicked, lindblad-continuous,
    /// exact-two-rotor, bath-corr or mathieu
    experiment: Experiment,

    /// JSON config file with a flat key namespace.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output CSV path; overrides `output` in the config. Stdout if unset.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override a config key; the value is parsed as JSON, else taken as a
    /// string. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// Only validate the configuration.
    #[arg(long)]
    check: bool,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut obj = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            match serde_json::from_str::<Value>(&text).map_err(|e| format!("{}: {e}", path.display()))? {
                Value::Object(m) => m,
                _ => return Err(format!("{}: expected a JSON object", path.display())),
            }
        }
        None => Map::new(),
    };

    let name = Value::String(cli.experiment.name().into());
    if let Some(existing) = obj.get("experiment") {
        if existing != &name {
            return Err(format!(
                "config names experiment {existing} but the command line asks for {name}"
            ));
        }
    }
    obj.insert("experiment".into(), name);

    for p in &cli.params {
        let (key, raw) = p
            .split_once('=')
            .ok_or_else(|| format!("--param '{p}' is not of the form key=value"))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
        obj.insert(key.trim().into(), value);
    }
    if let Some(out) = &cli.out {
        obj.insert("output".into(), Value::String(out.to_string_lossy().into_owned()));
    }
    ExperimentConfig::from_json(Value::Object(obj)).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("[cli] {e}");
            return ExitCode::from(2);
        }
    };

    if cli.check {
        let violations = config.validate();
        if violations.is_empty() {
            return ExitCode::SUCCESS;
        }
        eprintln!("{}", RunError::Config(violations));
        return ExitCode::from(2);
    }

    let result = run(&config).and_then(|table| match &config.output {
        Some(path) => table.write_atomic(path.as_ref()).map_err(RunError::Io),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
