//! Experiment runner: loads a JSON config, dispatches to the named
//! experiment, and emits CSV data plus a JSON summary with a deterministic
//! byte layout.

mod config;
mod experiments;
mod params;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{parse_config, CliError, Overrides, RunConfig};
use params::ParamReader;
use registry::{ExperimentRegistry, Outcome};

#[derive(Parser)]
#[command(
    name = "geomcmp",
    version,
    about = "Comparison-geometry experiment runner",
    disable_help_subcommand = true
)]
struct Cli {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides the config's `output`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Primary output format: csv or json. Defaults to the config's choice,
    /// then csv.
    #[arg(long)]
    format: Option<String>,
    /// Override the integration step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the verdict tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the random seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors; everything else is bad input.
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| {
        CliError::Input(format!("cannot read config {}: {e}", cli.config.display()))
    })?;
    let overrides = Overrides {
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        format: cli.format.clone(),
        steps: cli.steps,
        tol: cli.tol,
        seed: cli.seed,
    };
    let run_config = parse_config(&text, &overrides)?;

    let registry = ExperimentRegistry::standard();
    let experiment = registry.get(&run_config.experiment)?;
    let reader = ParamReader::new(&run_config.params);
    let outcome = experiment.run(&reader, &run_config.resolved)?;

    let exit = outcome.status.exit_code();
    let summary = json!({
        "experiment": run_config.experiment,
        "config": run_config.embedded(),
        "results": outcome.results,
        "status": outcome.status.as_str(),
        "exit_code": exit,
    });
    let summary_text = format!(
        "{}\n",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );

    write_outputs(&run_config, &outcome, &summary_text)?;
    Ok(exit as u8)
}

/// File output carries both artifacts: the chosen format lands at the given
/// path and the other format beside it with an extra extension. Stdout gets
/// the chosen format only.
fn write_outputs(
    run_config: &RunConfig,
    outcome: &Outcome,
    summary_text: &str,
) -> Result<(), CliError> {
    use config::Format;
    match &run_config.output {
        None => {
            match run_config.format {
                Format::Csv => print!("{}", outcome.csv),
                Format::Json => print!("{summary_text}"),
            }
            Ok(())
        }
        Some(path) => {
            let (main_text, companion_path, companion_text) = match run_config.format {
                Format::Csv => (outcome.csv.as_str(), format!("{path}.json"), summary_text),
                Format::Json => (summary_text, format!("{path}.csv"), outcome.csv.as_str()),
            };
            std::fs::write(path, main_text)
                .map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
            std::fs::write(&companion_path, companion_text)
                .map_err(|e| CliError::Input(format!("cannot write {companion_path}: {e}")))?;
            Ok(())
        }
    }
}
