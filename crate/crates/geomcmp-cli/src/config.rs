//! Config-file loading and the steps/tol/seed resolution chain.

use std::fmt;

use serde_json::{Map, Value};

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_SEED: u64 = 0;

/// Errors surfaced to the user. `Input` covers config-schema and I/O
/// problems; `Lib` wraps a failure from the computation itself, whose kind
/// picks the exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Lib(geomcmp::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<geomcmp::Error> for CliError {
    fn from(e: geomcmp::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    /// Exit-code taxonomy: 1 = a verified inequality failed, 2 = the
    /// instance does not meet the hypotheses, 3 = bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Lib(e) => match e {
                geomcmp::Error::FocalPoint { .. }
                | geomcmp::Error::NotPositiveDefinite(_)
                | geomcmp::Error::Domain(_) => 2,
                geomcmp::Error::Inconsistent(_) => 1,
                _ => 3,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Input(format!(
                "format must be \"csv\" or \"json\", got \"{other}\""
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Numeric knobs after the override chain: CLI flag, then a params key, then
/// the default.
#[derive(Clone, Copy, Debug)]
pub struct Resolved {
    pub steps: usize,
    pub tol: f64,
    pub seed: u64,
}

/// A parsed and fully resolved run description. `params` already carries the
/// resolved steps/tol/seed, so re-running the embedded config reproduces the
/// run without any flags.
pub struct RunConfig {
    pub experiment: String,
    pub params: Map<String, Value>,
    pub output: Option<String>,
    pub format: Format,
    pub resolved: Resolved,
}

pub struct Overrides {
    pub out: Option<String>,
    pub format: Option<String>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

fn positive_int(v: &Value, key: &str) -> Result<u64, CliError> {
    v.as_u64()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("{key}: expected a positive integer, got {v}")))
}

fn finite_number(v: &Value, key: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Input(format!("{key}: expected a finite number, got {v}")))
}

pub fn parse_config(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("config is not valid JSON: {e}")))?;
    let Value::Object(root) = root else {
        return Err(CliError::Input("config must be a JSON object".into()));
    };
    for key in root.keys() {
        if !matches!(key.as_str(), "experiment" | "params" | "output" | "format") {
            return Err(CliError::Input(format!(
                "unknown config key \"{key}\"; expected experiment, params, output, format"
            )));
        }
    }

    let experiment = root
        .get("experiment")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Input("experiment: missing required string".into()))?
        .to_owned();

    let mut params = match root.get("params") {
        None => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(other) => {
            return Err(CliError::Input(format!(
                "params: expected an object, got {other}"
            )))
        }
    };

    let output = match (overrides.out.as_ref(), root.get("output")) {
        (Some(path), _) => Some(path.clone()),
        (None, Some(Value::String(s))) => Some(s.clone()),
        (None, Some(Value::Null)) | (None, None) => None,
        (None, Some(other)) => {
            return Err(CliError::Input(format!(
                "output: expected a path string, got {other}"
            )))
        }
    };

    let format = match (overrides.format.as_ref(), root.get("format")) {
        (Some(s), _) => Format::parse(s)?,
        (None, Some(Value::String(s))) => Format::parse(s)?,
        (None, None) => Format::Csv,
        (None, Some(other)) => {
            return Err(CliError::Input(format!(
                "format: expected \"csv\" or \"json\", got {other}"
            )))
        }
    };

    let steps = match (overrides.steps, params.get("steps")) {
        (Some(n), _) => n,
        (None, Some(v)) => positive_int(v, "params.steps")? as usize,
        (None, None) => DEFAULT_STEPS,
    };
    let tol = match (overrides.tol, params.get("tol")) {
        (Some(t), _) => t,
        (None, Some(v)) => finite_number(v, "params.tol")?,
        (None, None) => DEFAULT_TOL,
    };
    if !(tol >= 0.0) {
        return Err(CliError::Input(format!(
            "tol: must be nonnegative, got {tol}"
        )));
    }
    let seed = match (overrides.seed, params.get("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v.as_u64().ok_or_else(|| {
            CliError::Input(format!(
                "params.seed: expected a nonnegative integer, got {v}"
            ))
        })?,
        (None, None) => DEFAULT_SEED,
    };

    // Write the resolved knobs back so the embedded config replays the run.
    params.insert("steps".into(), Value::from(steps as u64));
    params.insert(
        "tol".into(),
        serde_json::Number::from_f64(tol)
            .map(Value::Number)
            .unwrap_or(Value::Null),
    );
    params.insert("seed".into(), Value::from(seed));

    Ok(RunConfig {
        experiment,
        params,
        output,
        format,
        resolved: Resolved { steps, tol, seed },
    })
}

impl RunConfig {
    /// The config re-emitted verbatim inside the JSON summary.
    pub fn embedded(&self) -> Value {
        serde_json::json!({
            "experiment": self.experiment,
            "params": Value::Object(self.params.clone()),
            "output": self.output,
            "format": self.format.as_str(),
        })
    }
}
