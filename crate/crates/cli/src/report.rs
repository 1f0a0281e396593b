use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::time::Duration;

use minors_core::Error;
use serde::Serialize;
use serde_json::Value;

use crate::Command;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Refused(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Input(m) | CliError::Refused(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Refused(m) => CliError::Refused(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Prefixes a parse error with the file it came from.
pub fn in_file(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::Parse { line, column, message } => {
            CliError::Input(format!("{}:{line}:{column}: {message}", path.display()))
        }
        other => CliError::from(other),
    }
}

/// What a command produced before it is wrapped in a report.
pub struct Outcome {
    pub inputs: Value,
    pub result: Value,
    pub text: String,
    pub search_space: Option<SearchSpace>,
    /// A checked property failed or a counterexample was found.
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSpace {
    pub size: u64,
    pub exhaustive: bool,
    pub description: String,
}

impl SearchSpace {
    pub fn exhaustive(size: u64, description: impl Into<String>) -> Self {
        SearchSpace {
            size,
            exhaustive: true,
            description: description.into(),
        }
    }
}

#[derive(Serialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub violated: bool,
    pub timing_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_space: Option<SearchSpace>,
    #[serde(skip)]
    text: String,
}

pub fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Uim { .. } => "uim".into(),
        Command::Classify { .. } => "classify".into(),
        Command::Invgroup { .. } => "invgroup".into(),
        Command::Deck { .. } => "deck".into(),
        Command::Canon { .. } => "canon".into(),
        Command::Pat { .. } => "pat".into(),
        Command::Comp { .. } => "comp".into(),
        Command::Equalizing { .. } => "equalizing".into(),
        Command::WitnessNew { .. } => "witness-new".into(),
        Command::WitnessPair { .. } => "witness-pair".into(),
        Command::Oracle { .. } => "oracle".into(),
        Command::Sweep { sweep } => match sweep {
            crate::Sweep::LDiff { .. } => "sweep l-diff".into(),
            crate::Sweep::Classes { .. } => "sweep classes".into(),
            crate::Sweep::Compn { .. } => "sweep compn".into(),
        },
    }
}

impl CommandReport {
    pub fn new(cmd: &Command, out: Outcome, elapsed: Duration) -> Self {
        CommandReport {
            command: command_name(cmd),
            inputs: out.inputs,
            result: out.result,
            violated: out.violated,
            timing_ms: elapsed.as_secs_f64() * 1000.0,
            search_space: out.search_space,
            text: out.text,
        }
    }

    pub fn exit_code(&self) -> u8 {
        u8::from(self.violated)
    }

    /// Write errors (a closed pipe, say) are ignored.
    pub fn emit(&self, json: bool) {
        let mut out = std::io::stdout().lock();
        if json {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(self).expect("reports serialize"));
            return;
        }
        let _ = write!(out, "{}", self.text);
        if !self.text.ends_with('\n') {
            let _ = writeln!(out);
        }
        if let Some(space) = &self.search_space {
            let _ = writeln!(
                out,
                "search space: {} ({}, {})",
                space.size,
                if space.exhaustive { "exhaustive" } else { "sampled" },
                space.description
            );
        }
    }
}

pub fn emit_error(err: &CliError, json: bool) {
    if json {
        let kind = match err {
            CliError::Io(_) => "io",
            CliError::Input(_) => "input",
            CliError::Refused(_) => "refused",
        };
        println!("{}", serde_json::json!({ "error": kind, "message": err.to_string() }));
    } else {
        eprintln!("error: {err}");
    }
}
