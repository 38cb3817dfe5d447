use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::commands::{self, Job};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// Values used as supplied.
    #[default]
    Absolute,
    /// Rates and frequencies divided by γ⊥ before solving.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Pumpmap,
    Amplify,
    Profile,
    Modes,
    Lase,
    Lorenz,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Pumpmap,
        Command::Amplify,
        Command::Profile,
        Command::Modes,
        Command::Lase,
        Command::Lorenz,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Pumpmap => "pumpmap",
            Command::Amplify => "amplify",
            Command::Profile => "profile",
            Command::Modes => "modes",
            Command::Lase => "lase",
            Command::Lorenz => "lorenz",
            Command::Sweep => "sweep",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Command to repeat; required when the top-level command is `sweep`.
    pub target: Option<Command>,
    /// Dotted path into `params`, e.g. `medium.d0`.
    pub param_path: String,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * f,
                    Scale::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 1-based line and column in the config text.
    pub location: Option<(usize, usize)>,
    /// Dotted path of the offending field.
    pub path: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            location: None,
            path: Some(path.into()),
            message: message.into(),
        }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(path, message)
        }
    }

    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            location: Some((line, column)),
            path: None,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: ")?;
        if let Some((line, col)) = self.location {
            write!(f, "line {line}, column {col}: ")?;
        }
        if let Some(path) = &self.path {
            write!(f, "{path}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub job: Job,
    pub output: OutputSpec,
    pub sweep: Option<SweepSpec>,
    pub seed: u64,
    pub units: Units,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig<'a> {
    command: Option<String>,
    #[serde(borrow)]
    params: Option<&'a RawValue>,
    #[serde(default)]
    output: OutputSpec,
    sweep: Option<SweepSpec>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    units: Units,
}

/// Line and column of byte `offset` in `text`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, col)
}

fn serde_diagnostic(e: &serde_json::Error, text: &str, slice: &str) -> Diagnostic {
    let msg = e.to_string();
    // serde_json appends " at line L column C"; the position is reported separately
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_owned();
    let offset = slice.as_ptr() as usize - text.as_ptr() as usize;
    let (line0, col0) = position(text, offset);
    let (l, c) = (e.line().max(1), e.column().max(1));
    if l == 1 {
        Diagnostic::at(line0, col0 + c - 1, msg)
    } else {
        Diagnostic::at(line0 + l - 1, c, msg)
    }
}

/// Parse and check a config; returns the config if it has no errors.
pub fn validate(text: &str) -> (Option<RunConfig>, Vec<Diagnostic>) {
    let raw: RawConfig<'_> = match serde_json::from_str(text) {
        Ok(raw) => raw,
        Err(e) => return (None, vec![serde_diagnostic(&e, text, text)]),
    };
    let mut diags = Vec::new();
    let Some(name) = raw.command.as_deref() else {
        diags.push(Diagnostic::error(
            "command",
            "missing command; expected one of pumpmap, amplify, profile, modes, lase, lorenz, sweep",
        ));
        return (None, diags);
    };
    let Some(command) = Command::parse(name) else {
        diags.push(Diagnostic::error("command", format!("unknown command `{name}`")));
        return (None, diags);
    };

    let target = if command == Command::Sweep {
        match raw.sweep.as_ref().map(|s| s.target) {
            None => {
                diags.push(Diagnostic::error("sweep", "command `sweep` requires a sweep block"));
                return (None, diags);
            }
            Some(None) => {
                diags.push(Diagnostic::error("sweep.target", "missing sweep target command"));
                return (None, diags);
            }
            Some(Some(Command::Sweep)) => {
                diags.push(Diagnostic::error("sweep.target", "a sweep cannot target `sweep`"));
                return (None, diags);
            }
            Some(Some(t)) => t,
        }
    } else {
        if let Some(t) = raw.sweep.as_ref().and_then(|s| s.target) {
            if t != command {
                diags.push(Diagnostic::error(
                    "sweep.target",
                    format!("target `{}` differs from command `{}`", t.name(), command.name()),
                ));
            }
        }
        command
    };

    let params_text = raw.params.map_or("{}", RawValue::get);
    let job = match commands::parse(target, params_text) {
        Ok(job) => job,
        Err(e) => {
            let slice = raw.params.map_or(text, RawValue::get);
            let mut d = serde_diagnostic(&e, text, slice);
            if raw.params.is_none() {
                d.location = None;
                d.path = Some("params".into());
            }
            diags.push(d);
            return (None, diags);
        }
    };

    if let Some(s) = &raw.sweep {
        diags.extend(check_sweep(s, &job, raw.units));
    }
    diags.extend(job.check(raw.units));
    diags.dedup();

    if diags.iter().any(Diagnostic::is_error) {
        return (None, diags);
    }
    let cfg = RunConfig {
        command,
        job,
        output: raw.output,
        sweep: raw.sweep,
        seed: raw.seed,
        units: raw.units,
    };
    (Some(cfg), diags)
}

fn check_sweep(s: &SweepSpec, job: &Job, units: Units) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if s.n < 2 {
        out.push(Diagnostic::error("sweep.n", format!("n = {} must be >= 2", s.n)));
    }
    if !(s.start.is_finite() && s.stop.is_finite()) {
        out.push(Diagnostic::error("sweep", "start and stop must be finite"));
    }
    if s.scale == Scale::Log && !(s.start > 0.0 && s.stop > 0.0) {
        out.push(Diagnostic::error("sweep.scale", "log scale requires start > 0 and stop > 0"));
    }
    let value = job.to_value();
    match lookup(&value, &s.param_path) {
        None => out.push(Diagnostic::error(
            "sweep.param_path",
            format!("`{}` does not name a parameter of `{}`", s.param_path, job.command().name()),
        )),
        Some(Value::Number(_) | Value::Null) => {
            if out.is_empty() {
                for (i, x) in s.values().into_iter().enumerate() {
                    match job.with_param(&s.param_path, x) {
                        Ok(point) => {
                            for mut d in point.check(units).into_iter().filter(Diagnostic::is_error) {
                                d.message = format!("at sweep point {i} ({} = {x}): {}", s.param_path, d.message);
                                out.push(d);
                            }
                        }
                        Err(e) => out.push(Diagnostic::error("sweep.param_path", e)),
                    }
                    if out.len() > 8 {
                        break;
                    }
                }
            }
        }
        Some(_) => out.push(Diagnostic::error(
            "sweep.param_path",
            format!("`{}` is not a numeric parameter", s.param_path),
        )),
    }
    out
}

pub fn lookup<'v>(value: &'v Value, path: &str) -> Option<&'v Value> {
    path.split('.').try_fold(value, |v, key| match v {
        Value::Object(map) => map.get(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}

pub fn lookup_mut<'v>(value: &'v mut Value, path: &str) -> Option<&'v mut Value> {
    path.split('.').try_fold(value, |v, key| match v {
        Value::Object(map) => map.get_mut(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
        _ => None,
    })
}
