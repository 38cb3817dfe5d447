//! Parameter blocks and runners for each command.

use mbloch_core::lorenz::SingleModeParams;
use mbloch_core::params::{CavityParams, MediumParams};
use mbloch_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{self, Command, Diagnostic, Units};
use crate::error::CliError;
use crate::table::Table;

pub mod amplify;
pub mod lase;
pub mod lorenz;
pub mod pumpmap;
pub mod ring;

/// Everything a command needs besides its parameters.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    pub units: Units,
}

#[derive(Debug, Clone)]
pub enum Job {
    Pumpmap(pumpmap::Params),
    Amplify(amplify::Params),
    Profile(ring::ProfileParams),
    Modes(ring::ModesParams),
    Lase(lase::Params),
    Lorenz(lorenz::Params),
}

pub fn parse(command: Command, text: &str) -> serde_json::Result<Job> {
    Ok(match command {
        Command::Pumpmap => Job::Pumpmap(serde_json::from_str(text)?),
        Command::Amplify => Job::Amplify(serde_json::from_str(text)?),
        Command::Profile => Job::Profile(serde_json::from_str(text)?),
        Command::Modes => Job::Modes(serde_json::from_str(text)?),
        Command::Lase => Job::Lase(serde_json::from_str(text)?),
        Command::Lorenz => Job::Lorenz(serde_json::from_str(text)?),
        Command::Sweep => unreachable!("sweep is resolved to its target before parsing"),
    })
}

fn from_value(command: Command, v: Value) -> serde_json::Result<Job> {
    Ok(match command {
        Command::Pumpmap => Job::Pumpmap(serde_json::from_value(v)?),
        Command::Amplify => Job::Amplify(serde_json::from_value(v)?),
        Command::Profile => Job::Profile(serde_json::from_value(v)?),
        Command::Modes => Job::Modes(serde_json::from_value(v)?),
        Command::Lase => Job::Lase(serde_json::from_value(v)?),
        Command::Lorenz => Job::Lorenz(serde_json::from_value(v)?),
        Command::Sweep => unreachable!("sweep is resolved to its target before parsing"),
    })
}

impl Job {
    pub fn command(&self) -> Command {
        match self {
            Job::Pumpmap(_) => Command::Pumpmap,
            Job::Amplify(_) => Command::Amplify,
            Job::Profile(_) => Command::Profile,
            Job::Modes(_) => Command::Modes,
            Job::Lase(_) => Command::Lase,
            Job::Lorenz(_) => Command::Lorenz,
        }
    }

    /// Parameters with every default filled in.
    pub fn to_value(&self) -> Value {
        let v = match self {
            Job::Pumpmap(p) => serde_json::to_value(p),
            Job::Amplify(p) => serde_json::to_value(p),
            Job::Profile(p) => serde_json::to_value(p),
            Job::Modes(p) => serde_json::to_value(p),
            Job::Lase(p) => serde_json::to_value(p),
            Job::Lorenz(p) => serde_json::to_value(p),
        };
        v.expect("parameter blocks serialize to JSON")
    }

    /// Copy with the numeric parameter at `path` replaced.
    pub fn with_param(&self, path: &str, x: f64) -> Result<Job, String> {
        let mut v = self.to_value();
        let slot = config::lookup_mut(&mut v, path).ok_or_else(|| format!("no parameter `{path}`"))?;
        *slot = serde_json::Number::from_f64(x)
            .map(Value::Number)
            .ok_or_else(|| format!("{path} = {x} is not representable"))?;
        from_value(self.command(), v).map_err(|e| format!("{path} = {x}: {e}"))
    }

    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        match self {
            Job::Pumpmap(p) => p.check(),
            Job::Amplify(p) => p.check(units),
            Job::Profile(p) => p.check(units),
            Job::Modes(p) => p.check(units),
            Job::Lase(p) => p.check(units),
            Job::Lorenz(p) => p.check(units),
        }
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        match self {
            Job::Pumpmap(p) => p.run(),
            Job::Amplify(p) => p.run(ctx),
            Job::Profile(p) => p.run(ctx),
            Job::Modes(p) => p.run(ctx),
            Job::Lase(p) => p.run(ctx),
            Job::Lorenz(p) => p.run(ctx),
        }
    }
}

/// Diagnostic for a parameter error raised by the solver library.
pub fn core_diagnostic(prefix: &str, e: &Error) -> Diagnostic {
    match e {
        Error::InvalidParameter {
            name,
            value,
            constraint,
        } => Diagnostic::error(format!("{prefix}.{name}"), format!("{value} {constraint}")),
        other => Diagnostic::error(prefix, other.to_string()),
    }
}

pub fn positive(path: &str, v: f64, out: &mut Vec<Diagnostic>) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(Diagnostic::error(path, format!("{v} must be > 0")));
    }
}

pub fn at_least(path: &str, v: usize, min: usize, out: &mut Vec<Diagnostic>) {
    if v < min {
        out.push(Diagnostic::error(path, format!("{v} must be >= {min}")));
    }
}

fn default_c() -> f64 {
    1.0
}

/// Two-level medium as entered in a config.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub gamma_perp: f64,
    pub gamma_par: f64,
    pub g: f64,
    pub d0: f64,
    #[serde(default)]
    pub delta: f64,
}

impl MediumSpec {
    /// Medium in the requested unit system, plus the time scale divided out.
    pub fn build(&self, units: Units) -> Result<(MediumParams, f64), Error> {
        let m = MediumParams::new(self.gamma_perp, self.gamma_par, self.g, self.d0, self.delta)?;
        Ok(match units {
            Units::Absolute => (m, 1.0),
            Units::Normalized => (m.normalized(), self.gamma_perp),
        })
    }
}

/// Ring cavity; give exactly one of `reflectivity` (amplitude) or `r2` (intensity).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    pub reflectivity: Option<f64>,
    pub r2: Option<f64>,
    pub medium_length: f64,
    pub cavity_length: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

impl CavitySpec {
    /// `time_scale` divides the light speed (normalized units).
    pub fn build(&self, time_scale: f64) -> Result<CavityParams, Error> {
        let c = self.c / time_scale;
        match (self.reflectivity, self.r2) {
            (Some(r), None) => CavityParams::new(r, self.medium_length, self.cavity_length, c),
            (None, Some(r2)) => {
                if !(r2 > 0.0 && r2 <= 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "r2",
                        value: r2,
                        constraint: "must lie in (0, 1] (cavity reflectivity)",
                    });
                }
                CavityParams::from_intensity_reflectivity(r2, self.medium_length, self.cavity_length, c)
            }
            (r, r2) => Err(Error::InvalidParameter {
                name: "reflectivity",
                value: r.or(r2).unwrap_or(f64::NAN),
                constraint: "give exactly one of reflectivity or r2",
            }),
        }
    }
}

/// Single-mode laser rates; `kappa` may be left out when a cavity supplies it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSpec {
    pub kappa: Option<f64>,
    pub gamma_perp: f64,
    pub gamma_par: f64,
    pub r: f64,
    #[serde(default)]
    pub delta_c: f64,
}

impl LaserSpec {
    pub fn build(&self, kappa_fallback: Option<f64>, units: Units) -> Result<SingleModeParams, Error> {
        let kappa = self.kappa.or(kappa_fallback).ok_or(Error::InvalidParameter {
            name: "kappa",
            value: f64::NAN,
            constraint: "required (or supply a cavity)",
        })?;
        let s = match units {
            Units::Absolute => 1.0,
            Units::Normalized => self.gamma_perp,
        };
        Ok(SingleModeParams {
            kappa: kappa / s,
            gamma_perp: self.gamma_perp / s,
            gamma_par: self.gamma_par / s,
            r: self.r,
            delta_c: self.delta_c,
        })
    }
}
