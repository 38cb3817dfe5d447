//! Steady ring-laser output: intensity profiles and the longitudinal-mode family.

use mbloch_core::multimode::empty_cavity_frequencies;
use mbloch_core::params::effective_pump_r;
use mbloch_core::ring::{apply_boundary, exit_intensity, intensity_profile, mode_family, resonant_exit_intensity};
use mbloch_core::Complex64;
use serde::{Deserialize, Serialize};

use super::{at_least, core_diagnostic, CavitySpec, Context, MediumSpec};
use crate::config::{Diagnostic, Units};
use crate::error::CliError;
use crate::table::Table;

fn default_points() -> usize {
    101
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub medium: MediumSpec,
    pub cavity: CavitySpec,
    /// Gain-to-loss ratio; derived from medium and cavity when absent.
    pub r: Option<f64>,
    /// Normalized detuning; defaults to the medium's δ/γ⊥.
    pub delta_ratio: Option<f64>,
    #[serde(default = "default_points")]
    pub n_points: usize,
    /// Intensity reflectivities to scan in place of the cavity's own.
    pub r2: Option<Vec<f64>>,
}

impl ProfileParams {
    fn reflectivities(&self) -> Vec<Option<f64>> {
        match &self.r2 {
            Some(list) => list.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }

    fn cavity_with(&self, r2: Option<f64>) -> CavitySpec {
        match r2 {
            Some(v) => CavitySpec {
                reflectivity: None,
                r2: Some(v),
                ..self.cavity
            },
            None => self.cavity,
        }
    }

    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        at_least("params.n_points", self.n_points, 2, &mut out);
        let (m, scale) = match self.medium.build(units) {
            Ok(v) => v,
            Err(e) => {
                out.push(core_diagnostic("params.medium", &e));
                return out;
            }
        };
        if matches!(&self.r2, Some(list) if list.is_empty()) {
            out.push(Diagnostic::error("params.r2", "list must not be empty"));
        }
        for (i, r2) in self.reflectivities().into_iter().enumerate() {
            let path = match r2 {
                Some(_) => format!("params.r2.{i}"),
                None => "params.cavity".to_owned(),
            };
            let cav = match self.cavity_with(r2).build(scale) {
                Ok(c) => c,
                Err(e) => {
                    let mut d = core_diagnostic(&path, &e);
                    if r2.is_some() {
                        d.path = Some(path);
                    }
                    out.push(d);
                    continue;
                }
            };
            let dr = self.delta_ratio.unwrap_or(m.detuning_ratio());
            let r = match self.r {
                Some(r) => r,
                None => match effective_pump_r(&m, &cav) {
                    Ok(p) => p.r,
                    Err(e) => {
                        out.push(Diagnostic::error(&path, format!("{e}; give params.r explicitly")));
                        continue;
                    }
                },
            };
            let r_on = 1.0 + dr * dr;
            if !(r > r_on) {
                // a regime problem rather than a malformed config; the run reports it
                out.push(Diagnostic::warning(
                    "params.r",
                    format!("r = {r} is at or below threshold r_on = {r_on}; no steady lasing profile"),
                ));
            }
        }
        out
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        let (m, scale) = self.medium.build(ctx.units)?;
        let dr = self.delta_ratio.unwrap_or(m.detuning_ratio());
        let mut table = Table::new([
            "r2",
            "r",
            "z",
            "z_over_lm",
            "intensity",
            "intensity_over_sat",
            "intensity_over_exit",
            "exit_intensity",
            "resonant_exit_intensity",
            "round_trip_closure",
        ]);
        let sat = m.saturation_intensity();
        for r2 in self.reflectivities() {
            let cav = self.cavity_with(r2).build(scale)?;
            let r = match self.r {
                Some(r) => r,
                None => effective_pump_r(&m, &cav)?.r,
            };
            let prof = intensity_profile(r, dr, &m, &cav, self.n_points)?;
            let exit = exit_intensity(r, dr, &m, &cav).value;
            let resonant = resonant_exit_intensity(r, &m, &cav).value;
            // the mirrors must map the exit field back onto the entry intensity
            let reentry = apply_boundary(Complex64::new(exit.sqrt(), 0.0), &cav, 0.0).norm_sqr();
            let closure = reentry / prof.amp2[0];
            for (&z, &i) in prof.z.iter().zip(&prof.amp2) {
                table.push(vec![
                    cav.r2().into(),
                    r.into(),
                    z.into(),
                    (z / cav.medium_length).into(),
                    i.into(),
                    (i / sat).into(),
                    (i / exit).into(),
                    exit.into(),
                    resonant.into(),
                    closure.into(),
                ]);
            }
        }
        Ok(table)
    }
}

fn default_n_min() -> i64 {
    -2
}

fn default_n_max() -> i64 {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesParams {
    pub medium: MediumSpec,
    pub cavity: CavitySpec,
    /// Empty-cavity mode frequency nearest the line.
    pub omega_c: f64,
    /// Atomic line center.
    pub omega_21: f64,
    #[serde(default = "default_n_min")]
    pub n_min: i64,
    #[serde(default = "default_n_max")]
    pub n_max: i64,
}

impl ModesParams {
    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.n_min > self.n_max {
            out.push(Diagnostic::error("params.n_min", "must be <= n_max"));
        }
        if !(self.omega_c.is_finite() && self.omega_21.is_finite()) {
            out.push(Diagnostic::error("params", "omega_c and omega_21 must be finite"));
        }
        let (_, scale) = match self.medium.build(units) {
            Ok(v) => v,
            Err(e) => {
                out.push(core_diagnostic("params.medium", &e));
                return out;
            }
        };
        match self.cavity.build(scale) {
            Ok(cav) => {
                let fsr = cav.free_spectral_range() * scale;
                let gap = self.omega_c - self.omega_21;
                if !(gap.abs() < fsr) {
                    out.push(Diagnostic::error(
                        "params.omega_c",
                        format!(
                            "|omega_c - omega_21| = {} is not below the mode spacing {fsr}; pick the cavity mode nearest the line",
                            gap.abs()
                        ),
                    ));
                }
                if cav.loss() == 0.0 {
                    out.push(Diagnostic::warning(
                        "params.cavity",
                        "lossless cavity: r is undefined, exit intensities are reported as NaN",
                    ));
                }
            }
            Err(e) => out.push(core_diagnostic("params.cavity", &e)),
        }
        out
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        let (m, scale) = self.medium.build(ctx.units)?;
        let cav = self.cavity.build(scale)?;
        let (wc, wa) = (self.omega_c / scale, self.omega_21 / scale);
        let fam = mode_family(&m, &cav, wc, wa, self.n_min..=self.n_max)?;
        let offsets = empty_cavity_frequencies(&cav, self.n_min..=self.n_max);
        let pump = effective_pump_r(&m, &cav).ok().map(|p| p.r);
        let mut table = Table::new([
            "n",
            "omega_n",
            "empty_cavity_omega",
            "r_on",
            "delta",
            "lasing",
            "exit_intensity",
            "degenerate",
        ]);
        for op in fam {
            table.push(vec![
                op.n.into(),
                op.omega_n.into(),
                (wc + offsets[(op.n - self.n_min) as usize].1).into(),
                op.r_on.into(),
                op.delta.into(),
                pump.is_some_and(|r| r > op.r_on).into(),
                op.exit_intensity.unwrap_or(f64::NAN).into(),
                op.degenerate.into(),
            ]);
        }
        Ok(table)
    }
}
