//! Effective two-level inversion of three- and four-level media versus pump.

use mbloch_core::bloch::{
    adiabatic_expansion, integrate_four_level, integrate_linear_response, integrate_rate_equations,
    integrate_three_level, integrate_two_level, steady_state_two_level, DriveField, FourLevelState,
    OpenTwoLevelParams, Populations, Sinusoid, ThreeLevelState, TwoLevelState,
};
use mbloch_core::params::{
    map_four_level_with_ratio, map_three_level_with_ratio, FourLevelParams, ThreeLevelParams, TwoLevelMapping,
    ValidityWarning,
};
use mbloch_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use super::{at_least, core_diagnostic, positive};
use crate::config::Diagnostic;
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Three,
    Four,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThreeSpec {
    pub gamma_21: f64,
    pub gamma_31: f64,
    pub gamma_32: f64,
    pub gamma_perp: f64,
}

impl Default for ThreeSpec {
    fn default() -> Self {
        Self {
            gamma_21: 1.0,
            gamma_31: 0.0,
            gamma_32: 1e4,
            gamma_perp: 10.0,
        }
    }
}

impl ThreeSpec {
    fn at(&self, pump: f64) -> ThreeLevelParams {
        ThreeLevelParams {
            gamma_21: self.gamma_21,
            gamma_31: self.gamma_31,
            gamma_32: self.gamma_32,
            gamma_perp: self.gamma_perp,
            pump,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourSpec {
    pub gamma_10: f64,
    pub gamma_20: f64,
    pub gamma_21: f64,
    pub gamma_30: f64,
    pub gamma_31: f64,
    pub gamma_32: f64,
    pub gamma_perp: f64,
}

impl Default for FourSpec {
    fn default() -> Self {
        Self {
            gamma_10: 1e4,
            gamma_20: 0.0,
            gamma_21: 1.0,
            gamma_30: 0.0,
            gamma_31: 0.0,
            gamma_32: 1e4,
            gamma_perp: 10.0,
        }
    }
}

impl FourSpec {
    fn at(&self, pump: f64) -> FourLevelParams {
        FourLevelParams {
            gamma_10: self.gamma_10,
            gamma_20: self.gamma_20,
            gamma_21: self.gamma_21,
            gamma_30: self.gamma_30,
            gamma_31: self.gamma_31,
            gamma_32: self.gamma_32,
            gamma_perp: self.gamma_perp,
            pump,
        }
    }
}

/// Pump rates `R = x·γ₂₁` for `x` on an inclusive grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpGrid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Default for PumpGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 10.0,
            n: 101,
        }
    }
}

impl PumpGrid {
    fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        (0..self.n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

/// Constant probe field applied to the medium.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    /// Rabi half-amplitude `[re, im]`.
    pub alpha: [f64; 2],
    #[serde(default)]
    pub delta: f64,
}

/// Pump-level population under a modulated pump flux `g(t) = offset + amplitude·cos(ωt)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Response {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    #[serde(default)]
    pub order: u8,
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub n: usize,
}

fn default_samples() -> usize {
    201
}

fn default_ratio() -> f64 {
    mbloch_core::params::DEFAULT_DOMINANCE_RATIO
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub three: ThreeSpec,
    #[serde(default)]
    pub four: FourSpec,
    #[serde(default)]
    pub pump: PumpGrid,
    #[serde(default = "default_ratio")]
    pub dominance_ratio: f64,
    /// Also integrate the full level equations to steady state.
    #[serde(default)]
    pub full: bool,
    pub probe: Option<Probe>,
    /// Replaces the pump map by the pump-level response table.
    pub response: Option<Response>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn describe(w: &ValidityWarning) -> String {
    match w {
        ValidityWarning::PumpLevelNotDominant { ratio, required } => format!(
            "gamma_32 is only {ratio:.3e} times the slow rates (want {required:.0e}); the two-level reduction is approximate"
        ),
        ValidityWarning::LowerLevelDrainSlow { ratio, required } => format!(
            "gamma_10 is only {ratio:.3e} times the slow rates (want {required:.0e}); the two-level reduction is approximate"
        ),
    }
}

impl Params {
    fn uses_three(&self) -> bool {
        self.scheme != Scheme::Four
    }

    fn uses_four(&self) -> bool {
        self.scheme != Scheme::Three
    }

    pub fn check(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive("params.dominance_ratio", self.dominance_ratio, &mut out);
        positive("params.tol", self.tol, &mut out);
        at_least("params.pump.n", self.pump.n, 1, &mut out);
        if !(self.pump.start >= 0.0 && self.pump.stop >= self.pump.start && self.pump.stop.is_finite()) {
            out.push(Diagnostic::error("params.pump", "need 0 <= start <= stop"));
        }
        if let Some(r) = &self.response {
            positive("params.response.omega", r.omega, &mut out);
            positive("params.response.t_end", r.t_end, &mut out);
            at_least("params.response.n", r.n, 2, &mut out);
            if r.order > 2 {
                out.push(Diagnostic::error("params.response.order", "must be 0, 1 or 2"));
            }
            if self.three.gamma_31 + self.three.gamma_32 <= 0.0 {
                out.push(Diagnostic::error("params.three", "gamma_31 + gamma_32 must be > 0"));
            }
            return out;
        }
        if !out.is_empty() {
            return out;
        }
        // warnings and γ∥ both grow with the pump, so the top of the grid is the worst case
        let top = self.pump.stop;
        let mut mapped = Vec::new();
        if self.uses_three() {
            let m = map_three_level_with_ratio(&self.three.at(top * self.three.gamma_21), self.dominance_ratio);
            mapped.push(("params.three", m));
        }
        if self.uses_four() {
            let m = map_four_level_with_ratio(&self.four.at(top * self.four.gamma_21), self.dominance_ratio);
            mapped.push(("params.four", m));
        }
        for (path, m) in mapped {
            match m {
                Ok(m) => {
                    out.extend(m.warnings.iter().map(|w| Diagnostic::warning(path, describe(w))));
                    if self.probe.is_some() && m.gamma_par > 2.0 * m.gamma_perp {
                        out.push(Diagnostic::warning(
                            path,
                            "mapped gamma_par exceeds 2 gamma_perp at high pump; probe columns there are NaN",
                        ));
                    }
                }
                Err(e) => out.push(core_diagnostic(path, &e)),
            }
        }
        out
    }

    pub fn run(&self) -> Result<Table, CliError> {
        if let Some(r) = &self.response {
            return self.response_table(r);
        }
        let mut columns = vec!["pump_ratio".to_owned()];
        let mut schemes = Vec::new();
        if self.uses_three() {
            schemes.push("three");
        }
        if self.uses_four() {
            schemes.push("four");
        }
        for s in &schemes {
            let mut names = vec!["pump", "d0", "gamma_par", "valid"];
            if self.full {
                names.push("d_full");
            }
            if self.probe.is_some() {
                names.extend(["d_probe_steady", "d_probe_two_level", "d_probe_rate"]);
                if self.full {
                    names.push("d_probe_full");
                }
            }
            columns.extend(names.iter().map(|n| format!("{n}_{s}")));
        }
        let mut table = Table::new(columns);
        for x in self.pump.values() {
            let mut row: Vec<Cell> = vec![x.into()];
            if self.uses_three() {
                let p = self.three.at(x * self.three.gamma_21);
                let map = map_three_level_with_ratio(&p, self.dominance_ratio)?;
                self.scheme_cells(&mut row, p.pump, &map, |drive, t_end| {
                    let traj = integrate_three_level(ThreeLevelState::ground(), drive, &p, self.delta(), t_end, self.tol)?;
                    Ok(traj.final_state().inversion())
                })?;
            }
            if self.uses_four() {
                let p = self.four.at(x * self.four.gamma_21);
                let map = map_four_level_with_ratio(&p, self.dominance_ratio)?;
                self.scheme_cells(&mut row, p.pump, &map, |drive, t_end| {
                    let traj = integrate_four_level(FourLevelState::ground(), drive, &p, self.delta(), t_end, self.tol)?;
                    Ok(traj.final_state().inversion())
                })?;
            }
            table.push(row);
        }
        Ok(table)
    }

    fn delta(&self) -> f64 {
        self.probe.map_or(0.0, |p| p.delta)
    }

    fn scheme_cells(
        &self,
        row: &mut Vec<Cell>,
        pump: f64,
        map: &TwoLevelMapping,
        full: impl Fn(&DriveField, f64) -> Result<f64, Error>,
    ) -> Result<(), CliError> {
        row.extend([pump.into(), map.d0.into(), map.gamma_par.into(), map.warnings.is_empty().into()]);
        let t_end = 30.0 / map.gamma_par.min(map.gamma_perp);
        if self.full {
            row.push(full(&DriveField::zero(), t_end)?.into());
        }
        let Some(probe) = self.probe else {
            return Ok(());
        };
        let alpha = Complex64::new(probe.alpha[0], probe.alpha[1]);
        let drive = DriveField::Constant(alpha);
        match map.into_medium(1.0, probe.delta) {
            Ok(m) => {
                let steady = steady_state_two_level(alpha, &m).0;
                let start = TwoLevelState {
                    d: m.d0,
                    sigma12: Complex64::new(0.0, 0.0),
                };
                let two = integrate_two_level(start, &drive, &m, t_end, self.tol)?.final_state().d;
                // open two-level model with the same γ∥ and d0 in its rate-equation limit
                let open = OpenTwoLevelParams {
                    gamma_2_ext: m.gamma_par,
                    gamma_1_ext: m.gamma_par,
                    gamma_21: 0.0,
                    gamma_12: 0.0,
                    lambda_2: 0.5 * m.gamma_par * (1.0 + m.d0),
                    lambda_1: 0.5 * m.gamma_par * (1.0 - m.d0),
                    gamma_perp: m.gamma_perp,
                    delta: probe.delta,
                };
                let pop = Populations { rho22: 0.0, rho11: 1.0 };
                let fin = integrate_rate_equations(pop, &drive, &open, t_end, self.tol)?.final_state();
                row.extend([steady.into(), two.into(), (fin.rho22 - fin.rho11).into()]);
            }
            Err(_) => row.extend([f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]),
        }
        if self.full {
            row.push(full(&drive, t_end)?.into());
        }
        Ok(())
    }

    fn response_table(&self, r: &Response) -> Result<Table, CliError> {
        let gamma = self.three.gamma_31 + self.three.gamma_32;
        let signal = Sinusoid {
            offset: r.offset,
            amplitude: r.amplitude,
            omega: r.omega,
            phase: 0.0,
        };
        let approx = adiabatic_expansion(signal, gamma, r.order)?;
        let times: Vec<f64> = (0..r.n).map(|i| r.t_end * i as f64 / (r.n - 1) as f64).collect();
        // start on the slow manifold so no transient enters the comparison
        let f0 = adiabatic_expansion(signal, gamma, 2)?.eval(0.0);
        let exact = integrate_linear_response(&signal, gamma, f0, &times, self.tol.min(1e-12))?;
        let mut table = Table::new(["t", "pump_flux", "rho33", "rho33_adiabatic", "relative_error"]);
        for (&t, &f) in times.iter().zip(&exact) {
            let a = approx.eval(t);
            let g = r.offset + r.amplitude * (r.omega * t).cos();
            table.push(vec![t.into(), g.into(), f.into(), a.into(), ((a - f).abs() / f.abs()).into()]);
        }
        Ok(table)
    }
}
