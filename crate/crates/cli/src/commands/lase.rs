//! Time-dependent laser runs: uniform-field ring or single mode.

use mbloch_core::lorenz::{integrate_complex, ComplexModeState, SingleModeParams};
use mbloch_core::multimode::{integrate_traveling_wave, mode_decompose, FieldOnRing, DEFAULT_GRID};
use mbloch_core::params::CavityParams;
use mbloch_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{at_least, core_diagnostic, positive, CavitySpec, Context, LaserSpec};
use crate::config::{Diagnostic, Units};
use crate::error::CliError;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    #[default]
    Multimode,
    SingleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    /// Fields on the grid at each frame.
    #[default]
    Field,
    /// Mode powers at each frame.
    Spectrum,
}

/// Starting state; the field gets seeded complex noise of the given size at every grid point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Initial {
    pub field_amplitude: f64,
    pub noise: f64,
    pub polarization: f64,
    /// Defaults to the pump `r` (unsaturated medium).
    pub inversion: Option<f64>,
}

impl Default for Initial {
    fn default() -> Self {
        Self {
            field_amplitude: 1e-3,
            noise: 0.0,
            polarization: 0.0,
            inversion: None,
        }
    }
}

fn default_n_z() -> usize {
    DEFAULT_GRID
}

fn default_tol() -> f64 {
    1e-8
}

fn default_frames() -> usize {
    11
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub model: Model,
    pub laser: LaserSpec,
    /// Required for the multimode model; otherwise only supplies κ.
    pub cavity: Option<CavitySpec>,
    #[serde(default = "default_n_z")]
    pub n_z: usize,
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_frames")]
    pub n_frames: usize,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub output: Output,
}

impl Params {
    fn scale(&self, units: Units) -> f64 {
        match units {
            Units::Absolute => 1.0,
            Units::Normalized => self.laser.gamma_perp,
        }
    }

    fn build(&self, units: Units) -> Result<(SingleModeParams, Option<CavityParams>), mbloch_core::Error> {
        let scale = self.scale(units);
        let cav = self.cavity.map(|c| c.build(scale)).transpose()?;
        let p = self.laser.build(cav.map(|c| c.kappa() * scale), units)?;
        Ok((p, cav))
    }

    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive("params.t_end", self.t_end, &mut out);
        positive("params.tol", self.tol, &mut out);
        at_least("params.n_frames", self.n_frames, 2, &mut out);
        if self.model == Model::Multimode {
            if self.cavity.is_none() {
                out.push(Diagnostic::error("params.cavity", "the multimode model needs a cavity"));
            }
            if !(self.n_z >= 2 && self.n_z.is_power_of_two()) {
                out.push(Diagnostic::error(
                    "params.n_z",
                    format!("{} must be a power of two, e.g. {}", self.n_z, self.n_z.max(2).next_power_of_two()),
                ));
            }
        } else if self.output == Output::Spectrum {
            out.push(Diagnostic::error("params.output", "a spectrum needs the multimode model"));
        }
        let i = &self.initial;
        if ![i.field_amplitude, i.noise, i.polarization, i.inversion.unwrap_or(0.0)]
            .iter()
            .all(|v| v.is_finite())
            || i.noise < 0.0
        {
            out.push(Diagnostic::error("params.initial", "values must be finite, noise >= 0"));
        }
        match self.build(units) {
            Ok((p, _)) => {
                let valid = match self.model {
                    Model::Multimode => p.validate_nonnegative(),
                    Model::SingleMode => p.validate(),
                };
                if let Err(e) = valid {
                    out.push(core_diagnostic("params.laser", &e));
                }
            }
            Err(e) => out.push(core_diagnostic("params", &e)),
        }
        out
    }

    fn noise(&self, rng: &mut StdRng) -> Complex64 {
        let s = self.initial.noise;
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(rng.gen_range(-s..=s), rng.gen_range(-s..=s))
    }

    fn frame_times(&self) -> Vec<f64> {
        (0..self.n_frames)
            .map(|k| self.t_end * k as f64 / (self.n_frames - 1) as f64)
            .collect()
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        let (p, cav) = self.build(ctx.units)?;
        let mut rng = StdRng::seed_from_u64(ctx.seed);
        let d_init = self.initial.inversion.unwrap_or(p.r);
        let pol = Complex64::new(self.initial.polarization, 0.0);
        let amp = Complex64::new(self.initial.field_amplitude, 0.0);

        let Some(cav) = cav.filter(|_| self.model == Model::Multimode) else {
            let s0 = ComplexModeState {
                f: amp + self.noise(&mut rng),
                p: pol,
                d: d_init,
            };
            let traj = integrate_complex(s0, &p, self.t_end, self.tol)?;
            let mut table = Table::new(["t", "F_re", "F_im", "P_re", "P_im", "D", "intensity"]);
            for t in self.frame_times() {
                let s = traj.at(t).ok_or_else(|| CliError::Solver(format!("no state at t = {t}")))?;
                table.push(vec![
                    t.into(),
                    s.f.re.into(),
                    s.f.im.into(),
                    s.p.re.into(),
                    s.p.im.into(),
                    s.d.into(),
                    s.f.norm_sqr().into(),
                ]);
            }
            return Ok(table);
        };

        let n = self.n_z;
        let samples: Vec<Complex64> = (0..n).map(|_| amp + self.noise(&mut rng)).collect();
        let f0 = FieldOnRing::new(samples, cav)?;
        let run = integrate_traveling_wave(&f0, &vec![pol; n], &vec![d_init; n], &p, self.t_end, self.tol, self.n_frames)?;
        let z = f0.positions();
        match self.output {
            Output::Field => {
                let mut table = Table::new(["t", "z", "F_re", "F_im", "intensity", "P_re", "P_im", "D"]);
                for fr in &run.frames {
                    for (j, &zj) in z.iter().enumerate() {
                        let (f, pl) = (fr.field[j], fr.polarization[j]);
                        table.push(vec![
                            fr.t.into(),
                            zj.into(),
                            f.re.into(),
                            f.im.into(),
                            f.norm_sqr().into(),
                            pl.re.into(),
                            pl.im.into(),
                            fr.inversion[j].into(),
                        ]);
                    }
                }
                Ok(table)
            }
            Output::Spectrum => {
                let mut table = Table::new(["t", "m", "k", "omega", "power"]);
                for (i, fr) in run.frames.iter().enumerate() {
                    for c in mode_decompose(&run.field_at(i)).modes {
                        table.push(vec![
                            fr.t.into(),
                            c.m.into(),
                            c.k.into(),
                            c.omega.into(),
                            c.coefficient.norm_sqr().into(),
                        ]);
                    }
                }
                Ok(table)
            }
        }
    }
}
