//! Single-mode laser as a Lorenz system: stability, trajectories, chaos.

use mbloch_core::lorenz::{
    fixed_points, hopf_threshold, integrate_complex, integrate_real, integrate_xyz, jacobian_stability, lyapunov_max,
    three_level_instability_ratio, to_lorenz_coordinates, ComplexModeState, HopfThreshold, LorenzState,
    LyapunovConfig, SingleModeParams, Verdict,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{at_least, core_diagnostic, positive, Context, LaserSpec};
use crate::config::{Diagnostic, Units};
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    #[default]
    Stability,
    Trajectory,
    Lyapunov,
    InstabilityRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// `(E, P, D)` against t.
    #[default]
    Laser,
    /// `(X, Y, Z)` against τ = γ⊥t.
    Lorenz,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySpec {
    pub t_end: f64,
    pub tol: f64,
    pub n_samples: usize,
    /// `[E, P, D]`; the inversion defaults to `r`.
    pub initial: [Option<f64>; 3],
    pub coordinates: Coordinates,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            t_end: 100.0,
            tol: 1e-9,
            n_samples: 1001,
            initial: [Some(1e-3), Some(0.0), None],
            coordinates: Coordinates::Laser,
        }
    }
}

/// Lyapunov run lengths in τ = γ⊥t.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovSpec {
    pub t_transient: f64,
    pub t_total: f64,
    pub renormalize_every: f64,
    pub tol: f64,
}

impl Default for LyapunovSpec {
    fn default() -> Self {
        let c = LyapunovConfig::default();
        Self {
            t_transient: c.t_transient,
            t_total: c.t_total,
            renormalize_every: c.renormalize_every,
            tol: c.tol,
        }
    }
}

impl From<LyapunovSpec> for LyapunovConfig {
    fn from(s: LyapunovSpec) -> Self {
        Self {
            t_transient: s.t_transient,
            t_total: s.t_total,
            renormalize_every: s.renormalize_every,
            tol: s.tol,
        }
    }
}

fn default_r_on() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub laser: LaserSpec,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub lyapunov: LyapunovSpec,
    /// Pump-independent gain factor G of a three-level medium (`r = G·d0`).
    pub gain: Option<f64>,
    #[serde(default = "default_r_on")]
    pub r_on: f64,
}

fn threshold_cells(t: HopfThreshold) -> [Cell; 2] {
    match t {
        HopfThreshold::Finite(r) => ["finite".into(), r.into()],
        HopfThreshold::StableForAllR => ["stable_for_all_r".into(), f64::INFINITY.into()],
        HopfThreshold::Divergent => ["divergent".into(), f64::INFINITY.into()],
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "stable",
        Verdict::Unstable => "unstable",
        Verdict::Marginal => "marginal",
    }
}

impl Params {
    fn build(&self, units: Units) -> Result<SingleModeParams, mbloch_core::Error> {
        let p = self.laser.build(None, units)?;
        p.validate()?;
        Ok(p)
    }

    fn initial(&self, p: &SingleModeParams) -> LorenzState {
        let [e, pol, d] = self.trajectory.initial;
        LorenzState::new(e.unwrap_or(0.0), pol.unwrap_or(0.0), d.unwrap_or(p.r))
    }

    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let p = match self.build(units) {
            Ok(p) => p,
            Err(e) => {
                out.push(core_diagnostic("params.laser", &e));
                return out;
            }
        };
        let resonant_only = matches!(self.analysis, Analysis::Stability | Analysis::Lyapunov)
            || (self.analysis == Analysis::Trajectory && self.trajectory.coordinates == Coordinates::Lorenz);
        if resonant_only && p.delta_c != 0.0 {
            out.push(Diagnostic::error(
                "params.laser.delta_c",
                "this analysis uses the real resonant system; set delta_c = 0",
            ));
        }
        match self.analysis {
            Analysis::Trajectory => {
                let t = &self.trajectory;
                positive("params.trajectory.t_end", t.t_end, &mut out);
                positive("params.trajectory.tol", t.tol, &mut out);
                at_least("params.trajectory.n_samples", t.n_samples, 2, &mut out);
            }
            Analysis::Lyapunov => {
                let l = &self.lyapunov;
                positive("params.lyapunov.t_total", l.t_total, &mut out);
                positive("params.lyapunov.renormalize_every", l.renormalize_every, &mut out);
                positive("params.lyapunov.tol", l.tol, &mut out);
                if !(l.t_transient >= 0.0) {
                    out.push(Diagnostic::error("params.lyapunov.t_transient", "must be >= 0"));
                }
            }
            Analysis::InstabilityRatio => {
                if self.gain.is_none() {
                    out.push(Diagnostic::error("params.gain", "required for instability_ratio"));
                }
            }
            Analysis::Stability => {}
        }
        if p.kappa < p.gamma_perp + p.gamma_par && p.r > 9.0 {
            out.push(Diagnostic::warning(
                "params.laser",
                "kappa < gamma_perp + gamma_par: stationary solution stable; no pulsing expected",
            ));
        }
        out
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        let p = self.build(ctx.units)?;
        match self.analysis {
            Analysis::Stability => self.stability(&p),
            Analysis::Trajectory => self.trajectory(&p),
            Analysis::Lyapunov => self.lyapunov(&p, ctx.seed),
            Analysis::InstabilityRatio => self.instability_ratio(&p),
        }
    }

    fn stability(&self, p: &SingleModeParams) -> Result<Table, CliError> {
        let c = to_lorenz_coordinates(p);
        let hopf = hopf_threshold(p)?;
        let [kind, r_hb] = threshold_cells(hopf.threshold);
        let mut table = Table::new([
            "point", "E", "P", "D", "X", "Y", "Z", "verdict", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im",
            "lambda3_re", "lambda3_im", "sigma", "b", "r", "hopf", "r_hb", "kappa_min", "r_hb_min",
        ]);
        for (i, s) in fixed_points(p)?.into_iter().enumerate() {
            let rep = jacobian_stability(p, &s)?;
            let xyz = s.to_xyz(p.r);
            let mut row: Vec<Cell> = vec![
                i.into(),
                s.e.into(),
                s.p.into(),
                s.d.into(),
                xyz.x.into(),
                xyz.y.into(),
                xyz.z.into(),
                verdict(rep.verdict).into(),
            ];
            for l in rep.eigenvalues {
                row.extend([l.re.into(), l.im.into()]);
            }
            row.extend([c.sigma.into(), c.b.into(), c.r.into(), kind.clone(), r_hb.clone()]);
            row.extend([hopf.kappa_min.into(), hopf.r_hb_min.into()]);
            table.push(row);
        }
        Ok(table)
    }

    fn trajectory(&self, p: &SingleModeParams) -> Result<Table, CliError> {
        let spec = &self.trajectory;
        let s0 = self.initial(p);
        let times: Vec<f64> = (0..spec.n_samples)
            .map(|k| spec.t_end * k as f64 / (spec.n_samples - 1) as f64)
            .collect();
        let missing = |t: f64| CliError::Solver(format!("no state at t = {t}"));
        match spec.coordinates {
            Coordinates::Lorenz => {
                let c = to_lorenz_coordinates(p);
                let traj = integrate_xyz(s0.to_xyz(p.r), &c, spec.t_end, spec.tol)?;
                let mut table = Table::new(["tau", "X", "Y", "Z"]);
                for tau in times {
                    let s = traj.at(tau).ok_or_else(|| missing(tau))?;
                    table.push(vec![tau.into(), s.x.into(), s.y.into(), s.z.into()]);
                }
                Ok(table)
            }
            Coordinates::Laser if p.delta_c == 0.0 => {
                let traj = integrate_real(s0, p, spec.t_end, spec.tol)?;
                let mut table = Table::new(["t", "E", "P", "D"]);
                for t in times {
                    let s = traj.at(t).ok_or_else(|| missing(t))?;
                    table.push(vec![t.into(), s.e.into(), s.p.into(), s.d.into()]);
                }
                Ok(table)
            }
            Coordinates::Laser => {
                let traj = integrate_complex(ComplexModeState::from_real(s0), p, spec.t_end, spec.tol)?;
                let mut table = Table::new(["t", "F_re", "F_im", "P_re", "P_im", "D", "E", "P_quadrature"]);
                for t in times {
                    let s = traj.at(t).ok_or_else(|| missing(t))?;
                    table.push(vec![
                        t.into(),
                        s.f.re.into(),
                        s.f.im.into(),
                        s.p.re.into(),
                        s.p.im.into(),
                        s.d.into(),
                        s.field_amplitude().into(),
                        s.p_quadrature().into(),
                    ]);
                }
                Ok(table)
            }
        }
    }

    fn lyapunov(&self, p: &SingleModeParams, seed: u64) -> Result<Table, CliError> {
        let mut rng = StdRng::seed_from_u64(seed);
        let tangent: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let lambda = lyapunov_max(p, self.initial(p), tangent, &self.lyapunov.into())?;
        let c = to_lorenz_coordinates(p);
        let [kind, r_hb] = threshold_cells(hopf_threshold(p)?.threshold);
        let mut table = Table::new(["sigma", "b", "r", "hopf", "r_hb", "lambda_max_tau", "lambda_max_t"]);
        table.push(vec![
            c.sigma.into(),
            c.b.into(),
            c.r.into(),
            kind,
            r_hb,
            lambda.into(),
            (lambda * p.gamma_perp).into(),
        ]);
        Ok(table)
    }

    fn instability_ratio(&self, p: &SingleModeParams) -> Result<Table, CliError> {
        let gain = self.gain.ok_or_else(|| CliError::Config("params.gain is required".into()))?;
        let hopf = hopf_threshold(p)?;
        let HopfThreshold::Finite(r_hb) = hopf.threshold else {
            return Err(CliError::Regime(
                "kappa <= gamma_perp + gamma_par: the lasing state never destabilizes".into(),
            ));
        };
        let ratio = three_level_instability_ratio(gain, self.r_on, r_hb)?;
        let mut table = Table::new(["gain", "r_on", "r_hb", "pump_ratio"]);
        table.push(vec![gain.into(), self.r_on.into(), r_hb.into(), ratio.into()]);
        Ok(table)
    }
}
