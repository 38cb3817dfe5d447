//! Single-pass amplifier: field along the medium.

use mbloch_core::amplifier::{
    phase_along, propagate_exact, refractive_index, solve_implicit, strong_field, weak_field,
};
use mbloch_core::bloch::steady_state_two_level;
use mbloch_core::Complex64;
use serde::{Deserialize, Serialize};

use super::{at_least, core_diagnostic, positive, Context, MediumSpec};
use crate::config::{Diagnostic, Units};
use crate::error::CliError;
use crate::table::Table;

fn default_c() -> f64 {
    1.0
}

fn default_points() -> usize {
    201
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub medium: MediumSpec,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Input Rabi half-amplitude `[re, im]`.
    pub alpha0: [f64; 2],
    pub z_end: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    /// Optical angular frequency; adds a refractive-index column.
    pub omega: Option<f64>,
}

impl Params {
    fn alpha0(&self) -> Complex64 {
        Complex64::new(self.alpha0[0], self.alpha0[1])
    }

    pub fn check(&self, units: Units) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if let Err(e) = self.medium.build(units) {
            out.push(core_diagnostic("params.medium", &e));
        }
        positive("params.c", self.c, &mut out);
        positive("params.z_end", self.z_end, &mut out);
        at_least("params.n_points", self.n_points, 2, &mut out);
        if let Some(w) = self.omega {
            positive("params.omega", w, &mut out);
        }
        if !self.alpha0.iter().all(|v| v.is_finite()) {
            out.push(Diagnostic::error("params.alpha0", "must be finite"));
        } else if self.alpha0() == Complex64::new(0.0, 0.0) && self.medium.d0 > 0.0 {
            out.push(Diagnostic::warning(
                "params.alpha0",
                "zero input in a gain medium: the zero-field solution is unstable",
            ));
        }
        out
    }

    pub fn run(&self, ctx: &Context) -> Result<Table, CliError> {
        let (m, scale) = self.medium.build(ctx.units)?;
        // light speed in units of γ⊥ when normalized
        let c = self.c / scale;
        let a0 = self.alpha0() / scale;
        let res = propagate_exact(a0, &m, c, self.z_end, self.n_points)?;
        let sat = m.saturation_intensity();
        let dr = m.detuning_ratio();
        // penetration depth 1/a
        let a = m.small_signal_gain(c);
        let mut columns = vec![
            "z",
            "z_over_zpd",
            "intensity",
            "intensity_over_sat",
            "phase",
            "phase_lock",
            "implicit_intensity",
            "weak_intensity",
            "weak_valid",
            "strong_intensity",
            "strong_valid",
            "regime",
            "d_local",
        ];
        if self.omega.is_some() {
            columns.push("refractive_index");
        }
        let index = self.omega.map(|w| refractive_index(&m, w / scale)).transpose()?;
        let i0 = a0.norm_sqr();
        let mut table = Table::new(columns);
        for k in 0..res.z.len() {
            let (z, i) = (res.z[k], res.amp2[k]);
            let (lock, implicit) = if i0 > 0.0 {
                let ratio = (i / i0).sqrt();
                (
                    a0.arg() + phase_along(ratio, dr)?,
                    solve_implicit(i0.sqrt(), &m, c, z)?.powi(2),
                )
            } else {
                (a0.arg(), 0.0)
            };
            let weak = weak_field(a0, &m, c, z);
            let strong = strong_field(i0, &m, c, z);
            let alpha = Complex64::from_polar(i.sqrt(), res.phase[k]);
            let (d, _) = steady_state_two_level(alpha, &m);
            let mut row = vec![
                z.into(),
                (z * a).into(),
                i.into(),
                (i / sat).into(),
                res.phase[k].into(),
                lock.into(),
                implicit.into(),
                weak.value.norm_sqr().into(),
                weak.within_regime.into(),
                strong.value.into(),
                strong.within_regime.into(),
                res.regime[k].as_str().into(),
                d.into(),
            ];
            if let Some(n) = index {
                row.push(n.into());
            }
            table.push(row);
        }
        Ok(table)
    }
}
