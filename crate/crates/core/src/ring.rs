//! Steady lasing in a unidirectional ring cavity.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{effective_pump_r, CavityParams, MediumParams};
use crate::roots::{self, RootOptions};

/// Field re-entering the medium after one pass through the mirrors:
/// `R·e^{ikL_c}·α_exit`.
pub fn apply_boundary(alpha_exit: Complex64, cav: &CavityParams, k: f64) -> Complex64 {
    alpha_exit * Complex64::from_polar(cav.reflectivity, k * cav.cavity_length)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExitIntensity {
    /// |α(L_m)|², zero below threshold.
    pub value: f64,
    pub below_threshold: bool,
}

/// `(γ∥γ⊥/4)·(|ln R²|/(1 − R²))·(r − 1 − Δ²)`, clamped at zero.
pub fn exit_intensity(r: f64, delta_ratio: f64, m: &MediumParams, cav: &CavityParams) -> ExitIntensity {
    let raw = m.saturation_intensity() * cav.loss_ratio() * (r - (1.0 + delta_ratio * delta_ratio));
    if raw < 0.0 {
        ExitIntensity {
            value: 0.0,
            below_threshold: true,
        }
    } else {
        ExitIntensity {
            value: raw,
            below_threshold: false,
        }
    }
}

pub fn resonant_exit_intensity(r: f64, m: &MediumParams, cav: &CavityParams) -> ExitIntensity {
    exit_intensity(r, 0.0, m, cav)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaserOperatingPoint {
    pub n: i64,
    /// Lasing angular frequency.
    pub omega_n: f64,
    pub r_on: f64,
    /// Normalized detuning (ω_n − ω₂₁)/γ⊥.
    pub delta: f64,
    /// Output intensity at the medium's own pump `r`; `None` for a lossless cavity.
    pub exit_intensity: Option<f64>,
    /// Another mode has the same threshold.
    pub degenerate: bool,
}

/// Lasing solutions `ω_n` and thresholds `r_on(n)` for every `n` in `n_range`,
/// sorted by threshold (then by |n|).
pub fn mode_family(
    m: &MediumParams,
    cav: &CavityParams,
    omega_c: f64,
    omega_21: f64,
    n_range: RangeInclusive<i64>,
) -> Result<Vec<LaserOperatingPoint>> {
    m.validate()?;
    cav.validate()?;
    let fsr = cav.free_spectral_range();
    let gap = omega_c - omega_21;
    if !(gap.abs() < fsr) {
        return Err(Error::DetuningExceedsFsr { detuning: gap, fsr });
    }
    let kappa = cav.kappa();
    let gp = m.gamma_perp;
    let pump = effective_pump_r(m, cav).ok().map(|p| p.r);

    let mut modes: Vec<LaserOperatingPoint> = n_range
        .map(|n| {
            let offset = gap + n as f64 * fsr;
            let delta = offset / (kappa + gp);
            let mut omega_n = omega_21 + gp * offset / (kappa + gp);
            if n == 0 {
                omega_n = omega_n.clamp(omega_c.min(omega_21), omega_c.max(omega_21));
            }
            let r_on = 1.0 + delta * delta;
            LaserOperatingPoint {
                n,
                omega_n,
                r_on,
                delta,
                exit_intensity: pump.map(|r| exit_intensity(r, delta, m, cav).value),
                degenerate: false,
            }
        })
        .collect();
    modes.sort_by(|a, b| {
        a.r_on
            .total_cmp(&b.r_on)
            .then(a.n.unsigned_abs().cmp(&b.n.unsigned_abs()))
            .then(a.n.cmp(&b.n))
    });
    for i in 1..modes.len() {
        let (a, b) = (modes[i - 1].r_on, modes[i].r_on);
        if (a - b).abs() <= 1e-12 * a.max(b) {
            modes[i - 1].degenerate = true;
            modes[i].degenerate = true;
        }
    }
    Ok(modes)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntensityProfile {
    /// Positions in `[0, L_m]`.
    pub z: Vec<f64>,
    /// |α(z)|².
    pub amp2: Vec<f64>,
}

impl IntensityProfile {
    /// |α(0)|²/|α(L_m)|².
    pub fn uniformity_ratio(&self) -> f64 {
        self.amp2[0] / self.amp2[self.amp2.len() - 1]
    }
}

/// Steady intracavity intensity along the medium.
///
/// With `u = ln(I/I(0))`, each point solves
/// `r·|ln R²|·z/L_m = (1 + Δ²)u + (4I(0)/(γ∥γ⊥))(e^u − 1)`.
pub fn intensity_profile(
    r: f64,
    delta_ratio: f64,
    m: &MediumParams,
    cav: &CavityParams,
    n_points: usize,
) -> Result<IntensityProfile> {
    m.validate()?;
    cav.validate()?;
    if n_points < 2 {
        return Err(Error::InvalidParameter {
            name: "n_points",
            value: n_points as f64,
            constraint: "must be >= 2",
        });
    }
    let r_on = 1.0 + delta_ratio * delta_ratio;
    if !(r > r_on) {
        return Err(Error::BelowThreshold { r, r_on });
    }
    let lm = cav.medium_length;
    let z: Vec<f64> = (0..n_points).map(|i| lm * i as f64 / (n_points - 1) as f64).collect();
    let exit = exit_intensity(r, delta_ratio, m, cav).value;
    let loss = cav.loss();
    if loss == 0.0 {
        // uniform-field limit reached exactly
        return Ok(IntensityProfile {
            amp2: alloc::vec![exit; n_points],
            z,
        });
    }
    let entry = cav.r2() * exit;
    let sat = 4.0 * entry / (m.gamma_par * m.gamma_perp);
    let opts = RootOptions {
        xtol_rel: 1e-15,
        xtol_abs: 1e-15,
        max_iter: 200,
    };

    let mut amp2 = Vec::with_capacity(n_points);
    amp2.push(entry);
    let mut u_prev = 0.0;
    for (i, &zi) in z.iter().enumerate().skip(1) {
        let u = if i == n_points - 1 {
            loss
        } else {
            let target = r * loss * zi / lm;
            let f = |u: f64| (r_on * u + sat * libm::expm1(u) - target, r_on + sat * libm::exp(u));
            roots::newton_bisect(f, u_prev, loss, Some(u_prev), opts)?
        };
        amp2.push(if i == n_points - 1 { exit } else { entry * libm::exp(u) });
        u_prev = u;
    }
    Ok(IntensityProfile { z, amp2 })
}
