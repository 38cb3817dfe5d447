//! Single-pass amplification of a monochromatic field in a saturable medium.
//!
//! Along the medium the intensity `I = |α|²` obeys
//! `dI/dz = (2γ⊥d0g/c)·I / (δ² + γ⊥² + 4γ⊥I/γ∥)` and the phase follows the
//! log-amplitude, `dφ = Δ·d ln|α|`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem, Options};
use crate::params::MediumParams;
use crate::roots::{self, RootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    Weak,
    Intermediate,
    Strong,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Weak => "weak",
            Self::Intermediate => "intermediate",
            Self::Strong => "strong",
        }
    }
}

/// Intensity above which the strong-field line applies (before the 100× margin).
fn strong_scale(m: &MediumParams) -> f64 {
    m.saturation_intensity()
        .max(m.delta * m.delta * m.gamma_par / (4.0 * m.gamma_perp))
}

pub fn classify(intensity: f64, m: &MediumParams) -> Regime {
    if intensity < 0.01 * m.saturation_intensity() {
        Regime::Weak
    } else if intensity > 100.0 * strong_scale(m) {
        Regime::Strong
    } else {
        Regime::Intermediate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AmplifierWarning {
    /// α(0) = 0 in a gain medium: the zero solution is unstable.
    UnstableZeroField,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropagationResult {
    pub z: Vec<f64>,
    /// |α(z)|².
    pub amp2: Vec<f64>,
    pub phase: Vec<f64>,
    pub regime: Vec<Regime>,
    pub warnings: Vec<AmplifierWarning>,
}

/// `du/dz` for `u = ln I`.
struct LogIntensity {
    rate: f64,
    lorentz: f64,
    sat: f64,
}

impl OdeSystem for LogIntensity {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, _z: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = self.rate / (self.lorentz + self.sat * libm::exp(y[0]));
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            constraint: "must be > 0",
        })
    }
}

/// Integrate the propagation equation on `n_points` equispaced positions in `[0, z_end]`.
pub fn propagate_exact(
    alpha0: Complex64,
    m: &MediumParams,
    c: f64,
    z_end: f64,
    n_points: usize,
) -> Result<PropagationResult> {
    m.validate()?;
    check_positive("c", c)?;
    check_positive("z_end", z_end)?;
    if n_points < 2 {
        return Err(Error::InvalidParameter {
            name: "n_points",
            value: n_points as f64,
            constraint: "must be >= 2",
        });
    }
    let z: Vec<f64> = (0..n_points)
        .map(|i| z_end * i as f64 / (n_points - 1) as f64)
        .collect();
    let phi0 = alpha0.arg();
    let i0 = alpha0.norm_sqr();

    if i0 == 0.0 {
        let warnings = if m.d0 > 0.0 {
            alloc::vec![AmplifierWarning::UnstableZeroField]
        } else {
            Vec::new()
        };
        return Ok(PropagationResult {
            amp2: alloc::vec![0.0; n_points],
            phase: alloc::vec![phi0; n_points],
            regime: alloc::vec![Regime::Weak; n_points],
            z,
            warnings,
        });
    }

    let gp = m.gamma_perp;
    let sys = LogIntensity {
        rate: 2.0 * gp * m.d0 * m.g / c,
        lorentz: gp * gp + m.delta * m.delta,
        sat: 4.0 * gp / m.gamma_par,
    };
    let u0 = libm::log(i0);
    let opts = Options {
        rtol: 1e-13,
        atol: 1e-13,
        ..Options::default()
    };
    let us = ode::integrate_to_times(&sys, 0.0, &[u0], &z[1..], opts)?;
    let delta_ratio = m.detuning_ratio();

    let mut amp2 = Vec::with_capacity(n_points);
    let mut phase = Vec::with_capacity(n_points);
    amp2.push(i0);
    phase.push(phi0);
    for u in us {
        amp2.push(libm::exp(u[0]));
        phase.push(phi0 + 0.5 * delta_ratio * (u[0] - u0));
    }
    let regime = amp2.iter().map(|&i| classify(i, m)).collect();
    Ok(PropagationResult {
        z,
        amp2,
        phase,
        regime,
        warnings: Vec::new(),
    })
}

/// |α(z)| from the implicit relation
/// `(γ⊥² + δ²) ln(A/A₀) + 2(γ⊥/γ∥)(A² − A₀²) = (γ⊥d0g/c) z`.
pub fn solve_implicit(alpha0_mag: f64, m: &MediumParams, c: f64, z: f64) -> Result<f64> {
    check_positive("alpha0_mag", alpha0_mag)?;
    check_positive("c", c)?;
    m.validate()?;
    if z == 0.0 {
        return Ok(alpha0_mag);
    }
    let gp = m.gamma_perp;
    let lorentz = gp * gp + m.delta * m.delta;
    let k = 2.0 * gp / m.gamma_par;
    let rhs = gp * m.d0 * m.g / c * z;
    let ln_a0 = libm::log(alpha0_mag);
    let i0 = alpha0_mag * alpha0_mag;

    // w = ln(A/A₀); A₀²(e^{2w} − 1) evaluated without cancellation
    let f = |w: f64| {
        let grow = i0 * libm::expm1(2.0 * w);
        let f = lorentz * w + k * grow - rhs;
        let df = lorentz + 2.0 * k * libm::exp(2.0 * (w + ln_a0));
        (f, df)
    };
    let az = m.small_signal_gain(c) * z;
    let lo = az.min(0.0);
    let hi_base = az.max(0.0);
    let hi = hi_base
        + libm::log1p(m.gamma_par * gp * az.abs() * libm::exp(-hi_base - ln_a0));
    let opts = RootOptions {
        xtol_rel: 1e-14,
        xtol_abs: 1e-14,
        max_iter: 400,
    };
    let w = roots::newton_bisect(f, lo, hi, None, opts)?;
    Ok(alpha0_mag * libm::exp(w))
}

/// Weak-field estimate with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldEstimate {
    pub value: Complex64,
    pub within_regime: bool,
}

/// `α(0)·exp[(a/2)(1 + iΔ)z/(1 + Δ²)]`.
pub fn weak_field(alpha0: Complex64, m: &MediumParams, c: f64, z: f64) -> FieldEstimate {
    let a = m.small_signal_gain(c);
    let dr = m.detuning_ratio();
    let exponent = Complex64::new(1.0, dr) * (0.5 * a * z / (1.0 + dr * dr));
    let value = alpha0 * exponent.exp();
    let limit = 0.01 * m.saturation_intensity();
    FieldEstimate {
        value,
        within_regime: alpha0.norm_sqr() < limit && value.norm_sqr() < limit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntensityEstimate {
    pub value: f64,
    pub within_regime: bool,
}

/// `|α(0)|² + (γ∥γ⊥a/4) z`.
pub fn strong_field(alpha0_mag2: f64, m: &MediumParams, c: f64, z: f64) -> IntensityEstimate {
    let slope = m.saturation_intensity() * m.small_signal_gain(c);
    let value = alpha0_mag2 + slope * z;
    let scale = strong_scale(m);
    IntensityEstimate {
        value,
        within_regime: alpha0_mag2.min(value) > scale,
    }
}

/// Phase gained while the amplitude changes by `ratio`: `Δ·ln(ratio)`.
pub fn phase_along(ratio: f64, delta_ratio: f64) -> Result<f64> {
    check_positive("ratio", ratio)?;
    Ok(delta_ratio * libm::log(ratio))
}

/// `n = 1 + (d0 g/(γ⊥ω))·Δ/(1 + Δ²)`.
pub fn refractive_index(m: &MediumParams, omega: f64) -> Result<f64> {
    check_positive("omega", omega)?;
    let dr = m.detuning_ratio();
    Ok(1.0 + m.d0 * m.g / (m.gamma_perp * omega) * dr / (1.0 + dr * dr))
}
