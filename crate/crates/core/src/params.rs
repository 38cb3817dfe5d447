//! Physical constants of the medium and the ring cavity.
//!
//! Values are kept in whatever time and length units the caller uses; only
//! ratios enter the dimensionless results. [`MediumParams::normalized`] gives
//! the view with `γ⊥ = 1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Default ratio by which a fast relaxation must exceed the slow ones for the
/// two-level reduction of a multi-level scheme to be trusted.
pub const DEFAULT_DOMINANCE_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Provenance {
    #[default]
    TwoLevel,
    ThreeLevel,
    FourLevel,
}

fn check(name: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

/// Effective two-level medium.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MediumParams {
    /// Coherence (dipole) decay rate γ⊥.
    pub gamma_perp: f64,
    /// Population decay rate γ∥.
    pub gamma_par: f64,
    /// Radiation–matter coupling, units of rate².
    pub g: f64,
    /// Unsaturated inversion.
    pub d0: f64,
    /// Field–atom detuning ω − ω₂₁.
    pub delta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub provenance: Provenance,
}

impl MediumParams {
    pub fn new(gamma_perp: f64, gamma_par: f64, g: f64, d0: f64, delta: f64) -> Result<Self> {
        let m = Self {
            gamma_perp,
            gamma_par,
            g,
            d0,
            delta,
            provenance: Provenance::TwoLevel,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check("gamma_perp", self.gamma_perp, self.gamma_perp > 0.0, "must be > 0")?;
        check("gamma_par", self.gamma_par, self.gamma_par > 0.0, "must be > 0")?;
        check(
            "gamma_perp",
            self.gamma_perp,
            self.gamma_perp >= 0.5 * self.gamma_par,
            "must be >= gamma_par / 2",
        )?;
        check("g", self.g, self.g >= 0.0, "must be >= 0")?;
        check("d0", self.d0, self.d0.abs() <= 1.0, "must lie in [-1, 1]")?;
        check("delta", self.delta, true, "must be finite")
    }

    /// |α|² at which the resonant inversion is halved, γ⊥γ∥/4.
    pub fn saturation_intensity(&self) -> f64 {
        0.25 * self.gamma_perp * self.gamma_par
    }

    /// Small-signal intensity gain per unit length, `a = 2 d0 g / (c γ⊥)`.
    pub fn small_signal_gain(&self, c: f64) -> f64 {
        2.0 * self.d0 * self.g / (c * self.gamma_perp)
    }

    /// Normalized detuning Δ = δ/γ⊥.
    pub fn detuning_ratio(&self) -> f64 {
        self.delta / self.gamma_perp
    }

    /// Same medium with time measured in units of 1/γ⊥.
    pub fn normalized(&self) -> Self {
        let s = self.gamma_perp;
        Self {
            gamma_perp: 1.0,
            gamma_par: self.gamma_par / s,
            g: self.g / (s * s),
            d0: self.d0,
            delta: self.delta / s,
            provenance: self.provenance,
        }
    }
}

/// Incoherently pumped three-level scheme (pump 1→3, fast 3→2, laser 2↔1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThreeLevelParams {
    pub gamma_21: f64,
    pub gamma_31: f64,
    pub gamma_32: f64,
    pub gamma_perp: f64,
    pub pump: f64,
}

impl ThreeLevelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_21", self.gamma_21),
            ("gamma_31", self.gamma_31),
            ("gamma_32", self.gamma_32),
            ("gamma_perp", self.gamma_perp),
            ("pump", self.pump),
        ] {
            check(name, v, v >= 0.0, "must be >= 0")?;
        }
        Ok(())
    }
}

/// Four-level scheme (pump 0→3, fast 3→2, laser 2↔1, fast drain 1→0).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourLevelParams {
    pub gamma_10: f64,
    pub gamma_20: f64,
    pub gamma_21: f64,
    pub gamma_30: f64,
    pub gamma_31: f64,
    pub gamma_32: f64,
    pub gamma_perp: f64,
    pub pump: f64,
}

impl FourLevelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_10", self.gamma_10),
            ("gamma_20", self.gamma_20),
            ("gamma_21", self.gamma_21),
            ("gamma_30", self.gamma_30),
            ("gamma_31", self.gamma_31),
            ("gamma_32", self.gamma_32),
            ("gamma_perp", self.gamma_perp),
            ("pump", self.pump),
        ] {
            check(name, v, v >= 0.0, "must be >= 0")?;
        }
        Ok(())
    }
}

/// Conditions under which the two-level reduction is only approximate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ValidityWarning {
    /// γ₃₂ is not much faster than the other rates of the scheme.
    PumpLevelNotDominant { ratio: f64, required: f64 },
    /// γ₁₀ is not much faster than the other rates (four-level only).
    LowerLevelDrainSlow { ratio: f64, required: f64 },
}

/// Effective two-level constants obtained from a multi-level scheme.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoLevelMapping {
    pub gamma_perp: f64,
    pub gamma_par: f64,
    pub d0: f64,
    pub provenance: Provenance,
    pub warnings: Vec<ValidityWarning>,
}

impl TwoLevelMapping {
    /// Complete the medium with the coupling and detuning.
    pub fn into_medium(&self, g: f64, delta: f64) -> Result<MediumParams> {
        let m = MediumParams {
            gamma_perp: self.gamma_perp,
            gamma_par: self.gamma_par,
            g,
            d0: self.d0,
            delta,
            provenance: self.provenance,
        };
        m.validate()?;
        Ok(m)
    }
}

fn dominance(fast: f64, others: &[f64]) -> f64 {
    let slow = others.iter().copied().fold(0.0, f64::max);
    if slow == 0.0 {
        f64::INFINITY
    } else {
        fast / slow
    }
}

pub fn map_three_level(p: &ThreeLevelParams) -> Result<TwoLevelMapping> {
    map_three_level_with_ratio(p, DEFAULT_DOMINANCE_RATIO)
}

/// `γ∥ = R + γ₂₁`, `d0 = (R − γ₂₁)/(R + γ₂₁)`.
pub fn map_three_level_with_ratio(p: &ThreeLevelParams, required: f64) -> Result<TwoLevelMapping> {
    p.validate()?;
    let gamma_par = p.pump + p.gamma_21;
    check("pump + gamma_21", gamma_par, gamma_par > 0.0, "must be > 0 (d0 undefined)")?;
    let mut warnings = Vec::new();
    let ratio = dominance(p.gamma_32, &[p.gamma_21, p.gamma_31, p.gamma_perp, p.pump]);
    if ratio < required {
        warnings.push(ValidityWarning::PumpLevelNotDominant { ratio, required });
    }
    Ok(TwoLevelMapping {
        gamma_perp: p.gamma_perp,
        gamma_par,
        d0: (p.pump - p.gamma_21) / gamma_par,
        provenance: Provenance::ThreeLevel,
        warnings,
    })
}

pub fn map_four_level(p: &FourLevelParams) -> Result<TwoLevelMapping> {
    map_four_level_with_ratio(p, DEFAULT_DOMINANCE_RATIO)
}

/// `γ∥ = γ₂₀ + γ₂₁ + R`, `d0 = R/(γ₂₀ + γ₂₁ + R)`.
pub fn map_four_level_with_ratio(p: &FourLevelParams, required: f64) -> Result<TwoLevelMapping> {
    p.validate()?;
    let gamma_par = p.gamma_20 + p.gamma_21 + p.pump;
    check(
        "gamma_20 + gamma_21 + pump",
        gamma_par,
        gamma_par > 0.0,
        "must be > 0 (d0 undefined)",
    )?;
    let slow = [p.gamma_20, p.gamma_21, p.gamma_30, p.gamma_31, p.gamma_perp, p.pump];
    let mut warnings = Vec::new();
    let ratio = dominance(p.gamma_32, &slow);
    if ratio < required {
        warnings.push(ValidityWarning::PumpLevelNotDominant { ratio, required });
    }
    let ratio = dominance(p.gamma_10, &slow);
    if ratio < required {
        warnings.push(ValidityWarning::LowerLevelDrainSlow { ratio, required });
    }
    Ok(TwoLevelMapping {
        gamma_perp: p.gamma_perp,
        gamma_par,
        d0: p.pump / gamma_par,
        provenance: Provenance::FourLevel,
        warnings,
    })
}

/// Unidirectional ring: amplitude reflectivity `R`, medium length `L_m`,
/// cavity perimeter `L_c`, light speed `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CavityParams {
    pub reflectivity: f64,
    pub medium_length: f64,
    pub cavity_length: f64,
    pub c: f64,
}

impl CavityParams {
    pub fn new(reflectivity: f64, medium_length: f64, cavity_length: f64, c: f64) -> Result<Self> {
        let cav = Self {
            reflectivity,
            medium_length,
            cavity_length,
            c,
        };
        cav.validate()?;
        Ok(cav)
    }

    /// Cavity whose intensity reflectivity is `r2 = R²`.
    pub fn from_intensity_reflectivity(r2: f64, medium_length: f64, cavity_length: f64, c: f64) -> Result<Self> {
        check("R^2", r2, r2 > 0.0 && r2 <= 1.0, "must lie in (0, 1]")?;
        Self::new(libm::sqrt(r2), medium_length, cavity_length, c)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            "reflectivity",
            self.reflectivity,
            self.reflectivity > 0.0 && self.reflectivity <= 1.0,
            "must lie in (0, 1]",
        )?;
        check("medium_length", self.medium_length, self.medium_length > 0.0, "must be > 0")?;
        check(
            "cavity_length",
            self.cavity_length,
            self.cavity_length >= self.medium_length,
            "must be >= medium_length",
        )?;
        check("c", self.c, self.c > 0.0, "must be > 0")
    }

    /// Intensity reflectivity R².
    pub fn r2(&self) -> f64 {
        self.reflectivity * self.reflectivity
    }

    /// Round-trip logarithmic loss |ln R²|.
    pub fn loss(&self) -> f64 {
        (2.0 * libm::log(self.reflectivity)).abs()
    }

    /// `|ln R²|/(1 − R²)`, continuous through `R = 1` where it tends to 1.
    pub fn loss_ratio(&self) -> f64 {
        // 1 − R² from the same logarithm keeps numerator and denominator consistent
        let x = -libm::expm1(-self.loss());
        if x < 1e-8 {
            1.0 + x / 2.0 + x * x / 3.0
        } else {
            self.loss() / x
        }
    }

    /// Cavity damping rate κ = c|ln R²|/(2 L_c).
    pub fn kappa(&self) -> f64 {
        self.c * self.loss() / (2.0 * self.cavity_length)
    }

    /// Time of flight through the empty part of the ring, (L_c − L_m)/c.
    pub fn round_trip_delay(&self) -> f64 {
        (self.cavity_length - self.medium_length) / self.c
    }

    /// Longitudinal-mode spacing 2πc/L_c (angular frequency).
    pub fn free_spectral_range(&self) -> f64 {
        2.0 * PI * self.c / self.cavity_length
    }

    /// Effective advection speed v = c L_m / L_c of the uniform-field equations.
    pub fn advection_velocity(&self) -> f64 {
        self.c * self.medium_length / self.cavity_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffectivePump {
    /// Gain-to-loss ratio r.
    pub r: f64,
    /// Pump-independent factor G with r = G·d0.
    pub gain: f64,
}

/// `r = 2 d0 g L_m / (γ⊥ c |ln R²|)`.
pub fn effective_pump_r(m: &MediumParams, cav: &CavityParams) -> Result<EffectivePump> {
    let loss = cav.loss();
    if loss == 0.0 {
        return Err(Error::LosslessCavity);
    }
    let gain = 2.0 * m.g * cav.medium_length / (m.gamma_perp * cav.c * loss);
    Ok(EffectivePump { r: gain * m.d0, gain })
}
