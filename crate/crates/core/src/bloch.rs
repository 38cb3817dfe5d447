//! Optical Bloch dynamics under a prescribed field.
//!
//! The field enters through the complex Rabi half-amplitude α(t). All
//! coherences are slowly varying (rotating frame of the field).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem, Options, StateVector, Trajectory};
use crate::params::{FourLevelParams, MediumParams, ThreeLevelParams};

/// Prescribed Rabi half-amplitude α(t).
pub enum DriveField {
    Constant(Complex64),
    Signal(Box<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl DriveField {
    pub fn zero() -> Self {
        Self::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn at(&self, t: f64) -> Complex64 {
        match self {
            Self::Constant(a) => *a,
            Self::Signal(f) => f(t),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Self::Constant(a) = self {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: a.norm(),
                    constraint: "must be finite",
                });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DriveField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(a) => f.debug_tuple("Constant").field(a).finish(),
            Self::Signal(_) => f.write_str("Signal(..)"),
        }
    }
}

fn tolerance(tol: f64) -> Result<Options> {
    if tol > 0.0 && tol.is_finite() {
        Ok(Options::with_tolerance(tol))
    } else {
        Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            constraint: "must be > 0",
        })
    }
}

fn horizon(t_end: f64) -> Result<()> {
    if t_end >= 0.0 && t_end.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            constraint: "must be finite and >= 0",
        })
    }
}

/// `X = i(ασ₁₂ − α*σ₂₁) = −2 Im(ασ₁₂)`: net stimulated transfer 1 → 2.
fn transfer(alpha: Complex64, sigma12: Complex64) -> f64 {
    -2.0 * (alpha * sigma12).im
}

/// `∂ₜσ₁₂ = −(γ⊥ + iδ)σ₁₂ + iα* d`.
fn coherence_rate(gamma_perp: f64, delta: f64, alpha: Complex64, sigma12: Complex64, d: f64) -> Complex64 {
    -Complex64::new(gamma_perp, delta) * sigma12 + Complex64::i() * alpha.conj() * d
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoLevelState {
    /// Inversion ρ₂₂ − ρ₁₁.
    pub d: f64,
    pub sigma12: Complex64,
}

impl TwoLevelState {
    /// Checks the Bloch-sphere bounds |d| ≤ 1 and |σ₁₂| ≤ 1/2.
    pub fn validate(&self) -> Result<()> {
        const SLACK: f64 = 1e-12;
        if !(self.d.abs() <= 1.0 + SLACK) {
            return Err(Error::InvalidParameter {
                name: "d",
                value: self.d,
                constraint: "must lie in [-1, 1]",
            });
        }
        let s = self.sigma12.norm();
        if !(s <= 0.5 + SLACK) {
            return Err(Error::InvalidParameter {
                name: "sigma12",
                value: s,
                constraint: "modulus must be <= 1/2",
            });
        }
        Ok(())
    }
}

impl StateVector for TwoLevelState {
    const DIM: usize = 3;
    const COMPONENTS: &'static [&'static str] = &["d", "sigma12_re", "sigma12_im"];

    fn write(&self, out: &mut [f64]) {
        out[0] = self.d;
        out[1] = self.sigma12.re;
        out[2] = self.sigma12.im;
    }

    fn read(v: &[f64]) -> Self {
        Self {
            d: v[0],
            sigma12: Complex64::new(v[1], v[2]),
        }
    }
}

struct TwoLevel<'a> {
    drive: &'a DriveField,
    m: &'a MediumParams,
}

impl OdeSystem for TwoLevel<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let alpha = self.drive.at(t);
        let s = TwoLevelState::read(y);
        let m = self.m;
        dy[0] = m.gamma_par * (m.d0 - s.d) + 2.0 * transfer(alpha, s.sigma12);
        let ds = coherence_rate(m.gamma_perp, m.delta, alpha, s.sigma12, s.d);
        dy[1] = ds.re;
        dy[2] = ds.im;
    }
}

pub fn integrate_two_level(
    state0: TwoLevelState,
    drive: &DriveField,
    m: &MediumParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<TwoLevelState>> {
    let opts = tolerance(tol)?;
    horizon(t_end)?;
    state0.validate()?;
    drive.validate()?;
    m.validate()?;
    let sys = TwoLevel { drive, m };
    let sol = ode::integrate(&sys, 0.0, &state0.to_vec(), t_end, opts)?;
    Ok(Trajectory::new(sol))
}

/// Steady inversion and coherence σ₂₁ under constant α.
pub fn steady_state_two_level(alpha: Complex64, m: &MediumParams) -> (f64, Complex64) {
    let (gp, delta) = (m.gamma_perp, m.delta);
    let lorentz = gp * gp + delta * delta;
    let den = lorentz + 4.0 * gp * alpha.norm_sqr() / m.gamma_par;
    let d = m.d0 * lorentz / den;
    let sigma21 = alpha * Complex64::new(delta, -gp) * (m.d0 / den);
    (d, sigma21)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThreeLevelState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub sigma12: Complex64,
}

impl ThreeLevelState {
    pub fn ground() -> Self {
        Self {
            rho11: 1.0,
            rho22: 0.0,
            rho33: 0.0,
            sigma12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33
    }

    pub fn inversion(&self) -> f64 {
        self.rho22 - self.rho11
    }
}

impl StateVector for ThreeLevelState {
    const DIM: usize = 5;
    const COMPONENTS: &'static [&'static str] = &["rho11", "rho22", "rho33", "sigma12_re", "sigma12_im"];

    fn write(&self, out: &mut [f64]) {
        out[..5].copy_from_slice(&[self.rho11, self.rho22, self.rho33, self.sigma12.re, self.sigma12.im]);
    }

    fn read(v: &[f64]) -> Self {
        Self {
            rho11: v[0],
            rho22: v[1],
            rho33: v[2],
            sigma12: Complex64::new(v[3], v[4]),
        }
    }
}

struct ThreeLevel<'a> {
    drive: &'a DriveField,
    p: &'a ThreeLevelParams,
    delta: f64,
}

impl OdeSystem for ThreeLevel<'_> {
    fn dim(&self) -> usize {
        5
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let alpha = self.drive.at(t);
        let s = ThreeLevelState::read(y);
        let p = self.p;
        let x = transfer(alpha, s.sigma12);
        let pump = p.pump * (s.rho11 - s.rho33);
        dy[0] = p.gamma_21 * s.rho22 + p.gamma_31 * s.rho33 - pump - x;
        dy[1] = -p.gamma_21 * s.rho22 + p.gamma_32 * s.rho33 + x;
        dy[2] = -(p.gamma_31 + p.gamma_32) * s.rho33 + pump;
        let ds = coherence_rate(p.gamma_perp, self.delta, alpha, s.sigma12, s.inversion());
        dy[3] = ds.re;
        dy[4] = ds.im;
    }
}

pub fn integrate_three_level(
    state0: ThreeLevelState,
    drive: &DriveField,
    p: &ThreeLevelParams,
    delta: f64,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<ThreeLevelState>> {
    let opts = tolerance(tol)?;
    horizon(t_end)?;
    drive.validate()?;
    p.validate()?;
    let sys = ThreeLevel { drive, p, delta };
    let sol = ode::integrate(&sys, 0.0, &state0.to_vec(), t_end, opts)?;
    Ok(Trajectory::new(sol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourLevelState {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub sigma12: Complex64,
}

impl FourLevelState {
    pub fn ground() -> Self {
        Self {
            rho00: 1.0,
            rho11: 0.0,
            rho22: 0.0,
            rho33: 0.0,
            sigma12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11 + self.rho22 + self.rho33
    }

    pub fn inversion(&self) -> f64 {
        self.rho22 - self.rho11
    }
}

impl StateVector for FourLevelState {
    const DIM: usize = 6;
    const COMPONENTS: &'static [&'static str] =
        &["rho00", "rho11", "rho22", "rho33", "sigma12_re", "sigma12_im"];

    fn write(&self, out: &mut [f64]) {
        out[..6].copy_from_slice(&[
            self.rho00,
            self.rho11,
            self.rho22,
            self.rho33,
            self.sigma12.re,
            self.sigma12.im,
        ]);
    }

    fn read(v: &[f64]) -> Self {
        Self {
            rho00: v[0],
            rho11: v[1],
            rho22: v[2],
            rho33: v[3],
            sigma12: Complex64::new(v[4], v[5]),
        }
    }
}

struct FourLevel<'a> {
    drive: &'a DriveField,
    p: &'a FourLevelParams,
    delta: f64,
}

impl OdeSystem for FourLevel<'_> {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let alpha = self.drive.at(t);
        let s = FourLevelState::read(y);
        let p = self.p;
        let x = transfer(alpha, s.sigma12);
        let pump = p.pump * (s.rho00 - s.rho33);
        dy[0] = p.gamma_10 * s.rho11 + p.gamma_20 * s.rho22 + p.gamma_30 * s.rho33 - pump;
        dy[1] = -p.gamma_10 * s.rho11 + p.gamma_21 * s.rho22 + p.gamma_31 * s.rho33 - x;
        dy[2] = -(p.gamma_20 + p.gamma_21) * s.rho22 + p.gamma_32 * s.rho33 + x;
        dy[3] = -(p.gamma_30 + p.gamma_31 + p.gamma_32) * s.rho33 + pump;
        let ds = coherence_rate(p.gamma_perp, self.delta, alpha, s.sigma12, s.inversion());
        dy[4] = ds.re;
        dy[5] = ds.im;
    }
}

pub fn integrate_four_level(
    state0: FourLevelState,
    drive: &DriveField,
    p: &FourLevelParams,
    delta: f64,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<FourLevelState>> {
    let opts = tolerance(tol)?;
    horizon(t_end)?;
    drive.validate()?;
    p.validate()?;
    let sys = FourLevel { drive, p, delta };
    let sol = ode::integrate(&sys, 0.0, &state0.to_vec(), t_end, opts)?;
    Ok(Trajectory::new(sol))
}

/// Two lasing levels exchanging population with a reservoir.
///
/// Level `i` decays to the reservoir at `gamma_i_ext`, internally at
/// `gamma_21` (2→1) and `gamma_12` (1→2), and is refilled at `lambda_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpenTwoLevelParams {
    pub gamma_2_ext: f64,
    pub gamma_1_ext: f64,
    pub gamma_21: f64,
    pub gamma_12: f64,
    pub lambda_2: f64,
    pub lambda_1: f64,
    pub gamma_perp: f64,
    pub delta: f64,
}

impl OpenTwoLevelParams {
    pub fn gamma_2(&self) -> f64 {
        self.gamma_2_ext + self.gamma_21
    }

    pub fn gamma_1(&self) -> f64 {
        self.gamma_1_ext + self.gamma_12
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_2_ext", self.gamma_2_ext),
            ("gamma_1_ext", self.gamma_1_ext),
            ("gamma_21", self.gamma_21),
            ("gamma_12", self.gamma_12),
            ("lambda_2", self.lambda_2),
            ("lambda_1", self.lambda_1),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    constraint: "must be >= 0",
                });
            }
        }
        if !(self.gamma_perp > 0.0 && self.gamma_perp.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma_perp",
                value: self.gamma_perp,
                constraint: "must be > 0",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpenTwoLevelState {
    pub rho22: f64,
    pub rho11: f64,
    pub sigma12: Complex64,
}

impl StateVector for OpenTwoLevelState {
    const DIM: usize = 4;
    const COMPONENTS: &'static [&'static str] = &["rho22", "rho11", "sigma12_re", "sigma12_im"];

    fn write(&self, out: &mut [f64]) {
        out[..4].copy_from_slice(&[self.rho22, self.rho11, self.sigma12.re, self.sigma12.im]);
    }

    fn read(v: &[f64]) -> Self {
        Self {
            rho22: v[0],
            rho11: v[1],
            sigma12: Complex64::new(v[2], v[3]),
        }
    }
}

struct OpenTwoLevel<'a> {
    drive: &'a DriveField,
    p: &'a OpenTwoLevelParams,
}

impl OdeSystem for OpenTwoLevel<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let alpha = self.drive.at(t);
        let s = OpenTwoLevelState::read(y);
        let p = self.p;
        let x = transfer(alpha, s.sigma12);
        dy[0] = -p.gamma_2() * s.rho22 + p.gamma_12 * s.rho11 + p.lambda_2 + x;
        dy[1] = -p.gamma_1() * s.rho11 + p.gamma_21 * s.rho22 + p.lambda_1 - x;
        let ds = coherence_rate(p.gamma_perp, p.delta, alpha, s.sigma12, s.rho22 - s.rho11);
        dy[2] = ds.re;
        dy[3] = ds.im;
    }
}

pub fn integrate_open_two_level(
    state0: OpenTwoLevelState,
    drive: &DriveField,
    p: &OpenTwoLevelParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<OpenTwoLevelState>> {
    let opts = tolerance(tol)?;
    horizon(t_end)?;
    drive.validate()?;
    p.validate()?;
    let sys = OpenTwoLevel { drive, p };
    let sol = ode::integrate(&sys, 0.0, &state0.to_vec(), t_end, opts)?;
    Ok(Trajectory::new(sol))
}

/// Populations `(ρ₂₂, ρ₁₁)` of the rate-equation limit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Populations {
    pub rho22: f64,
    pub rho11: f64,
}

impl StateVector for Populations {
    const DIM: usize = 2;
    const COMPONENTS: &'static [&'static str] = &["rho22", "rho11"];

    fn write(&self, out: &mut [f64]) {
        out[0] = self.rho22;
        out[1] = self.rho11;
    }

    fn read(v: &[f64]) -> Self {
        Self {
            rho22: v[0],
            rho11: v[1],
        }
    }
}

/// Stimulated transition rate R = 2|α|²/γ⊥.
pub fn stimulated_rate(alpha: Complex64, gamma_perp: f64) -> f64 {
    2.0 * alpha.norm_sqr() / gamma_perp
}

/// Right-hand sides of the rate equations with stimulated rate `r_stim`.
pub fn rate_equations_step(pop: Populations, r_stim: f64, p: &OpenTwoLevelParams) -> Populations {
    let stim = r_stim * (pop.rho22 - pop.rho11);
    Populations {
        rho22: p.lambda_2 - p.gamma_2() * pop.rho22 + p.gamma_12 * pop.rho11 - stim,
        rho11: p.lambda_1 - p.gamma_1() * pop.rho11 + p.gamma_21 * pop.rho22 + stim,
    }
}

struct RateEquations<'a> {
    drive: &'a DriveField,
    p: &'a OpenTwoLevelParams,
}

impl OdeSystem for RateEquations<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let r = stimulated_rate(self.drive.at(t), self.p.gamma_perp);
        rate_equations_step(Populations::read(y), r, self.p).write(dy);
    }
}

pub fn integrate_rate_equations(
    pop0: Populations,
    drive: &DriveField,
    p: &OpenTwoLevelParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<Populations>> {
    let opts = tolerance(tol)?;
    horizon(t_end)?;
    drive.validate()?;
    p.validate()?;
    let sys = RateEquations { drive, p };
    let sol = ode::integrate(&sys, 0.0, &pop0.to_vec(), t_end, opts)?;
    Ok(Trajectory::new(sol))
}

/// A real signal with known first and second derivatives.
pub trait SmoothSignal {
    /// `[g(t), g'(t), g''(t)]`.
    fn eval(&self, t: f64) -> [f64; 3];
}

/// `offset + amplitude·cos(ωt + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sinusoid {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

impl SmoothSignal for Sinusoid {
    fn eval(&self, t: f64) -> [f64; 3] {
        let (s, c) = libm::sincos(self.omega * t + self.phase);
        let a = self.amplitude;
        let w = self.omega;
        [self.offset + a * c, -a * w * s, -a * w * w * c]
    }
}

impl<F: Fn(f64) -> [f64; 3]> SmoothSignal for F {
    fn eval(&self, t: f64) -> [f64; 3] {
        self(t)
    }
}

/// Truncated series `f ≈ (1/γ)[g − g'/γ + g''/γ²]` for `f' = −γf + g`.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticApprox<S> {
    signal: S,
    gamma: f64,
    order: u8,
}

impl<S: SmoothSignal> AdiabaticApprox<S> {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn eval(&self, t: f64) -> f64 {
        let [g, g1, g2] = self.signal.eval(t);
        let inv = 1.0 / self.gamma;
        let mut f = g;
        if self.order >= 1 {
            f -= g1 * inv;
        }
        if self.order >= 2 {
            f += g2 * inv * inv;
        }
        f * inv
    }
}

pub fn adiabatic_expansion<S: SmoothSignal>(signal: S, gamma: f64, order: u8) -> Result<AdiabaticApprox<S>> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            constraint: "must be > 0",
        });
    }
    if order > 2 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: order as f64,
            constraint: "must be 0, 1 or 2",
        });
    }
    Ok(AdiabaticApprox { signal, gamma, order })
}

struct LinearResponse<'a, S> {
    signal: &'a S,
    gamma: f64,
}

impl<S: SmoothSignal> OdeSystem for LinearResponse<'_, S> {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -self.gamma * y[0] + self.signal.eval(t)[0];
    }
}

/// Integrate `f' = −γf + g(t)` from `f(0) = f0`, sampling at `times`.
pub fn integrate_linear_response<S: SmoothSignal>(
    signal: &S,
    gamma: f64,
    f0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let opts = tolerance(tol)?;
    let sys = LinearResponse { signal, gamma };
    let ys = ode::integrate_to_times(&sys, 0.0, &[f0], times, opts)?;
    Ok(ys.into_iter().map(|y| y[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium(delta: f64) -> MediumParams {
        MediumParams::new(1.0, 0.5, 1.0, 0.6, delta).unwrap()
    }

    #[test]
    fn undriven_relaxation() {
        let m = medium(0.7);
        let s = Complex64::new(0.3, -0.2);
        let traj = integrate_two_level(
            TwoLevelState { d: m.d0, sigma12: s },
            &DriveField::zero(),
            &m,
            5.0,
            1e-10,
        )
        .unwrap();
        for (t, st) in traj.iter() {
            assert!((st.d - m.d0).abs() < 1e-12);
            assert!((st.sigma12.norm() - s.norm() * libm::exp(-t)).abs() < 1e-9);
        }
    }

    #[test]
    fn steady_state_examples() {
        let m = medium(0.0);
        let (d, s) = steady_state_two_level(Complex64::new(0.0, 0.0), &m);
        assert_eq!((d, s), (m.d0, Complex64::new(0.0, 0.0)));
        let alpha = Complex64::new(libm::sqrt(m.saturation_intensity()), 0.0);
        let (d, s) = steady_state_two_level(alpha, &m);
        assert!((d - m.d0 / 2.0).abs() < 1e-15);
        let expected = -Complex64::i() * m.d0 * alpha * m.gamma_perp
            / (m.gamma_perp * m.gamma_perp + 4.0 * m.gamma_perp * alpha.norm_sqr() / m.gamma_par);
        assert!((s - expected).norm() < 1e-15);
    }

    #[test]
    fn driven_two_level_reaches_steady_state() {
        let m = medium(0.4);
        let alpha = Complex64::new(0.3, 0.5);
        let tol = 1e-10;
        let traj = integrate_two_level(
            TwoLevelState {
                d: -1.0,
                sigma12: Complex64::new(0.0, 0.0),
            },
            &DriveField::Constant(alpha),
            &m,
            60.0,
            tol,
        )
        .unwrap();
        let end = traj.final_state();
        let (d, s21) = steady_state_two_level(alpha, &m);
        assert!((end.d - d).abs() < 10.0 * tol);
        assert!((end.sigma12.conj() - s21).norm() < 10.0 * tol);
    }

    #[test]
    fn unphysical_initial_state_is_rejected() {
        let bad = TwoLevelState {
            d: 0.0,
            sigma12: Complex64::new(0.6, 0.0),
        };
        assert!(integrate_two_level(bad, &DriveField::zero(), &medium(0.0), 1.0, 1e-9).is_err());
    }

    fn three(pump: f64) -> ThreeLevelParams {
        ThreeLevelParams {
            gamma_21: 1.0,
            gamma_31: 0.2,
            gamma_32: 1e4,
            gamma_perp: 1.0,
            pump,
        }
    }

    #[test]
    fn three_level_ground_state_is_stationary_without_pump() {
        let traj =
            integrate_three_level(ThreeLevelState::ground(), &DriveField::zero(), &three(0.0), 0.0, 10.0, 1e-9).unwrap();
        assert_eq!(traj.final_state(), ThreeLevelState::ground());
    }

    #[test]
    fn three_level_inversion_matches_mapping() {
        let p = three(3.0);
        let traj = integrate_three_level(ThreeLevelState::ground(), &DriveField::zero(), &p, 0.0, 30.0, 1e-9).unwrap();
        let d0 = crate::params::map_three_level(&p).unwrap().d0;
        let end = traj.final_state();
        assert!((end.inversion() - d0).abs() < 1e-2);
        assert!((end.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn driven_three_level_conserves_trace() {
        let p = ThreeLevelParams {
            gamma_32: 50.0,
            ..three(2.0)
        };
        let drive = DriveField::Signal(Box::new(|t| Complex64::new(libm::cos(t), 0.3)));
        let traj = integrate_three_level(ThreeLevelState::ground(), &drive, &p, 0.5, 20.0, 1e-9).unwrap();
        for (_, s) in traj.iter() {
            assert!((s.trace() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn four_level_inversion_matches_mapping() {
        let p = FourLevelParams {
            gamma_10: 1e4,
            gamma_20: 0.5,
            gamma_21: 0.5,
            gamma_30: 0.1,
            gamma_31: 0.1,
            gamma_32: 1e4,
            gamma_perp: 1.0,
            pump: 1.0,
        };
        let traj = integrate_four_level(FourLevelState::ground(), &DriveField::Constant(Complex64::new(0.0, 0.0)), &p, 0.0, 30.0, 1e-9)
            .unwrap();
        let end = traj.final_state();
        assert!((end.rho22 - 0.5).abs() < 5e-3);
        assert!((end.trace() - 1.0).abs() < 1e-12);
        let still =
            integrate_four_level(FourLevelState::ground(), &DriveField::zero(), &FourLevelParams { pump: 0.0, ..p }, 0.0, 5.0, 1e-9)
                .unwrap();
        assert_eq!(still.final_state(), FourLevelState::ground());
    }

    fn open() -> OpenTwoLevelParams {
        OpenTwoLevelParams {
            gamma_2_ext: 1.0,
            gamma_1_ext: 1.0,
            gamma_21: 0.0,
            gamma_12: 0.0,
            lambda_2: 0.8,
            lambda_1: 0.2,
            gamma_perp: 1e3,
            delta: 0.0,
        }
    }

    #[test]
    fn rate_equation_stimulated_term() {
        let p = open();
        let pop = Populations { rho22: 0.4, rho11: 0.4 };
        assert_eq!(rate_equations_step(pop, 5.0, &p), rate_equations_step(pop, 0.0, &p));
        assert_eq!(stimulated_rate(Complex64::new(0.0, 0.0), 1.0), 0.0);
    }

    #[test]
    fn rate_equations_are_the_adiabatic_limit() {
        let p = open();
        let alpha = Complex64::new(10.0, 0.0); // R = 0.2
        let drive = DriveField::Constant(alpha);
        let full = integrate_open_two_level(
            OpenTwoLevelState {
                rho22: 0.0,
                rho11: 0.0,
                sigma12: Complex64::new(0.0, 0.0),
            },
            &drive,
            &p,
            10.0,
            1e-9,
        )
        .unwrap();
        let rate = integrate_rate_equations(Populations { rho22: 0.0, rho11: 0.0 }, &drive, &p, 10.0, 1e-9).unwrap();
        for t in [2.0, 5.0, 10.0] {
            let a = full.at(t).unwrap();
            let b = rate.at(t).unwrap();
            assert!((a.rho22 - b.rho22).abs() < 1e-2 * b.rho22.abs());
            assert!((a.rho11 - b.rho11).abs() < 1e-2 * b.rho11.abs());
        }
    }

    #[test]
    fn adiabatic_series() {
        let constant = |_t: f64| [2.0, 0.0, 0.0];
        for order in 0..=2 {
            let f = adiabatic_expansion(constant, 4.0, order).unwrap();
            assert_eq!(f.eval(1.3), 0.5);
        }
        assert!(adiabatic_expansion(constant, 0.0, 0).is_err());
        assert!(adiabatic_expansion(constant, 1.0, 3).is_err());
    }
}
