//! Single-mode laser in the uniform-field limit.
//!
//! The complex system for field `F`, polarization `P` and inversion `D`,
//!
//! ```text
//! F' = κ(P − F)
//! P' = γ⊥[FD − (1 + iΔc)P]
//! D' = γ∥[r − D − Re(F P*)]
//! ```
//!
//! reduces at resonance to three real equations for `(E, P, D)`, which are the
//! Lorenz equations in `X = E`, `Y = P`, `Z = r − D`, `τ = γ⊥t`,
//! `σ = κ/γ⊥`, `b = γ∥/γ⊥`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, IntegrationError, Result};
use crate::ode::{self, OdeSystem, Options, StateVector, Stepper, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingleModeParams {
    pub kappa: f64,
    pub gamma_perp: f64,
    pub gamma_par: f64,
    /// Pump parameter.
    pub r: f64,
    /// Atom–cavity detuning (ω_c − ω₂₁)/γ⊥.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_c: f64,
}

fn invalid(name: &'static str, value: f64, constraint: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        constraint,
    }
}

impl SingleModeParams {
    pub fn new(kappa: f64, gamma_perp: f64, gamma_par: f64, r: f64) -> Result<Self> {
        let p = Self {
            kappa,
            gamma_perp,
            gamma_par,
            r,
            delta_c: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// All rates strictly positive, `r ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(|v| v > 0.0, "must be > 0")
    }

    /// Rates may vanish (decoupled matter, lossless cavity).
    pub fn validate_nonnegative(&self) -> Result<()> {
        self.validate_with(|v| v >= 0.0, "must be >= 0")
    }

    fn validate_with(&self, ok: impl Fn(f64) -> bool, constraint: &'static str) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma_perp", self.gamma_perp),
            ("gamma_par", self.gamma_par),
        ] {
            if !(ok(v) && v.is_finite()) {
                return Err(invalid(name, v, constraint));
            }
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(invalid("r", self.r, "must be >= 0"));
        }
        if !self.delta_c.is_finite() {
            return Err(invalid("delta_c", self.delta_c, "must be finite"));
        }
        Ok(())
    }

    fn require_resonance(&self) -> Result<()> {
        if self.delta_c == 0.0 {
            Ok(())
        } else {
            Err(invalid("delta_c", self.delta_c, "the real system requires delta_c = 0"))
        }
    }
}

/// Real resonant state `(E, P, D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorenzState {
    pub e: f64,
    pub p: f64,
    pub d: f64,
}

impl LorenzState {
    pub const fn new(e: f64, p: f64, d: f64) -> Self {
        Self { e, p, d }
    }

    pub fn to_xyz(self, r: f64) -> XyzState {
        XyzState {
            x: self.e,
            y: self.p,
            z: r - self.d,
        }
    }
}

impl StateVector for LorenzState {
    const DIM: usize = 3;
    const COMPONENTS: &'static [&'static str] = &["E", "P", "D"];

    fn write(&self, out: &mut [f64]) {
        out[..3].copy_from_slice(&[self.e, self.p, self.d]);
    }

    fn read(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexModeState {
    pub f: Complex64,
    pub p: Complex64,
    pub d: f64,
}

impl ComplexModeState {
    /// Embed a real resonant state.
    pub fn from_real(s: LorenzState) -> Self {
        Self {
            f: Complex64::new(s.e, 0.0),
            p: Complex64::new(s.p, 0.0),
            d: s.d,
        }
    }

    /// Field modulus `E = |F|`.
    pub fn field_amplitude(&self) -> f64 {
        self.f.norm()
    }

    /// Polarization quadrature out of phase with the field, `Im(P F*)/|F|`.
    pub fn p_quadrature(&self) -> f64 {
        (self.p * self.f.conj()).im / self.f.norm()
    }
}

impl StateVector for ComplexModeState {
    const DIM: usize = 5;
    const COMPONENTS: &'static [&'static str] = &["F_re", "F_im", "P_re", "P_im", "D"];

    fn write(&self, out: &mut [f64]) {
        out[..5].copy_from_slice(&[self.f.re, self.f.im, self.p.re, self.p.im, self.d]);
    }

    fn read(v: &[f64]) -> Self {
        Self {
            f: Complex64::new(v[0], v[1]),
            p: Complex64::new(v[2], v[3]),
            d: v[4],
        }
    }
}

/// Local (space-independent) right-hand side shared with the multimode solver.
pub(crate) fn complex_rhs(p: &SingleModeParams, f: Complex64, pol: Complex64, d: f64) -> (Complex64, Complex64, f64) {
    let df = (pol - f) * p.kappa;
    let dp = (f * d - Complex64::new(1.0, p.delta_c) * pol) * p.gamma_perp;
    let dd = p.gamma_par * (p.r - d - (f * pol.conj()).re);
    (df, dp, dd)
}

struct ComplexSystem<'a>(&'a SingleModeParams);

impl OdeSystem for ComplexSystem<'_> {
    fn dim(&self) -> usize {
        5
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let s = ComplexModeState::read(y);
        let (df, dp, dd) = complex_rhs(self.0, s.f, s.p, s.d);
        ComplexModeState { f: df, p: dp, d: dd }.write(dy);
    }
}

struct RealSystem<'a>(&'a SingleModeParams);

impl OdeSystem for RealSystem<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let p = self.0;
        let (e, pol, d) = (y[0], y[1], y[2]);
        dy[0] = p.kappa * (pol - e);
        dy[1] = p.gamma_perp * (e * d - pol);
        dy[2] = p.gamma_par * (p.r - d - e * pol);
    }
}

fn options(tol: f64) -> Result<Options> {
    if tol > 0.0 && tol.is_finite() {
        Ok(Options::with_tolerance(tol))
    } else {
        Err(invalid("tol", tol, "must be > 0"))
    }
}

pub fn integrate_complex(
    state0: ComplexModeState,
    p: &SingleModeParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<ComplexModeState>> {
    p.validate()?;
    let sol = ode::integrate(&ComplexSystem(p), 0.0, &state0.to_vec(), t_end, options(tol)?)?;
    Ok(Trajectory::new(sol))
}

/// Resonant real system; `p.delta_c` must be zero.
pub fn integrate_real(
    state0: LorenzState,
    p: &SingleModeParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<LorenzState>> {
    p.validate()?;
    p.require_resonance()?;
    let sol = ode::integrate(&RealSystem(p), 0.0, &state0.to_vec(), t_end, options(tol)?)?;
    Ok(Trajectory::new(sol))
}

/// Lorenz parameters `(σ, b, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorenzCoordinates {
    pub sigma: f64,
    pub b: f64,
    pub r: f64,
}

pub fn to_lorenz_coordinates(p: &SingleModeParams) -> LorenzCoordinates {
    LorenzCoordinates {
        sigma: p.kappa / p.gamma_perp,
        b: p.gamma_par / p.gamma_perp,
        r: p.r,
    }
}

/// Inverse of [`to_lorenz_coordinates`] for a chosen γ⊥.
pub fn from_lorenz_coordinates(c: &LorenzCoordinates, gamma_perp: f64) -> SingleModeParams {
    SingleModeParams {
        kappa: c.sigma * gamma_perp,
        gamma_perp,
        gamma_par: c.b * gamma_perp,
        r: c.r,
        delta_c: 0.0,
    }
}

/// State in Lorenz variables `X = E`, `Y = P`, `Z = r − D`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct XyzState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl XyzState {
    pub fn to_lorenz_state(self, r: f64) -> LorenzState {
        LorenzState::new(self.x, self.y, r - self.z)
    }
}

impl StateVector for XyzState {
    const DIM: usize = 3;
    const COMPONENTS: &'static [&'static str] = &["X", "Y", "Z"];

    fn write(&self, out: &mut [f64]) {
        out[..3].copy_from_slice(&[self.x, self.y, self.z]);
    }

    fn read(v: &[f64]) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }
}

/// `X' = σ(Y − X)`, `Y' = X(r − Z) − Y`, `Z' = b(XY − Z)` in τ.
///
/// Rescaling `X, Y → √b X, √b Y` gives the textbook form `Z' = XY − bZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzSystem(pub LorenzCoordinates);

impl OdeSystem for LorenzSystem {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let LorenzCoordinates { sigma, b, r } = self.0;
        dy[0] = sigma * (y[1] - y[0]);
        dy[1] = y[0] * (r - y[2]) - y[1];
        dy[2] = b * (y[0] * y[1] - y[2]);
    }
}

/// Integrate the Lorenz system in τ.
pub fn integrate_xyz(
    state0: XyzState,
    c: &LorenzCoordinates,
    tau_end: f64,
    tol: f64,
) -> Result<Trajectory<XyzState>> {
    let sol = ode::integrate(&LorenzSystem(*c), 0.0, &state0.to_vec(), tau_end, options(tol)?)?;
    Ok(Trajectory::new(sol))
}

/// Off state, then the lasing pair when `r ≥ 1` (a single point at `r = 1`).
pub fn fixed_points(p: &SingleModeParams) -> Result<Vec<LorenzState>> {
    p.validate_nonnegative()?;
    p.require_resonance()?;
    let mut out = vec![LorenzState::new(0.0, 0.0, p.r)];
    if p.r == 1.0 {
        out.push(LorenzState::new(0.0, 0.0, 1.0));
    } else if p.r > 1.0 {
        let e = libm::sqrt(p.r - 1.0);
        out.push(LorenzState::new(e, e, 1.0));
        out.push(LorenzState::new(-e, -e, 1.0));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "value", rename_all = "snake_case"))]
pub enum HopfThreshold {
    /// Bad cavity: lasing state destabilizes at this pump.
    Finite(f64),
    /// Good cavity (κ < γ⊥ + γ∥): stable for every r.
    StableForAllR,
    /// κ = γ⊥ + γ∥ exactly.
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HopfReport {
    pub threshold: HopfThreshold,
    /// κ minimizing r_HB at the given γ⊥, γ∥.
    pub kappa_min: f64,
    /// Minimum of r_HB over κ.
    pub r_hb_min: f64,
}

/// `r_HB = κ(κ + 3γ⊥ + γ∥)/[γ⊥(κ − γ⊥ − γ∥)]`, i.e. `σ(σ + b + 3)/(σ − b − 1)`. Here γ∥ may be zero.
pub fn hopf_threshold(p: &SingleModeParams) -> Result<HopfReport> {
    for (name, v, ok) in [
        ("kappa", p.kappa, p.kappa > 0.0),
        ("gamma_perp", p.gamma_perp, p.gamma_perp > 0.0),
        ("gamma_par", p.gamma_par, p.gamma_par >= 0.0),
    ] {
        if !(ok && v.is_finite()) {
            return Err(invalid(name, v, "must be positive"));
        }
    }
    // in σ = κ/γ⊥ and b = γ∥/γ⊥ so that r_HB stays dimensionless
    let sigma = p.kappa / p.gamma_perp;
    let b = p.gamma_par / p.gamma_perp;
    let s = 1.0 + b;
    let c = 3.0 + b;
    let r_hb = |k: f64| k * (k + c) / (k - s);
    let threshold = if p.kappa > p.gamma_perp + p.gamma_par {
        HopfThreshold::Finite(r_hb(sigma))
    } else if p.kappa == p.gamma_perp + p.gamma_par {
        HopfThreshold::Divergent
    } else {
        HopfThreshold::StableForAllR
    };
    let sigma_min = s + libm::sqrt(s * s + c * s);
    Ok(HopfReport {
        threshold,
        kappa_min: sigma_min * p.gamma_perp,
        r_hb_min: r_hb(sigma_min),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    /// Sorted by decreasing real part.
    pub eigenvalues: [Complex64; 3],
    pub verdict: Verdict,
}

/// Scaled distance from stationarity: each equation divided by its rate.
pub fn fixed_point_residual(p: &SingleModeParams, s: &LorenzState) -> f64 {
    let r1 = (s.p - s.e).abs();
    let r2 = (s.e * s.d - s.p).abs();
    let r3 = (p.r - s.d - s.e * s.p).abs();
    r1.max(r2).max(r3) / p.r.max(1.0)
}

/// Characteristic polynomial `λ³ + c2λ² + c1λ + c0` of the real system's Jacobian.
pub fn characteristic_polynomial(p: &SingleModeParams, s: &LorenzState) -> [f64; 3] {
    let (k, gp, gl) = (p.kappa, p.gamma_perp, p.gamma_par);
    let c2 = k + gp + gl;
    let c1 = k * gp * (1.0 - s.d) + k * gl + gp * gl * (1.0 + s.e * s.e);
    let c0 = k * gp * gl * (1.0 + s.e * s.e + s.e * s.p - s.d);
    [c2, c1, c0]
}

/// Eigenvalues of the Jacobian at a fixed point, with a stability verdict
/// (margin `1e-9·γ⊥` on the leading real part).
pub fn jacobian_stability(p: &SingleModeParams, point: &LorenzState) -> Result<StabilityReport> {
    p.validate_nonnegative()?;
    p.require_resonance()?;
    let residual = fixed_point_residual(p, point);
    if !(residual < 1e-10) {
        return Err(Error::NotAFixedPoint { residual });
    }
    let [c2, c1, c0] = characteristic_polynomial(p, point);
    let eigenvalues = cubic_roots(c2, c1, c0);
    let lead = eigenvalues[0].re;
    let margin = 1e-9 * p.gamma_perp;
    let verdict = if lead > margin {
        Verdict::Unstable
    } else if lead < -margin {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    Ok(StabilityReport { eigenvalues, verdict })
}

/// Roots of the monic cubic `λ³ + a λ² + b λ + c`, sorted by decreasing real part.
pub fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let poly = |x: Complex64| ((x + a) * x + b) * x + c;
    let dpoly = |x: Complex64| (x * 3.0 + 2.0 * a) * x + b;
    let polish = |mut x: Complex64| {
        for _ in 0..4 {
            let d = dpoly(x);
            if d.norm() == 0.0 {
                break;
            }
            let step = poly(x) / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            x -= step;
        }
        x
    };

    // depressed cubic t³ + pt + q with λ = t − a/3
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let t = if disc >= 0.0 {
        let sq = libm::sqrt(disc);
        // pick the larger-magnitude branch to avoid cancellation
        let u = libm::cbrt(-q / 2.0 - libm::copysign(sq, q));
        if u == 0.0 {
            0.0
        } else {
            u - p / (3.0 * u)
        }
    } else {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        m * libm::cos(libm::acos(arg) / 3.0)
    };
    let l1 = polish(Complex64::new(t - shift, 0.0)).re;

    // deflate: λ² + b1 λ + b0
    let b1 = a + l1;
    let b0 = b + l1 * b1;
    let qd = b1 * b1 - 4.0 * b0;
    let (l2, l3) = if qd >= 0.0 {
        let s = -0.5 * (b1 + libm::copysign(libm::sqrt(qd), b1));
        let other = if s != 0.0 { b0 / s } else { 0.0 };
        (Complex64::new(s, 0.0), Complex64::new(other, 0.0))
    } else {
        let im = 0.5 * libm::sqrt(-qd);
        (Complex64::new(-0.5 * b1, im), Complex64::new(-0.5 * b1, -im))
    };
    let (l2, l3) = if qd >= 0.0 {
        (polish(l2), polish(l3))
    } else {
        let l2 = polish(l2);
        (l2, l2.conj())
    };
    let mut roots = [Complex64::new(l1, 0.0), l2, l3];
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    roots
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LyapunovConfig {
    /// Discarded initial interval, in τ = γ⊥t.
    pub t_transient: f64,
    /// Averaging interval after the transient, in τ.
    pub t_total: f64,
    /// Tangent renormalization interval, in τ.
    pub renormalize_every: f64,
    pub tol: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            t_transient: 1e3,
            t_total: 1e4,
            renormalize_every: 1.0,
            tol: 1e-9,
        }
    }
}

/// Real system in τ together with its tangent flow.
struct Tangent(LorenzCoordinates);

impl OdeSystem for Tangent {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let LorenzCoordinates { sigma, b, r } = self.0;
        let (e, p, d) = (y[0], y[1], y[2]);
        let (ve, vp, vd) = (y[3], y[4], y[5]);
        dy[0] = sigma * (p - e);
        dy[1] = e * d - p;
        dy[2] = b * (r - d - e * p);
        dy[3] = sigma * (vp - ve);
        dy[4] = d * ve - vp + e * vd;
        dy[5] = -b * (p * ve + e * vp + vd);
    }
}

/// Largest Lyapunov exponent (per unit τ) by tangent-vector growth with
/// periodic renormalization.
pub fn lyapunov_max(
    p: &SingleModeParams,
    state0: LorenzState,
    tangent0: [f64; 3],
    cfg: &LyapunovConfig,
) -> Result<f64> {
    p.validate()?;
    p.require_resonance()?;
    let norm0 = libm::sqrt(tangent0.iter().map(|v| v * v).sum::<f64>());
    if !(norm0 > 0.0 && norm0.is_finite()) {
        return Err(invalid("tangent0", norm0, "must be a finite nonzero vector"));
    }
    for (name, v) in [
        ("t_total", cfg.t_total),
        ("renormalize_every", cfg.renormalize_every),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, v, "must be > 0"));
        }
    }
    if !(cfg.t_transient >= 0.0) {
        return Err(invalid("t_transient", cfg.t_transient, "must be >= 0"));
    }
    let sys = Tangent(to_lorenz_coordinates(p));
    let bound = 1e6 * (1.0 + p.r);
    let diverged = |t: f64| Error::Divergent { t: t / p.gamma_perp };
    let lift = |e: IntegrationError, t: f64| match e {
        IntegrationError::NonFinite { .. } => diverged(t),
        other => Error::Integration(other),
    };

    let mut y = [state0.e, state0.p, state0.d, 0.0, 0.0, 0.0];
    for i in 0..3 {
        y[3 + i] = tangent0[i] / norm0;
    }
    let mut stepper = Stepper::new(&sys, 0.0, &y, options(cfg.tol)?);
    let reset = |stepper: &mut Stepper<'_, Tangent>| {
        let mut y = [0.0; 6];
        y.copy_from_slice(stepper.state());
        for i in 0..3 {
            y[3 + i] = tangent0[i] / norm0;
        }
        stepper.reset_state(&y);
    };
    // the tangent is reset each interval so it cannot overflow before averaging starts
    let chunks = libm::ceil(cfg.t_transient / cfg.renormalize_every) as usize;
    for k in 1..=chunks {
        let target = cfg.t_transient * k as f64 / chunks as f64;
        stepper.advance_to(target, |_| {}).map_err(|e| lift(e, target))?;
        reset(&mut stepper);
    }

    let base = |s: &[f64]| libm::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);

    let n = libm::ceil(cfg.t_total / cfg.renormalize_every) as usize;
    let dt = cfg.t_total / n as f64;
    let mut log_sum = 0.0;
    for k in 1..=n {
        let target = cfg.t_transient + k as f64 * dt;
        stepper.advance_to(target, |_| {}).map_err(|e| lift(e, target))?;
        let s = stepper.state();
        if !(base(s) < bound) {
            return Err(diverged(target));
        }
        let growth = libm::sqrt(s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
        if !(growth > 0.0 && growth.is_finite()) {
            return Err(diverged(target));
        }
        log_sum += libm::log(growth);
        let mut y = [0.0; 6];
        y.copy_from_slice(s);
        for v in &mut y[3..] {
            *v /= growth;
        }
        stepper.reset_state(&y);
    }
    Ok(log_sum / cfg.t_total)
}

/// Ratio of three-level pump rates at the Hopf point and at threshold,
/// `[(G + r_HB)(G − r_on)] / [(G − r_HB)(G + r_on)]`.
pub fn three_level_instability_ratio(gain: f64, r_on: f64, r_hb: f64) -> Result<f64> {
    for (name, v) in [("gain", gain), ("r_on", r_on), ("r_hb", r_hb)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid(name, v, "must be finite and >= 0"));
        }
    }
    if gain <= r_on.max(r_hb) {
        return Err(Error::InstabilityUnreachable {
            gain,
            r_hb: r_on.max(r_hb),
        });
    }
    Ok((gain + r_hb) * (gain - r_on) / ((gain - r_hb) * (gain + r_on)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kappa: f64, gamma_par: f64, r: f64) -> SingleModeParams {
        SingleModeParams::new(kappa, 1.0, gamma_par, r).unwrap()
    }

    #[test]
    fn lasing_and_off_states_are_stationary() {
        let p = params(2.0, 0.5, 3.0);
        let e = libm::sqrt(2.0);
        let s0 = ComplexModeState::from_real(LorenzState::new(e, e, 1.0));
        let tol = 1e-10;
        let end = integrate_complex(s0, &p, 20.0, tol).unwrap().final_state();
        assert!((end.f - s0.f).norm() < 10.0 * tol && (end.d - 1.0).abs() < 10.0 * tol);

        let off = ComplexModeState {
            f: Complex64::new(0.0, 0.0),
            p: Complex64::new(0.0, 0.0),
            d: 0.2,
        };
        let end = integrate_complex(off, &p, 80.0, 1e-10).unwrap().final_state();
        assert_eq!(end.f, Complex64::new(0.0, 0.0));
        assert!((end.d - 3.0).abs() < 1e-8);
    }

    #[test]
    fn real_system_embeds_and_has_parity() {
        let p = params(3.0, 0.7, 5.0);
        let s0 = LorenzState::new(0.3, -0.1, 2.0);
        let real = integrate_real(s0, &p, 5.0, 1e-11).unwrap().final_state();
        let cplx = integrate_complex(ComplexModeState::from_real(s0), &p, 5.0, 1e-11).unwrap().final_state();
        assert!((real.e - cplx.f.re).abs() < 1e-9 && cplx.f.im == 0.0);
        let mirrored = integrate_real(LorenzState::new(-0.3, 0.1, 2.0), &p, 5.0, 1e-11).unwrap().final_state();
        assert!((mirrored.e + real.e).abs() < 1e-12 && (mirrored.d - real.d).abs() < 1e-12);
    }

    #[test]
    fn lorenz_map() {
        let c = to_lorenz_coordinates(&params(3.0, 1.0, 4.0));
        assert_eq!((c.sigma, c.b), (3.0, 1.0));
        let p = from_lorenz_coordinates(&LorenzCoordinates { sigma: 10.0, b: 8.0 / 3.0, r: 28.0 }, 1.0);
        assert_eq!((p.kappa, p.gamma_par, p.r), (10.0, 8.0 / 3.0, 28.0));
        let lasing = fixed_points(&params(2.0, 1.0, 5.0)).unwrap()[1];
        assert_eq!(lasing.to_xyz(5.0).z, 4.0);
        let s = LorenzState::new(0.4, -2.0, 7.5);
        assert_eq!(s.to_xyz(3.0).to_lorenz_state(3.0), s);
    }

    #[test]
    fn fixed_point_sets() {
        assert_eq!(fixed_points(&params(1.0, 1.0, 0.5)).unwrap().len(), 1);
        let at_one = fixed_points(&params(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(at_one, [LorenzState::new(0.0, 0.0, 1.0), LorenzState::new(0.0, 0.0, 1.0)]);
        let five = fixed_points(&params(1.0, 1.0, 5.0)).unwrap();
        assert_eq!((five[1].e, five[2].e), (2.0, -2.0));
    }

    #[test]
    fn hopf_examples() {
        let p = SingleModeParams {
            kappa: 3.0,
            gamma_perp: 1.0,
            gamma_par: 0.0,
            r: 1.0,
            delta_c: 0.0,
        };
        let h = hopf_threshold(&p).unwrap();
        assert_eq!(h.threshold, HopfThreshold::Finite(9.0));
        assert!((h.kappa_min - 3.0).abs() < 1e-15 && (h.r_hb_min - 9.0).abs() < 1e-13);

        let good = hopf_threshold(&params(1.0, 0.5, 20.0)).unwrap();
        assert_eq!(good.threshold, HopfThreshold::StableForAllR);
        let edge = hopf_threshold(&params(1.5, 0.5, 20.0)).unwrap();
        assert_eq!(edge.threshold, HopfThreshold::Divergent);

        let classic = hopf_threshold(&params(10.0, 8.0 / 3.0, 28.0)).unwrap();
        match classic.threshold {
            HopfThreshold::Finite(r) => assert!((r - 470.0 / 19.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }

        // only rate ratios matter
        let scaled = SingleModeParams::new(25.0, 2.5, 20.0 / 3.0, 28.0).unwrap();
        let h = hopf_threshold(&scaled).unwrap();
        match h.threshold {
            HopfThreshold::Finite(r) => assert!((r - 470.0 / 19.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!((h.kappa_min - 2.5 * classic.kappa_min).abs() < 1e-12);
        let e = libm::sqrt(470.0 / 19.0 - 1.0);
        let at = SingleModeParams { r: 470.0 / 19.0, ..scaled };
        let rep = jacobian_stability(&at, &LorenzState::new(e, e, 1.0)).unwrap();
        assert!(rep.eigenvalues[0].re.abs() < 1e-6 * at.gamma_perp);
    }

    #[test]
    fn off_state_pitchfork() {
        let below = jacobian_stability(&params(2.0, 0.5, 0.5), &LorenzState::new(0.0, 0.0, 0.5)).unwrap();
        assert_eq!(below.verdict, Verdict::Stable);
        assert!(below.eigenvalues.iter().all(|l| l.re < 0.0));
        let above = jacobian_stability(&params(2.0, 0.5, 2.0), &LorenzState::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(above.verdict, Verdict::Unstable);
        assert_eq!(above.eigenvalues.iter().filter(|l| l.re > 0.0).count(), 1);
    }

    #[test]
    fn hopf_point_is_marginal() {
        let r_hb = 470.0 / 19.0;
        let p = params(10.0, 8.0 / 3.0, r_hb);
        let e = libm::sqrt(r_hb - 1.0);
        let rep = jacobian_stability(&p, &LorenzState::new(e, e, 1.0)).unwrap();
        assert!(rep.eigenvalues[0].re.abs() < 1e-6);
        assert!(rep.eigenvalues[0].im.abs() > 1.0);
        assert!(jacobian_stability(&p, &LorenzState::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn cubic_roots_known() {
        // (λ+1)(λ+2)(λ+3)
        let r = cubic_roots(6.0, 11.0, 6.0);
        for (got, want) in r.iter().zip([-1.0, -2.0, -3.0]) {
            assert!((got.re - want).abs() < 1e-13 && got.im.abs() < 1e-13);
        }
        // (λ−2)(λ²+1)
        let r = cubic_roots(-2.0, 1.0, -2.0);
        assert!((r[0].re - 2.0).abs() < 1e-14);
        assert!(r[1].re.abs() < 1e-14 && (r[1].im.abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lyapunov_sign_in_simple_regimes() {
        let cfg = LyapunovConfig {
            t_transient: 50.0,
            t_total: 200.0,
            ..LyapunovConfig::default()
        };
        let off = lyapunov_max(&params(2.0, 0.5, 0.5), LorenzState::new(0.1, 0.1, 0.5), [1.0, 0.0, 0.0], &cfg).unwrap();
        assert!(off < 0.0);
        let lasing =
            lyapunov_max(&params(0.5, 0.5, 2.0), LorenzState::new(0.5, 0.5, 1.5), [0.0, 1.0, 0.0], &cfg).unwrap();
        assert!(lasing <= 1e-2);
    }

    #[test]
    fn instability_ratio() {
        let v = three_level_instability_ratio(100.0, 1.0, 9.0).unwrap();
        assert!((v - 10791.0 / 9191.0).abs() < 1e-15);
        let big = three_level_instability_ratio(1e4, 1.0, 9.0).unwrap() - 1.0;
        assert!(big > 15.9e-4 && big < 16.1e-4);
        assert!(matches!(
            three_level_instability_ratio(9.0, 1.0, 9.0),
            Err(Error::InstabilityUnreachable { .. })
        ));
    }
}
