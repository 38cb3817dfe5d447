//! Traveling-wave uniform-field equations on the periodic ring,
//!
//! ```text
//! ∂F/∂t + v ∂F/∂z = κ(P − F)
//! ```
//!
//! coupled pointwise to the single-mode matter equations. Advection is exact
//! in mode space: the integrated field variable is `G_m = e^{i v q_m t} F_m`,
//! so only the local coupling is stepped.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::lorenz::{complex_rhs, SingleModeParams};
use crate::ode::{OdeSystem, Options, Stepper};
use crate::params::CavityParams;

pub const DEFAULT_GRID: usize = 64;

fn check_grid(n: usize) -> Result<()> {
    if fft::is_power_of_two(n) && n >= 2 {
        Ok(())
    } else {
        Err(Error::Grid {
            n,
            suggested: n.max(2).next_power_of_two(),
        })
    }
}

/// Complex field sampled at `n_z` equispaced points `z_j = j L_m / n_z`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldOnRing {
    samples: Vec<Complex64>,
    cavity: CavityParams,
}

impl FieldOnRing {
    pub fn new(samples: Vec<Complex64>, cavity: CavityParams) -> Result<Self> {
        check_grid(samples.len())?;
        cavity.validate()?;
        Ok(Self { samples, cavity })
    }

    pub fn uniform(value: Complex64, n: usize, cavity: CavityParams) -> Result<Self> {
        Self::new(vec![value; n], cavity)
    }

    pub fn from_fn(n: usize, cavity: CavityParams, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid(n)?;
        let h = cavity.medium_length / n as f64;
        Self::new((0..n).map(|j| f(j as f64 * h)).collect(), cavity)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn cavity(&self) -> &CavityParams {
        &self.cavity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = self.cavity.medium_length / self.len() as f64;
        (0..self.len()).map(|j| j as f64 * h).collect()
    }

    /// Advection speed `v = c L_m / L_c`.
    pub fn velocity(&self) -> f64 {
        self.cavity.advection_velocity()
    }

    /// Spatial L² norm, `(∫|F|² dz)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.cavity.medium_length / self.len() as f64;
        libm::sqrt(h * self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>())
    }

    /// Trigonometric interpolant at any `z` (periodic with period `L_m`).
    pub fn eval(&self, z: f64) -> Complex64 {
        mode_decompose(self).eval(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeCoefficient {
    pub m: i64,
    pub coefficient: Complex64,
    /// Wavenumber on the medium, 2πm/L_m.
    pub q: f64,
    /// Physical wavenumber of the empty-cavity mode, 2πm/L_c.
    pub k: f64,
    /// Angular frequency v·q_m = 2πmc/L_c.
    pub omega: f64,
}

/// Fourier coefficients in increasing `m`, `m ∈ [−n/2, n/2)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeSpectrum {
    pub modes: Vec<ModeCoefficient>,
    pub cavity: CavityParams,
}

impl ModeSpectrum {
    pub fn coefficient(&self, m: i64) -> Option<Complex64> {
        self.modes.iter().find(|c| c.m == m).map(|c| c.coefficient)
    }

    pub fn eval(&self, z: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|c| c.coefficient * Complex64::from_polar(1.0, c.q * z))
            .sum()
    }

    /// Back to grid samples.
    pub fn reconstruct(&self) -> Result<FieldOnRing> {
        let n = self.modes.len();
        check_grid(n)?;
        let mut data = vec![Complex64::new(0.0, 0.0); n];
        for c in &self.modes {
            let j = c.m.rem_euclid(n as i64) as usize;
            data[j] = c.coefficient;
        }
        fft::inverse(&mut data);
        FieldOnRing::new(data, self.cavity)
    }
}

pub fn mode_decompose(field: &FieldOnRing) -> ModeSpectrum {
    let n = field.len();
    let cav = field.cavity;
    let mut data = field.samples.clone();
    fft::forward(&mut data);
    let scale = 1.0 / n as f64;
    let mut modes: Vec<ModeCoefficient> = data
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let m = fft::mode_index(j, n);
            let q = 2.0 * PI * m as f64 / cav.medium_length;
            ModeCoefficient {
                m,
                coefficient: x * scale,
                q,
                k: 2.0 * PI * m as f64 / cav.cavity_length,
                omega: cav.advection_velocity() * q,
            }
        })
        .collect();
    modes.sort_by_key(|c| c.m);
    ModeSpectrum { modes, cavity: cav }
}

/// `(m, ω_m = 2πmc/L_c)` for each `m` in the range.
pub fn empty_cavity_frequencies(cav: &CavityParams, m_range: RangeInclusive<i64>) -> Vec<(i64, f64)> {
    m_range.map(|m| (m, m as f64 * cav.free_spectral_range())).collect()
}

/// Snapshot of all fields on the grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RingFrame {
    pub t: f64,
    pub field: Vec<Complex64>,
    pub polarization: Vec<Complex64>,
    pub inversion: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TravelingWaveRun {
    pub cavity: CavityParams,
    pub frames: Vec<RingFrame>,
}

impl TravelingWaveRun {
    pub fn field_at(&self, frame: usize) -> FieldOnRing {
        FieldOnRing {
            samples: self.frames[frame].field.clone(),
            cavity: self.cavity,
        }
    }
}

struct TravelingWave {
    n: usize,
    params: SingleModeParams,
    /// v·q_m in FFT bin order.
    omega: Vec<f64>,
}

impl TravelingWave {
    /// Physical-space field from the rotating mode variables at time `t`.
    fn field(&self, t: f64, y: &[f64], out: &mut [Complex64]) {
        for j in 0..self.n {
            let g = Complex64::new(y[2 * j], y[2 * j + 1]);
            out[j] = g * Complex64::from_polar(1.0, -self.omega[j] * t);
        }
        fft::inverse(out);
    }

    fn unpack(&self, t: f64, y: &[f64]) -> RingFrame {
        let n = self.n;
        let mut field = vec![Complex64::new(0.0, 0.0); n];
        self.field(t, y, &mut field);
        let polarization = (0..n)
            .map(|j| Complex64::new(y[2 * n + 2 * j], y[2 * n + 2 * j + 1]))
            .collect();
        RingFrame {
            t,
            field,
            polarization,
            inversion: y[4 * n..5 * n].to_vec(),
        }
    }
}

impl OdeSystem for TravelingWave {
    fn dim(&self) -> usize {
        5 * self.n
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let mut field = vec![Complex64::new(0.0, 0.0); n];
        self.field(t, y, &mut field);
        let mut drive = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let pol = Complex64::new(y[2 * n + 2 * j], y[2 * n + 2 * j + 1]);
            let (df, dp, dd) = complex_rhs(&self.params, field[j], pol, y[4 * n + j]);
            drive[j] = df;
            dy[2 * n + 2 * j] = dp.re;
            dy[2 * n + 2 * j + 1] = dp.im;
            dy[4 * n + j] = dd;
        }
        fft::forward(&mut drive);
        let scale = 1.0 / n as f64;
        for j in 0..n {
            let g = drive[j] * scale * Complex64::from_polar(1.0, self.omega[j] * t);
            dy[2 * j] = g.re;
            dy[2 * j + 1] = g.im;
        }
    }
}

/// Integrate the traveling-wave equations, returning `n_frames` equispaced
/// snapshots on `[0, t_end]` (both ends included).
///
/// Rates in `p` may be zero; with `κ = 0` the field is transported freely.
pub fn integrate_traveling_wave(
    f0: &FieldOnRing,
    p0: &[Complex64],
    d0: &[f64],
    p: &SingleModeParams,
    t_end: f64,
    tol: f64,
    n_frames: usize,
) -> Result<TravelingWaveRun> {
    p.validate_nonnegative()?;
    let n = f0.len();
    check_grid(n)?;
    for len in [p0.len(), d0.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            constraint: "must be > 0",
        });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            constraint: "must be finite and >= 0",
        });
    }
    if n_frames < 2 {
        return Err(Error::InvalidParameter {
            name: "n_frames",
            value: n_frames as f64,
            constraint: "must be >= 2",
        });
    }
    let cav = f0.cavity;
    let v = cav.advection_velocity();
    let omega = (0..n)
        .map(|j| v * 2.0 * PI * fft::mode_index(j, n) as f64 / cav.medium_length)
        .collect();
    let sys = TravelingWave {
        n,
        params: *p,
        omega,
    };

    let mut y = vec![0.0; 5 * n];
    let mut modes = f0.samples.clone();
    fft::forward(&mut modes);
    for (j, g) in modes.iter().enumerate() {
        y[2 * j] = g.re / n as f64;
        y[2 * j + 1] = g.im / n as f64;
    }
    for j in 0..n {
        y[2 * n + 2 * j] = p0[j].re;
        y[2 * n + 2 * j + 1] = p0[j].im;
        y[4 * n + j] = d0[j];
    }

    let mut frames = Vec::with_capacity(n_frames);
    frames.push(RingFrame {
        t: 0.0,
        field: f0.samples.clone(),
        polarization: p0.to_vec(),
        inversion: d0.to_vec(),
    });
    let mut stepper = Stepper::new(&sys, 0.0, &y, Options::with_tolerance(tol));
    for k in 1..n_frames {
        let t = t_end * k as f64 / (n_frames - 1) as f64;
        stepper.advance_to(t, |_| {})?;
        frames.push(sys.unpack(t, stepper.state()));
    }
    Ok(TravelingWaveRun { cavity: cav, frames })
}
