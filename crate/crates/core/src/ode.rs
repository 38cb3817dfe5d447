//! Explicit Dormand–Prince 5(4) integrator with PI step control and
//! continuous (dense) output.
//!
//! Systems are described by [`OdeSystem`] over flat `f64` slices; typed state
//! structs implement [`StateVector`] to get a [`Trajectory`] view over a raw
//! [`Solution`].

use alloc::vec;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::IntegrationError;

/// Right-hand side of `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

impl<T: OdeSystem + ?Sized> OdeSystem for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (**self).rhs(t, y, dydt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    /// Budget of attempted steps (accepted and rejected).
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 20_000_000,
        }
    }
}

impl Options {
    /// Same relative and absolute tolerance.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants (Hairer & Wanner defaults).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.1;
const FAC_MAX: f64 = 5.0;

fn scale(opts: &Options, a: f64, b: f64) -> f64 {
    opts.atol + opts.rtol * a.abs().max(b.abs())
}

/// Single-trajectory stepper. Owns its working buffers; one instance per run.
pub struct Stepper<'a, S: OdeSystem + ?Sized> {
    sys: &'a S,
    opts: Options,
    t: f64,
    y: Vec<f64>,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    h: f64,
    fac_old: f64,
    last_rejected: bool,
    attempts: usize,
    accepted: usize,
    dense: Vec<f64>,
    last_t: f64,
    last_h: f64,
}

impl<'a, S: OdeSystem + ?Sized> Stepper<'a, S> {
    pub fn new(sys: &'a S, t0: f64, y0: &[f64], opts: Options) -> Self {
        let n = sys.dim();
        assert_eq!(y0.len(), n, "initial state has wrong dimension");
        let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; n]);
        sys.rhs(t0, y0, &mut k[0]);
        let mut stepper = Self {
            sys,
            opts,
            t: t0,
            y: y0.to_vec(),
            k,
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            h: 0.0,
            fac_old: 1e-4,
            last_rejected: false,
            attempts: 0,
            accepted: 0,
            dense: vec![0.0; 5 * n],
            last_t: t0,
            last_h: 0.0,
        };
        stepper.h = match opts.initial_step {
            Some(h) => h.min(opts.max_step),
            None => stepper.initial_step(),
        };
        stepper
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64] {
        &self.y
    }

    /// Derivative at the current point (first stage of the next step).
    pub fn derivative(&self) -> &[f64] {
        &self.k[0]
    }

    pub fn accepted_steps(&self) -> usize {
        self.accepted
    }

    /// Overwrite the current state (e.g. renormalization) without moving in time.
    pub fn reset_state(&mut self, y: &[f64]) {
        self.y.copy_from_slice(y);
        self.sys.rhs(self.t, &self.y, &mut self.k[0]);
        self.last_rejected = false;
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len();
        if n == 0 {
            return 1.0f64.min(self.opts.max_step);
        }
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..n {
            let sk = scale(&self.opts, self.y[i], self.y[i]);
            dnf += (self.k[0][i] / sk) * (self.k[0][i] / sk);
            dny += (self.y[i] / sk) * (self.y[i] / sk);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            libm::sqrt(dny / dnf) * 0.01
        };
        h = h.min(self.opts.max_step);
        for i in 0..n {
            self.stage[i] = self.y[i] + h * self.k[0][i];
        }
        let (head, tail) = self.k.split_at_mut(1);
        self.sys.rhs(self.t + h, &self.stage, &mut tail[0]);
        let mut der2 = 0.0;
        for i in 0..n {
            let sk = scale(&self.opts, self.y[i], self.y[i]);
            let d = (tail[0][i] - head[0][i]) / sk;
            der2 += d * d;
        }
        let der2 = libm::sqrt(der2) / h;
        let der12 = der2.abs().max(libm::sqrt(dnf));
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / der12, 0.2)
        };
        (100.0 * h).min(h1).min(self.opts.max_step)
    }

    fn underflow(&self, h: f64) -> bool {
        0.1 * h.abs() <= f64::EPSILON * self.t.abs() || h <= f64::MIN_POSITIVE
    }

    fn fail_underflow(&self, h: f64) -> IntegrationError {
        IntegrationError::StepSizeUnderflow {
            t: self.t,
            h,
            last_state: self.y.clone(),
        }
    }

    /// Take one accepted step without passing `t_limit` (which must lie ahead).
    pub fn step(&mut self, t_limit: f64) -> Result<(), IntegrationError> {
        let n = self.y.len();
        loop {
            if self.attempts >= self.opts.max_steps {
                return Err(IntegrationError::TooManySteps {
                    t: self.t,
                    max_steps: self.opts.max_steps,
                    last_state: self.y.clone(),
                });
            }
            let mut h = self.h.min(self.opts.max_step);
            let lands = self.t + 1.01 * h >= t_limit;
            if lands {
                h = t_limit - self.t;
            }
            if self.underflow(h) {
                return Err(self.fail_underflow(h));
            }
            let t = self.t;
            let t_new = if lands { t_limit } else { t + h };
            self.attempts += 1;

            let sys = self.sys;
            let y = &self.y;
            let stage = &mut self.stage;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;

            for i in 0..n {
                stage[i] = y[i] + h * A21 * k1[i];
            }
            sys.rhs(t + C2 * h, stage, k2);
            for i in 0..n {
                stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            sys.rhs(t + C3 * h, stage, k3);
            for i in 0..n {
                stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            sys.rhs(t + C4 * h, stage, k4);
            for i in 0..n {
                stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            sys.rhs(t + C5 * h, stage, k5);
            for i in 0..n {
                stage[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            sys.rhs(t_new, stage, k6);
            for i in 0..n {
                self.y_new[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            sys.rhs(t_new, &self.y_new, k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sk = scale(&self.opts, y[i], self.y_new[i]);
                err += (e / sk) * (e / sk);
            }
            let err = if n == 0 { 0.0 } else { libm::sqrt(err / n as f64) };

            if !err.is_finite() {
                self.h = 0.1 * h;
                self.last_rejected = true;
                if self.underflow(self.h) {
                    return Err(self.fail_underflow(self.h));
                }
                continue;
            }

            let fac11 = libm::pow(err, EXPO1);
            if err <= 1.0 {
                let fac = (fac11 / libm::pow(self.fac_old, BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                self.fac_old = err.max(1e-4);

                for i in 0..n {
                    let ydiff = self.y_new[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    self.dense[i] = y[i];
                    self.dense[n + i] = ydiff;
                    self.dense[2 * n + i] = bspl;
                    self.dense[3 * n + i] = ydiff - h * k7[i] - bspl;
                    self.dense[4 * n + i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                core::mem::swap(k1, k7);
                core::mem::swap(&mut self.y, &mut self.y_new);
                self.last_t = t;
                self.last_h = t_new - t;
                self.t = t_new;
                self.accepted += 1;
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                self.last_rejected = false;
                self.h = h_new;
                if self.y.iter().any(|v| !v.is_finite()) {
                    return Err(IntegrationError::NonFinite {
                        t: self.t,
                        last_state: self.y_new.clone(),
                    });
                }
                return Ok(());
            }

            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
            self.last_rejected = true;
        }
    }

    /// Dense-output coefficients of the last accepted step: `(t_start, h, coeffs)`.
    pub fn last_dense(&self) -> (f64, f64, &[f64]) {
        (self.last_t, self.last_h, &self.dense)
    }

    /// Advance exactly to `t_target`, calling `observe` after every accepted step.
    pub fn advance_to(
        &mut self,
        t_target: f64,
        mut observe: impl FnMut(&Self),
    ) -> Result<(), IntegrationError> {
        while self.t < t_target {
            let remaining = t_target - self.t;
            if remaining <= 4.0 * f64::EPSILON * self.t.abs().max(t_target.abs()) {
                // Round-off leftover: snap without stepping.
                self.t = t_target;
                break;
            }
            self.step(t_target)?;
            observe(self);
        }
        Ok(())
    }
}

/// Evaluate a dense-output polynomial at `theta` in `[0, 1]` into `out`.
fn interpolate(coeffs: &[f64], theta: f64, out: &mut [f64]) {
    let n = out.len();
    let theta1 = 1.0 - theta;
    for i in 0..n {
        out[i] = coeffs[i]
            + theta
                * (coeffs[n + i]
                    + theta1
                        * (coeffs[2 * n + i]
                            + theta * (coeffs[3 * n + i] + theta1 * coeffs[4 * n + i])));
    }
}

/// Every accepted step of a run, with the continuous extension between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    dense: Vec<f64>,
}

impl Solution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.len() - 1]
    }

    /// Continuous evaluation inside the integrated span.
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        let (t0, t1) = (self.times[0], self.t_end());
        if !(t0..=t1).contains(&t) {
            return None;
        }
        if self.len() == 1 || t == t1 {
            return Some(self.final_state().to_vec());
        }
        // index of the step [times[i], times[i+1]] containing t
        let i = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Some(self.state(i).to_vec()),
            Err(i) => i - 1,
        };
        let h = self.times[i + 1] - self.times[i];
        let theta = (t - self.times[i]) / h;
        let stride = 5 * self.dim;
        let mut out = vec![0.0; self.dim];
        interpolate(&self.dense[i * stride..(i + 1) * stride], theta, &mut out);
        Some(out)
    }
}

/// Integrate from `t0` to `t_end`, recording every accepted step.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: Options,
) -> Result<Solution, IntegrationError> {
    let dim = sys.dim();
    let mut solution = Solution {
        dim,
        times: vec![t0],
        states: y0.to_vec(),
        dense: Vec::new(),
    };
    let mut stepper = Stepper::new(sys, t0, y0, opts);
    stepper.advance_to(t_end, |s| {
        let (_, _, coeffs) = s.last_dense();
        solution.times.push(s.t());
        solution.states.extend_from_slice(s.state());
        solution.dense.extend_from_slice(coeffs);
    })?;
    if solution.t_end() < t_end {
        // advance_to snapped a round-off remainder
        let last = solution.len() - 1;
        solution.times[last] = t_end;
    }
    Ok(solution)
}

/// Integrate and return the state at each requested time, landing on every
/// output time exactly rather than interpolating.
pub fn integrate_to_times<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    opts: Options,
) -> Result<Vec<Vec<f64>>, IntegrationError> {
    let mut stepper = Stepper::new(sys, t0, y0, opts);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        assert!(t >= stepper.t(), "output times must be ascending and not before t0");
        stepper.advance_to(t, |_| {})?;
        out.push(stepper.state().to_vec());
    }
    Ok(out)
}

/// A fixed-size state with named components, stored as a flat slice.
pub trait StateVector: Sized {
    const DIM: usize;
    /// Column names in storage order (used for CSV headers).
    const COMPONENTS: &'static [&'static str];
    fn write(&self, out: &mut [f64]);
    fn read(v: &[f64]) -> Self;

    fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; Self::DIM];
        self.write(&mut v);
        v
    }
}

/// Typed view of a [`Solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    solution: Solution,
    _state: PhantomData<S>,
}

impl<S: StateVector> Trajectory<S> {
    pub fn new(solution: Solution) -> Self {
        assert_eq!(solution.dim(), S::DIM);
        Self {
            solution,
            _state: PhantomData,
        }
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn len(&self) -> usize {
        self.solution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        self.solution.times()
    }

    pub fn state(&self, i: usize) -> S {
        S::read(self.solution.state(i))
    }

    pub fn final_state(&self) -> S {
        S::read(self.solution.final_state())
    }

    pub fn at(&self, t: f64) -> Option<S> {
        self.solution.at(t).map(|v| S::read(&v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, S)> + '_ {
        (0..self.len()).map(move |i| (self.solution.times()[i], self.state(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);

    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = -self.0 * y[0];
        }
    }

    struct Oscillator;

    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = y[1];
            dydt[1] = -y[0];
        }
    }

    #[test]
    fn exponential_decay_to_tolerance() {
        let sol = integrate(&Decay(2.0), 0.0, &[1.0], 5.0, Options::with_tolerance(1e-10)).unwrap();
        assert_eq!(sol.t_end(), 5.0);
        let exact = libm::exp(-10.0);
        assert!((sol.final_state()[0] - exact).abs() < 1e-10);
    }

    #[test]
    fn dense_output_tracks_solution_between_steps() {
        let sol = integrate(&Oscillator, 0.0, &[0.0, 1.0], 10.0, Options::with_tolerance(1e-10)).unwrap();
        for i in 0..200 {
            let t = 0.05 * i as f64 + 0.013;
            let y = sol.at(t).unwrap();
            assert!((y[0] - libm::sin(t)).abs() < 1e-8, "t = {t}");
            assert!((y[1] - libm::cos(t)).abs() < 1e-8, "t = {t}");
        }
        assert!(sol.at(10.5).is_none());
    }

    #[test]
    fn lands_exactly_on_output_times() {
        let times = [0.5, 1.0, 3.25];
        let ys = integrate_to_times(&Oscillator, 0.0, &[0.0, 1.0], &times, Options::with_tolerance(1e-11)).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - libm::sin(*t)).abs() < 1e-9);
        }
    }

    struct Blowup;

    impl OdeSystem for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = y[0] * y[0];
        }
    }

    #[test]
    fn finite_time_blowup_reports_last_good_state() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let err = integrate(&Blowup, 0.0, &[1.0], 2.0, Options::with_tolerance(1e-8)).unwrap_err();
        let last = err.last_state()[0];
        assert!(last.is_finite() && last > 1e3, "{err:?}");
    }
}
