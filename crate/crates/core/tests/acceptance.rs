//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use mbloch_core::amplifier::{propagate_exact, solve_implicit, weak_field};
use mbloch_core::bloch::{
    adiabatic_expansion, integrate_four_level, integrate_linear_response, integrate_three_level, DriveField,
    FourLevelState, Sinusoid, ThreeLevelState,
};
use mbloch_core::lorenz::{
    cubic_roots, hopf_threshold, integrate_complex, lyapunov_max, ComplexModeState, HopfThreshold, LorenzState,
    LyapunovConfig, SingleModeParams,
};
use mbloch_core::multimode::{integrate_traveling_wave, FieldOnRing};
use mbloch_core::params::{
    map_four_level_with_ratio, map_three_level_with_ratio, CavityParams, FourLevelParams, MediumParams,
    ThreeLevelParams,
};
use mbloch_core::ring::{exit_intensity, intensity_profile, mode_family};
use mbloch_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn amplifier_two_methods() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d0 in linspace(-0.9, 0.9, 5) {
        for dr in linspace(0.0, 2.0, 5) {
            let m = MediumParams::new(1.0, 1.0, 1.0, d0, dr).unwrap();
            for e in linspace(-6.0, 2.0, 5) {
                let i0 = 10f64.powf(e) * m.saturation_intensity();
                let a0 = libm::sqrt(i0);
                let run = propagate_exact(Complex64::new(a0, 0.0), &m, 1.0, 5.0, 11).unwrap();
                for (&z, &i) in run.z.iter().zip(&run.amp2) {
                    let a = solve_implicit(a0, &m, 1.0, z).unwrap();
                    worst = worst.max(rel(i, a * a));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-8 && secs < 10.0,
        format!("max relative difference {worst:.2e}, runtime {secs:.2} s"),
    )
}

fn asymptotes() -> Outcome {
    let m = MediumParams::new(1.0, 1.0, 1.0, 0.5, 0.0).unwrap();
    let sat = m.saturation_intensity();
    let a = m.small_signal_gain(1.0);

    let i0 = 1e-6 * sat;
    let alpha0 = Complex64::new(libm::sqrt(i0), 0.0);
    let weak = propagate_exact(alpha0, &m, 1.0, 10.0, 1001).unwrap();
    let mut weak_dev: f64 = 0.0;
    let mut weak_n = 0;
    for (&z, &i) in weak.z.iter().zip(&weak.amp2) {
        if i >= 1e-2 * sat {
            break;
        }
        let reference = i0 * libm::exp(a * z);
        let library = weak_field(alpha0, &m, 1.0, z).value.norm_sqr();
        weak_dev = weak_dev.max(rel(i, reference)).max(rel(i, library));
        weak_n += 1;
    }

    let i0 = 2e3 * sat;
    let strong = propagate_exact(Complex64::new(libm::sqrt(i0), 0.0), &m, 1.0, 4000.0, 4001).unwrap();
    let expected = sat * a;
    let h = strong.z[1] - strong.z[0];
    let mut slope_dev: f64 = 0.0;
    for k in 1..strong.z.len() - 1 {
        let slope = (strong.amp2[k + 1] - strong.amp2[k - 1]) / (2.0 * h);
        slope_dev = slope_dev.max(rel(slope, expected));
    }
    outcome(
        weak_dev < 1e-2 && weak_n > 100 && slope_dev < 1e-3,
        format!("weak-field deviation {weak_dev:.3e} over {weak_n} points, strong slope deviation {slope_dev:.3e}"),
    )
}

fn threshold_line() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut zero_at_threshold = true;
    for _ in 0..100 {
        let gp = rng.gen_range(0.1..10.0);
        let gl = rng.gen_range(0.1..2.0 * gp);
        let dr: f64 = rng.gen_range(0.0..3.0);
        let r2 = rng.gen_range(0.05..0.99);
        let m = MediumParams::new(gp, gl, 1.0, 0.5, dr * gp).unwrap();
        let cav = CavityParams::from_intensity_reflectivity(r2, 1.0, 2.0, 1.0).unwrap();
        let r_on = 1.0 + dr * dr;
        let at = exit_intensity(r_on, dr, &m, &cav);
        zero_at_threshold &= at.value == 0.0;
        let slope = gl * gp / 4.0 * (libm::log(r2).abs() / (1.0 - r2));
        for x in [0.25, 1.0, 7.5] {
            let v = exit_intensity(r_on + x, dr, &m, &cav).value;
            worst = worst.max(rel(v, slope * x));
        }
    }
    outcome(
        zero_at_threshold && worst < 1e-12,
        format!("zero at threshold: {zero_at_threshold}, max relative slope error {worst:.2e}"),
    )
}

fn uniform_field_flattening() -> Outcome {
    let r = 1.5;
    let mut ratio_err: f64 = 0.0;
    let mut shape_err: f64 = 0.0;
    let mut endpoint_err = f64::NAN;
    for r2 in [0.2, 0.5, 0.9, 1.0 - 1e-6] {
        let cav = CavityParams::from_intensity_reflectivity(r2, 1.0, 1.0, 1.0).unwrap();
        // medium whose small-signal gain gives r·|ln R²| per pass
        let m = MediumParams::new(1.0, 1.0, r * cav.loss(), 0.5, 0.0).unwrap();
        let prof = intensity_profile(r, 0.0, &m, &cav, 51).unwrap();
        ratio_err = ratio_err.max(rel(prof.uniformity_ratio(), r2));

        let entry = prof.amp2[0];
        let run = propagate_exact(Complex64::new(libm::sqrt(entry), 0.0), &m, 1.0, 1.0, 51).unwrap();
        for (a, b) in run.amp2.iter().zip(&prof.amp2) {
            shape_err = shape_err.max(rel(*a, *b));
        }
        if r2 > 0.99 {
            let ufl = m.gamma_par * m.gamma_perp / 4.0 * (r - 1.0);
            endpoint_err = rel(prof.amp2[50], ufl);
        }
    }
    outcome(
        ratio_err < 1e-12 && shape_err < 1e-9 && endpoint_err < 1e-5,
        format!(
            "ratio error {ratio_err:.2e}, profile vs propagation {shape_err:.2e}, R²→1 endpoint error {endpoint_err:.2e}"
        ),
    )
}

fn pulling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut convex = true;
    let mut weight_err: f64 = 0.0;
    for _ in 0..100 {
        let cav = CavityParams::new(rng.gen_range(0.3..0.999), 1.0, rng.gen_range(1.0..5.0), 1.0).unwrap();
        let gp = rng.gen_range(0.05..20.0);
        let m = MediumParams::new(gp, gp, 1.0, 0.5, 0.0).unwrap();
        let w21 = rng.gen_range(-10.0..10.0);
        let gap = rng.gen_range(-0.95..0.95) * cav.free_spectral_range();
        let wc = w21 + gap;
        let w0 = mode_family(&m, &cav, wc, w21, 0..=0).unwrap()[0].omega_n;
        convex &= w0 >= wc.min(w21) && w0 <= wc.max(w21);
        let weight = gp / (cav.kappa() + gp);
        let expected = weight * wc + (1.0 - weight) * w21;
        weight_err = weight_err.max((w0 - expected).abs() / gap.abs());
    }

    let cav = CavityParams::new(0.9, 1.0, 2.0, 1.0).unwrap();
    let kappa = cav.kappa();
    let (wc, w21) = (0.3, -0.2);
    let gap: f64 = wc - w21;
    let good = MediumParams::new(1e6 * kappa, 1e6 * kappa, 1.0, 0.5, 0.0).unwrap();
    let bad = MediumParams::new(1e-6 * kappa, 1e-6 * kappa, 1.0, 0.5, 0.0).unwrap();
    let good_err = (mode_family(&good, &cav, wc, w21, 0..=0).unwrap()[0].omega_n - wc).abs() / gap;
    let bad_err = (mode_family(&bad, &cav, wc, w21, 0..=0).unwrap()[0].omega_n - w21).abs() / gap;
    outcome(
        convex && weight_err < 1e-12 && good_err < 1e-5 && bad_err < 1e-5,
        format!(
            "convex: {convex}, weight error {weight_err:.2e}, good-cavity offset {good_err:.2e}, bad-cavity offset {bad_err:.2e} (of the gap)"
        ),
    )
}

/// Eigenvalues from a finite-difference Jacobian of the resonant real system.
fn numerical_eigenvalues(p: &SingleModeParams, x: [f64; 3]) -> [Complex64; 3] {
    let f = |y: [f64; 3]| {
        [
            p.kappa * (y[1] - y[0]),
            p.gamma_perp * (y[0] * y[2] - y[1]),
            p.gamma_par * (p.r - y[2] - y[0] * y[1]),
        ]
    };
    let mut j = [[0.0; 3]; 3];
    for c in 0..3 {
        let h = 1e-6 * x[c].abs().max(1.0);
        let (mut up, mut down) = (x, x);
        up[c] += h;
        down[c] -= h;
        let (fu, fd) = (f(up), f(down));
        for row in 0..3 {
            j[row][c] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    let trace = j[0][0] + j[1][1] + j[2][2];
    let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2] - j[0][2] * j[2][0] + j[1][1] * j[2][2]
        - j[1][2] * j[2][1];
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    cubic_roots(-trace, minors, -det)
}

fn hopf() -> Outcome {
    let exact = SingleModeParams {
        kappa: 3.0,
        gamma_perp: 1.0,
        gamma_par: 0.0,
        r: 10.0,
        delta_c: 0.0,
    };
    let nine = hopf_threshold(&exact).unwrap().threshold == HopfThreshold::Finite(9.0);

    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut oscillatory = true;
    for _ in 0..50 {
        let gp = 1.0;
        let gl = rng.gen_range(0.05..3.0);
        let kappa = (gp + gl) * rng.gen_range(1.2..10.0);
        let mut p = SingleModeParams::new(kappa, gp, gl, 1.0).unwrap();
        let HopfThreshold::Finite(r_hb) = hopf_threshold(&p).unwrap().threshold else {
            return outcome(false, "bad-cavity draw reported no finite threshold".into());
        };
        p.r = r_hb;
        let e = libm::sqrt(r_hb - 1.0);
        let lead = numerical_eigenvalues(&p, [e, e, 1.0])[0];
        worst = worst.max(lead.re.abs() / gp);
        oscillatory &= lead.im.abs() > 1e-3;
    }
    outcome(
        nine && worst < 1e-6 && oscillatory,
        format!("r_HB(κ=3γ⊥, γ∥=0) = 9: {nine}, max |Re λ|/γ⊥ at r_HB {worst:.2e}, complex pair: {oscillatory}"),
    )
}

/// Fixed-step RK4 Benettin estimate on `X' = σ(Y−X)`, `Y' = X(r−Z) − Y`, `Z' = XY − bZ`.
fn benettin_rk4(sigma: f64, b: f64, r: f64, transient: f64, total: f64) -> f64 {
    let f = |s: [f64; 6]| {
        let (x, y, z, u, v, w) = (s[0], s[1], s[2], s[3], s[4], s[5]);
        [
            sigma * (y - x),
            x * (r - z) - y,
            x * y - b * z,
            sigma * (v - u),
            (r - z) * u - v - x * w,
            y * u + x * v - b * w,
        ]
    };
    let h = 0.002;
    let step = |s: [f64; 6]| {
        let add = |a: [f64; 6], k: [f64; 6], c: f64| core::array::from_fn::<f64, 6, _>(|i| a[i] + c * k[i]);
        let k1 = f(s);
        let k2 = f(add(s, k1, h / 2.0));
        let k3 = f(add(s, k2, h / 2.0));
        let k4 = f(add(s, k3, h));
        core::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    };
    let mut s = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
    for _ in 0..(transient / h) as usize {
        s = step(s);
    }
    s[3..].copy_from_slice(&[1.0, 0.0, 0.0]);
    let per = (1.0 / h) as usize;
    let blocks = total as usize;
    let mut sum = 0.0;
    for _ in 0..blocks {
        for _ in 0..per {
            s = step(s);
        }
        let n = libm::sqrt(s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
        sum += libm::log(n);
        for v in &mut s[3..] {
            *v /= n;
        }
    }
    sum / blocks as f64
}

fn lorenz_correspondence() -> Outcome {
    let p = SingleModeParams::new(10.0, 1.0, 8.0 / 3.0, 28.0).unwrap();
    let lib = lyapunov_max(&p, LorenzState::new(1.0, 1.0, 27.0), [1.0, 0.0, 0.0], &LyapunovConfig::default()).unwrap();
    let oracle = benettin_rk4(10.0, 8.0 / 3.0, 28.0, 100.0, 5000.0);
    let r_hb = match hopf_threshold(&p).unwrap().threshold {
        HopfThreshold::Finite(v) => v,
        _ => f64::NAN,
    };
    let pass = (lib - 0.906).abs() < 0.05
        && (oracle - 0.906).abs() < 0.05
        && (lib - oracle).abs() < 0.05
        && (r_hb - 470.0 / 19.0).abs() < 1e-12
        && r_hb < 28.0;
    outcome(
        pass,
        format!("λ_max = {lib:.4} (independent RK4 Benettin {oracle:.4}), r_HB = {r_hb:.6} < 28"),
    )
}

fn phase_decoupling() -> Outcome {
    let p = SingleModeParams::new(2.0, 1.0, 0.5, 3.0).unwrap();
    let s0 = ComplexModeState {
        f: Complex64::new(0.5, 0.2),
        p: Complex64::new(0.3, -0.4),
        d: 0.8,
    };
    let rate = p.kappa + p.gamma_perp;
    let t_end = 10.0 / rate;
    let traj = integrate_complex(s0, &p, t_end, 1e-13).unwrap();
    let (e0, q0) = (s0.field_amplitude(), s0.p_quadrature());
    let mut worst: f64 = 0.0;
    let mut literal: f64 = 0.0;
    let mut e_span = (f64::INFINITY, 0.0f64);
    for i in 0..=40 {
        let t = t_end * i as f64 / 40.0;
        let s = traj.at(t).unwrap();
        let e = s.field_amplitude();
        e_span = (e_span.0.min(e), e_span.1.max(e));
        let decay = libm::exp(-rate * t);
        worst = worst.max(rel(s.p_quadrature(), q0 * (e0 / e) * decay));
        literal = literal.max(rel(s.p_quadrature(), q0 * (e / e0) * decay));
    }
    outcome(
        worst < 1e-6,
        format!(
            "P_im·E decays at κ+γ⊥: max relative error {worst:.2e} (E ranges {:.3}..{:.3}; \
             the form with E(t)/E(0) misses by {literal:.2e})",
            e_span.0, e_span.1
        ),
    )
}

fn level_reductions() -> Outcome {
    let ratio = 1e4;
    let mut worst: f64 = 0.0;
    for k in 0..9 {
        let pump = 10f64.powf(-1.0 + 2.0 * k as f64 / 8.0);

        let slow = pump.max(1.0);
        let p3 = ThreeLevelParams {
            gamma_21: 1.0,
            gamma_31: 0.1,
            gamma_32: ratio * slow,
            gamma_perp: 1.0,
            pump,
        };
        let map = map_three_level_with_ratio(&p3, ratio).unwrap();
        let t_end = 20.0 / map.gamma_par.min(1.0);
        let d = integrate_three_level(ThreeLevelState::ground(), &DriveField::zero(), &p3, 0.0, t_end, 1e-9)
            .unwrap()
            .final_state()
            .inversion();
        worst = worst.max((d - map.d0).abs() / map.d0.abs().max(1.0));

        let p4 = FourLevelParams {
            gamma_10: ratio * slow,
            gamma_20: 0.2,
            gamma_21: 1.0,
            gamma_30: 0.1,
            gamma_31: 0.1,
            gamma_32: ratio * slow,
            gamma_perp: 1.0,
            pump,
        };
        let map = map_four_level_with_ratio(&p4, ratio).unwrap();
        let t_end = 20.0 / map.gamma_par.min(1.0);
        let d = integrate_four_level(FourLevelState::ground(), &DriveField::zero(), &p4, 0.0, t_end, 1e-9)
            .unwrap()
            .final_state()
            .inversion();
        worst = worst.max(rel(d, map.d0));
    }
    outcome(worst < 1e-2, format!("max inversion error vs mapped d0 {worst:.2e}"))
}

fn adiabatic() -> Outcome {
    let signal = Sinusoid {
        offset: 2.0,
        amplitude: 1.0,
        omega: 1.0,
        phase: 0.3,
    };
    let gamma = 100.0;
    let w = signal.omega;
    // particular solution of f' = −γf + g
    let exact = |t: f64| {
        let (s, c) = libm::sincos(w * t + signal.phase);
        signal.offset / gamma + signal.amplitude * (gamma * c + w * s) / (gamma * gamma + w * w)
    };
    let times: Vec<f64> = linspace(0.0, 4.0 * PI, 401);
    let numeric = integrate_linear_response(&signal, gamma, exact(0.0), &times, 1e-12).unwrap();
    let ode_err = times
        .iter()
        .zip(&numeric)
        .map(|(&t, &f)| rel(f, exact(t)))
        .fold(0.0, f64::max);
    let err = |order: u8| {
        let a = adiabatic_expansion(signal, gamma, order).unwrap();
        times.iter().map(|&t| rel(a.eval(t), exact(t))).fold(0.0, f64::max)
    };
    let (e0, e1) = (err(0), err(1));
    outcome(
        ode_err < 1e-8 && e0 <= 2e-2 && e0 / e1 >= 25.0,
        format!("order 0 error {e0:.3e}, order 1 error {e1:.3e} ({:.0}x), integrator check {ode_err:.1e}", e0 / e1),
    )
}

fn conservation() -> Outcome {
    let drive = DriveField::Constant(Complex64::new(0.7, 0.2));
    let p3 = ThreeLevelParams {
        gamma_21: 1.0,
        gamma_31: 0.5,
        gamma_32: 5.0,
        gamma_perp: 1.0,
        pump: 2.0,
    };
    let t3 = integrate_three_level(ThreeLevelState::ground(), &drive, &p3, 0.4, 1e3, 1e-9).unwrap();
    let trace3 = t3.iter().map(|(_, s)| (s.trace() - 1.0).abs()).fold(0.0, f64::max);
    let p4 = FourLevelParams {
        gamma_10: 5.0,
        gamma_20: 0.2,
        gamma_21: 1.0,
        gamma_30: 0.1,
        gamma_31: 0.1,
        gamma_32: 5.0,
        gamma_perp: 1.0,
        pump: 2.0,
    };
    let t4 = integrate_four_level(FourLevelState::ground(), &drive, &p4, 0.4, 1e3, 1e-9).unwrap();
    let trace4 = t4.iter().map(|(_, s)| (s.trace() - 1.0).abs()).fold(0.0, f64::max);

    let cav = CavityParams::new(0.9, 2.0, 3.0, 1.5).unwrap();
    let (lm, v) = (cav.medium_length, cav.advection_velocity());
    let q = 2.0 * PI / lm;
    let shape = |z: f64| {
        Complex64::from_polar(1.0, q * z) + Complex64::new(0.3, -0.2) * Complex64::from_polar(1.0, -3.0 * q * z)
            + Complex64::new(0.5, 0.0)
    };
    let n = 32;
    let f0 = FieldOnRing::from_fn(n, cav, shape).unwrap();
    let decoupled = SingleModeParams {
        kappa: 0.0,
        gamma_perp: 0.0,
        gamma_par: 0.0,
        r: 0.0,
        delta_c: 0.0,
    };
    let round_trip = lm / v;
    let zeros_p = vec![Complex64::new(0.0, 0.0); n];
    let zeros_d = vec![0.0; n];
    // 1000 round trips, sampled at every 0.7 of a round trip plus the final time
    let run = integrate_traveling_wave(&f0, &zeros_p, &zeros_d, &decoupled, 1e3 * round_trip, 1e-10, 1001).unwrap();
    let norm0 = f0.l2_norm();
    let mut norm_err: f64 = 0.0;
    let mut shift_err: f64 = 0.0;
    for (k, frame) in run.frames.iter().enumerate() {
        let field = run.field_at(k);
        norm_err = norm_err.max((field.l2_norm() - norm0).abs() / norm0);
        for (z, s) in field.positions().iter().zip(&frame.field) {
            shift_err = shift_err.max((s - shape(z - v * frame.t)).norm());
        }
    }
    let back = run.frames.last().unwrap();
    let periodic = back
        .field
        .iter()
        .zip(f0.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let pass = trace3 < 1e-10 && trace4 < 1e-10 && norm_err < 1e-10 && shift_err < 1e-10 && periodic < 1e-10;
    outcome(
        pass,
        format!(
            "trace drift {trace3:.1e} / {trace4:.1e}, norm drift {norm_err:.1e}, \
             transport error {shift_err:.1e}, return after 1000 round trips {periodic:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("amplifier: integrated vs implicit solution", amplifier_two_methods),
        ("amplifier: weak and strong asymptotes", asymptotes),
        ("ring: threshold and output line", threshold_line),
        ("ring: uniform-field flattening", uniform_field_flattening),
        ("ring: frequency pulling", pulling),
        ("lorenz: Hopf threshold", hopf),
        ("lorenz: Lyapunov exponent at sigma=10, b=8/3, r=28", lorenz_correspondence),
        ("lorenz: resonant phase decoupling", phase_decoupling),
        ("params: three- and four-level reductions", level_reductions),
        ("bloch: adiabatic elimination", adiabatic),
        ("conservation: trace, norm and periodicity", conservation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "{tag} {:>2} {name}: {} [{:.2} s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
