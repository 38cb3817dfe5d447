//! Safeguarded Newton/bisection for scalar roots on a bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Relative tolerance on the root (with an absolute floor of `xtol_abs`).
    pub xtol_rel: f64,
    pub xtol_abs: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            xtol_rel: 1e-13,
            xtol_abs: 1e-300,
            max_iter: 200,
        }
    }
}

/// Find `x` in `[lo, hi]` with `f(x) = 0`, where `fdf` returns `(f, f')`.
///
/// Newton steps are taken when they stay inside the current bracket and shrink
/// it fast enough; otherwise the step falls back to bisection. An optional
/// `guess` seeds the first Newton step.
pub fn newton_bisect(
    mut fdf: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    guess: Option<f64>,
    opts: RootOptions,
) -> Result<f64> {
    let (f_lo, _) = fdf(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let (f_hi, _) = fdf(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }
    // Orient so that f(xl) < 0 < f(xh).
    let (mut xl, mut xh) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };

    let mut x = match guess {
        Some(g) if g > lo.min(hi) && g < lo.max(hi) => g,
        _ => 0.5 * (lo + hi),
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = fdf(x);

    for _ in 0..opts.max_iter {
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
        let newton_leaves = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        let newton_slow = (2.0 * f).abs() > (dx_old * df).abs();
        dx_old = dx;
        if newton_leaves || newton_slow || !df.is_finite() || df == 0.0 {
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        } else {
            dx = f / df;
            x -= dx;
        }
        let tol = opts.xtol_rel * x.abs() + opts.xtol_abs;
        if dx.abs() <= tol || (xh - xl).abs() <= tol {
            return Ok(x);
        }
        (f, df) = fdf(x);
    }
    Err(Error::RootNotConverged {
        iterations: opts.max_iter,
        last_x: x,
    })
}
