//! In-place iterative radix-2 FFT on `Complex64` slices.
//!
//! Unnormalized in both directions: `inverse(forward(x)) = n·x`.

use core::f64::consts::PI;

use num_complex::Complex64;

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Forward transform `X_m = Σ_j x_j e^{-2πi jm/n}`.
///
/// # Panics
/// If the length is not a power of two.
pub fn forward(data: &mut [Complex64]) {
    transform(data, -1.0);
}

/// Inverse transform without the `1/n` factor.
pub fn inverse(data: &mut [Complex64]) {
    transform(data, 1.0);
}

fn transform(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    assert!(is_power_of_two(n), "FFT length {n} is not a power of two");
    if n == 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        for k in 0..half {
            // direct evaluation keeps twiddles accurate for large n
            let (s, c) = libm::sincos(step * k as f64);
            let w = Complex64::new(c, s);
            for start in (0..n).step_by(len) {
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Signed mode number for FFT bin `j` of an `n`-point transform.
pub fn mode_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}
