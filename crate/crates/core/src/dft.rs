//! Minimal complex FFT and the grid transforms used by the field layer.
//!
//! Internal grids are always powers of two so the radix-2 path covers the hot
//! loops; a direct summation fallback keeps arbitrary grid sizes correct for
//! the odd-sized grids that show up in round-trip tests.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// In-place radix-2 transform, `sign = -1` forward, `sign = +1` inverse.
/// No scaling is applied in either direction.
pub(crate) fn fft_pow2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            buf.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wlen = Complex64::new(libm::cos(ang), libm::sin(ang));
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

fn dft_direct(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = input.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &x) in input.iter().enumerate() {
            let ang = sign * 2.0 * PI * (j as f64) * (k as f64) / (n as f64);
            acc += x * Complex64::new(libm::cos(ang), libm::sin(ang));
        }
        *slot = acc;
    }
    out
}

/// `f_j = sum_n coeffs[n] e^{+i n theta_j}` on the uniform `m`-point grid,
/// with `coeffs` indexed `n = -band..=band`. Requires `m >= 2*band + 1`.
pub(crate) fn synthesize(coeffs: &[Complex64], band: usize, m: usize) -> Vec<Complex64> {
    debug_assert_eq!(coeffs.len(), 2 * band + 1);
    debug_assert!(m >= 2 * band + 1);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); m];
    for n in -(band as i64)..=(band as i64) {
        let bin = n.rem_euclid(m as i64) as usize;
        spectrum[bin] = coeffs[(n + band as i64) as usize];
    }
    if m.is_power_of_two() {
        fft_pow2(&mut spectrum, 1.0);
        spectrum
    } else {
        dft_direct(&spectrum, 1.0)
    }
}

/// `c_n = (1/m) sum_j samples[j] e^{-i n theta_j}` for `n = -band..=band`.
pub(crate) fn analyze(samples: &[Complex64], band: usize) -> Vec<Complex64> {
    let m = samples.len();
    debug_assert!(m >= 2 * band + 1);
    let spectrum = if m.is_power_of_two() {
        let mut buf = samples.to_vec();
        fft_pow2(&mut buf, -1.0);
        buf
    } else {
        dft_direct(samples, -1.0)
    };
    let scale = 1.0 / m as f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
    for n in -(band as i64)..=(band as i64) {
        let bin = n.rem_euclid(m as i64) as usize;
        coeffs[(n + band as i64) as usize] = spectrum[bin] * scale;
    }
    coeffs
}

/// Smallest power of two `>= n`.
pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}
