//! Band-limited Fourier representation of real 2*pi-periodic functions.
//!
//! Coefficients are stored over the full symmetric range `n = -N..=N` with
//! conjugate symmetry enforced on construction, which keeps the sign
//! conventions of the Hilbert and inertia multipliers transparent. All
//! operations are pure; quadratic terms go through a dealiased grid of at
//! least `3N + 1` points, and off-grid evaluation is direct mode summation so
//! trigonometric polynomials evaluate exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::dft;
use crate::error::SpectralError;

/// Sobolev seminorm orders used by the bounds and energy diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevOrder {
    /// Weight `|n|`.
    Half,
    /// Weight `n^2`.
    One,
    /// Degenerate weight `|n|(n^2 - 1)`; modes `|n| <= 1` contribute zero.
    ThreeHalves,
}

impl SobolevOrder {
    fn weight(self, n: i64) -> f64 {
        let a = n.unsigned_abs() as f64;
        match self {
            SobolevOrder::Half => a,
            SobolevOrder::One => a * a,
            SobolevOrder::ThreeHalves => a * (a * a - 1.0),
        }
    }
}

/// A real-valued trigonometric polynomial held as complex coefficients
/// `c_n`, `n = -N..=N`, with `c_{-n} = conj(c_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    band: usize,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    /// The zero field at band limit `band`.
    pub fn zero(band: usize) -> Self {
        FourierField { band, coeffs: vec![Complex64::new(0.0, 0.0); 2 * band + 1] }
    }

    /// Builds a field from raw coefficients indexed `n = -band..=band`.
    /// The conjugate-symmetry invariant is enforced by averaging `c_n`
    /// with `conj(c_{-n})`; non-finite input is rejected.
    pub fn from_coeffs(band: usize, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        assert_eq!(coeffs.len(), 2 * band + 1, "coefficient count must be 2*band + 1");
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let mut out = coeffs;
        for n in 0..=band {
            let hi = band + n;
            let lo = band - n;
            let sym = 0.5 * (out[hi] + out[lo].conj());
            out[hi] = sym;
            out[lo] = sym.conj();
        }
        Ok(FourierField { band, coeffs: out })
    }

    /// Builds `sum_k a_k cos(k theta) + b_k sin(k theta)` from
    /// `(mode, cos_amp, sin_amp)` terms. Terms above `band` are rejected.
    pub fn from_modes(band: usize, terms: &[(usize, f64, f64)]) -> Self {
        let mut f = FourierField::zero(band);
        for &(k, a, b) in terms {
            assert!(k <= band, "mode {k} exceeds band limit {band}");
            if k == 0 {
                f.coeffs[band] += Complex64::new(a, 0.0);
            } else {
                let c = Complex64::new(0.5 * a, -0.5 * b);
                f.coeffs[band + k] += c;
                f.coeffs[band - k] += c.conj();
            }
        }
        f
    }

    /// Analyzes `m >= 2*band + 1` uniform real samples into a field.
    pub fn from_samples(band: usize, samples: &[f64]) -> Result<Self, SpectralError> {
        assert!(samples.len() >= 2 * band + 1, "need at least 2*band + 1 samples");
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let coeffs = dft::analyze(&complex, band);
        FourierField::from_coeffs(band, coeffs)
    }

    pub fn band_limit(&self) -> usize {
        self.band
    }

    /// Coefficient `c_n`; zero outside the band.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.band {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.band as i64) as usize]
        }
    }

    /// Iterator over `(n, c_n)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let band = self.band as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - band, c))
    }

    /// Mean value (mode-zero coefficient, real by symmetry).
    pub fn mean(&self) -> f64 {
        self.coeffs[self.band].re
    }

    pub fn is_mean_zero(&self, tol: f64) -> bool {
        libm::fabs(self.mean()) <= tol * self.max_abs_coeff().max(1.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Applies a real, even-in-`n` Fourier multiplier.
    pub(crate) fn map_multiplier(&self, mut sigma: impl FnMut(i64) -> Complex64) -> Self {
        let band = self.band as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| sigma(i as i64 - band) * c)
            .collect();
        FourierField { band: self.band, coeffs }
    }

    /// Hilbert transform: multiplier `-i sgn(n)`; the mean is annihilated.
    pub fn hilbert(&self) -> Self {
        self.map_multiplier(|n| Complex64::new(0.0, -(n.signum() as f64)))
    }

    /// Spectral derivative of the given order: multiplier `(i n)^order`.
    pub fn derivative(&self, order: u32) -> Self {
        self.map_multiplier(|n| Complex64::new(0.0, n as f64).powu(order))
    }

    /// Zeroes the listed modes (and their negatives are listed explicitly).
    pub fn zero_modes(&self, modes: &[i64]) -> Self {
        let mut out = self.clone();
        for &n in modes {
            if n.unsigned_abs() as usize <= out.band {
                out.coeffs[(n + out.band as i64) as usize] = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Returns the same function at band limit `band >= self.band_limit()`.
    pub fn pad_to(&self, band: usize) -> Self {
        assert!(band >= self.band);
        let mut out = FourierField::zero(band);
        for (n, c) in self.iter() {
            out.coeffs[(n + band as i64) as usize] = c;
        }
        out
    }

    /// Galerkin truncation to a smaller band limit.
    pub fn truncated(&self, band: usize) -> Self {
        assert!(band <= self.band);
        let mut out = FourierField::zero(band);
        for n in -(band as i64)..=(band as i64) {
            out.coeffs[(n + band as i64) as usize] = self.coeff(n);
        }
        out
    }

    /// Dealiased product. The result keeps the working band limit
    /// `max(self.band, other.band)`: those modes are exact because the grid
    /// has at least `3*band + 1` points (2/3-rule); higher product modes are
    /// discarded. Pad the inputs first when the full quadratic band matters.
    pub fn multiply(&self, other: &FourierField) -> Self {
        let band = self.band.max(other.band);
        let m = dft::next_pow2(3 * band + 1);
        let a = self.pad_to(band).sample_complex(m);
        let b = other.pad_to(band).sample_complex(m);
        let prod: Vec<Complex64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
        let coeffs = dft::analyze(&prod, band);
        // inputs are real, so the product analysis is symmetric to roundoff
        FourierField::from_coeffs(band, coeffs).expect("finite product")
    }

    fn sample_complex(&self, m: usize) -> Vec<Complex64> {
        dft::synthesize(&self.coeffs, self.band, m)
    }

    /// Real samples on the uniform `m`-point grid, `m >= 2*band + 1`.
    pub fn sample_values(&self, m: usize) -> Vec<f64> {
        self.sample_complex(m).iter().map(|c| c.re).collect()
    }

    /// Exact evaluation at one angle by direct mode summation.
    pub fn evaluate_one(&self, theta: f64) -> f64 {
        let z = Complex64::new(libm::cos(theta), libm::sin(theta));
        let mut zn = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=self.band {
            zn *= z;
            acc += self.coeffs[self.band + n] * zn;
        }
        self.coeffs[self.band].re + 2.0 * acc.re
    }

    /// Exact evaluation at a list of angles.
    pub fn evaluate_at(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&t| self.evaluate_one(t)).collect()
    }

    /// Evaluates the field and its first derivative in one pass over the
    /// modes; this is the hot path of the Lagrangian transport.
    pub fn evaluate_with_derivative(&self, points: &[f64], out_f: &mut [f64], out_df: &mut [f64]) {
        debug_assert_eq!(points.len(), out_f.len());
        debug_assert_eq!(points.len(), out_df.len());
        for ((&theta, f), df) in points.iter().zip(out_f.iter_mut()).zip(out_df.iter_mut()) {
            let z = Complex64::new(libm::cos(theta), libm::sin(theta));
            let mut zn = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut dacc = Complex64::new(0.0, 0.0);
            for n in 1..=self.band {
                zn *= z;
                let term = self.coeffs[self.band + n] * zn;
                acc += term;
                dacc += term * (n as f64);
            }
            *f = self.coeffs[self.band].re + 2.0 * acc.re;
            *df = -2.0 * dacc.im;
        }
    }

    /// Squared homogeneous seminorm `2 pi sum_n w_r(n) |c_n|^2`.
    pub fn seminorm_sq(&self, order: SobolevOrder) -> f64 {
        let band = self.band as i64;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| order.weight(i as i64 - band) * c.norm_sqr())
            .sum();
        2.0 * PI * sum
    }

    /// Plain coefficient energy `sum |c_n|^2`.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fraction of coefficient energy in the top third of the band,
    /// `|n| > floor(2N/3)`. Zero for the zero field.
    pub fn tail_energy_fraction(&self) -> f64 {
        let total = self.coeff_energy();
        if total == 0.0 {
            return 0.0;
        }
        let cut = (2 * self.band / 3) as i64;
        let tail: f64 = self
            .iter()
            .filter(|(n, _)| n.abs() > cut)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        tail / total
    }

    /// The field rotated in its argument: `theta -> theta + alpha`.
    pub fn rotate(&self, alpha: f64) -> Self {
        self.map_multiplier(|n| {
            let a = n as f64 * alpha;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
    }

    /// `self + h * other`, same band limit.
    pub fn add_scaled(&self, other: &FourierField, h: f64) -> Self {
        debug_assert_eq!(self.band, other.band);
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a + b * h)
            .collect();
        FourierField { band: self.band, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_multiplier(|_| Complex64::new(s, 0.0))
    }

    /// Minimum and maximum of the function over the circle: grid of
    /// `8 * band` points (at least 32) with one Newton refinement at each
    /// discrete extremizer.
    pub fn extrema(&self) -> (f64, f64) {
        if self.band == 0 {
            let c = self.coeffs[0].re;
            return (c, c);
        }
        let m = dft::next_pow2((8 * self.band).max(32));
        let vals = self.sample_values(m);
        let (mut jmin, mut vmin) = (0usize, f64::INFINITY);
        let (mut jmax, mut vmax) = (0usize, f64::NEG_INFINITY);
        for (j, &v) in vals.iter().enumerate() {
            if v < vmin {
                vmin = v;
                jmin = j;
            }
            if v > vmax {
                vmax = v;
                jmax = j;
            }
        }
        let h = 2.0 * PI / m as f64;
        let d1 = self.derivative(1);
        let d2 = self.derivative(2);
        let refine = |j: usize, maximize: bool, current: f64| -> f64 {
            let theta = j as f64 * h;
            let fp = d1.evaluate_one(theta);
            let fpp = d2.evaluate_one(theta);
            let usable = if maximize { fpp < 0.0 } else { fpp > 0.0 };
            if usable {
                let step = fp / fpp;
                if libm::fabs(step) <= h {
                    let refined = self.evaluate_one(theta - step);
                    return if maximize { current.max(refined) } else { current.min(refined) };
                }
            }
            current
        };
        (refine(jmin, false, vmin), refine(jmax, true, vmax))
    }

    pub fn max_value(&self) -> f64 {
        self.extrema().1
    }

    pub fn min_value(&self) -> f64 {
        self.extrema().0
    }

    /// Sup norm of the function values.
    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.extrema();
        hi.max(-lo).max(0.0)
    }
}

/// Uniform grid `theta_j = 2 pi j / m`, `j = 0..m`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}
