//! The nonlocal forces of the slope equations and the machinery around them:
//! three independent representations of `F`, the force `G`, the convolution
//! coefficients `h_k`, sharp sup-norm bounds, the constructive blowup
//! certificate and the linear-in-time growth monitor for EWP runs.
//!
//! All sup norms follow the same recipe: a grid of eight points per mode with
//! one Newton refinement at the discrete maximizer.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::dynamics::TrajectoryRecord;
use crate::error::{AnalysisError, SpectralError};
use crate::field::{FourierField, SobolevOrder};
use crate::operator::{helmholtz_inverse_restricted, OperatorKind};
use crate::quad::gauss_legendre_unit;
use crate::DEFAULT_GATE_TOL;

/// The three squared seminorms entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormSet {
    pub h_half_sq: f64,
    pub h_one_sq: f64,
    pub h_three_halves_sq: f64,
}

impl SeminormSet {
    pub fn of(u: &FourierField) -> Self {
        SeminormSet {
            h_half_sq: u.seminorm_sq(SobolevOrder::Half),
            h_one_sq: u.seminorm_sq(SobolevOrder::One),
            h_three_halves_sq: u.seminorm_sq(SobolevOrder::ThreeHalves),
        }
    }
}

/// Outcome of checking an analytic sup-norm bound at runtime.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub quantity: &'static str,
    /// Measured sup norm of the bounded quantity.
    pub sup_norm: f64,
    /// Right-hand side of the inequality.
    pub bound: f64,
    /// `bound - sup_norm`; nonnegative on pass.
    pub slack: f64,
    /// The seminorms the bound was assembled from.
    pub seminorms: SeminormSet,
    /// For the growth monitor only: the assembled constant `C` of the
    /// affine-in-time bound. `None` for the static bounds.
    pub growth_constant: Option<f64>,
}

/// A certified wave-breaking point: `u0'(theta0) < 0` at a zero of the
/// initial momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupCertificate {
    pub theta0: f64,
    /// `u0'(theta0)`, strictly negative.
    pub u0_slope: f64,
    /// Initial momentum at `theta0`, near zero by construction.
    pub omega0_value: f64,
    pub refinement_tolerance: f64,
}

/// `F = -u u'' - H(u H u'')`, computed with dealiased products at twice the
/// input band so the quadratic terms are exact.
pub fn compute_f(u: &FourierField) -> FourierField {
    debug_assert!(u.is_mean_zero(1e-9), "F is defined for mean-zero fields");
    let wide = (2 * u.band_limit()).max(1);
    let up = u.pad_to(wide);
    let upp = up.derivative(2);
    let local = up.multiply(&upp);
    let nonlocal = up.multiply(&upp.hilbert()).hilbert();
    local.add_scaled(&nonlocal, 1.0).scale(-1.0)
}

/// Series form of `F`: for band-limited mean-zero `u` the tail sums
/// `phi_n(theta) = sum_{m>=n} c_m e^{im theta}` are finite and
/// `F = 2 sum_{n>=1} (2n-1) |phi_n|^2`. Swapping the sums gives the exact
/// coefficient formula `F_k = 2 sum_{m-m'=k} min(m,m')^2 c_m conj(c_m')`.
pub fn f_series(u: &FourierField) -> FourierField {
    debug_assert!(u.is_mean_zero(1e-9));
    let n = u.band_limit();
    let band_out = n.saturating_sub(1);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * band_out + 1];
    for m in 1..=n as i64 {
        let cm = u.coeff(m);
        if cm.norm_sqr() == 0.0 {
            continue;
        }
        for mp in 1..=n as i64 {
            let k = m - mp;
            let w = core::cmp::min(m, mp) as f64;
            coeffs[(k + band_out as i64) as usize] += cm * u.coeff(mp).conj() * (2.0 * w * w);
        }
    }
    FourierField::from_coeffs(band_out, coeffs).expect("finite series data")
}

/// Quadrature resolution for the integral form of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscQuadrature {
    /// Trapezoid nodes for the boundary integral in `psi`.
    pub boundary_nodes: usize,
    /// Gauss-Legendre nodes in radius for the disc integral.
    pub radial_nodes: usize,
    /// Trapezoid nodes in angle for the disc integral.
    pub angular_nodes: usize,
}

impl Default for DiscQuadrature {
    fn default() -> Self {
        DiscQuadrature { boundary_nodes: 256, radial_nodes: 64, angular_nodes: 256 }
    }
}

/// Switch distance below which the difference quotient is replaced by its
/// Taylor value; removes cancellation at the diagonal.
const DIAGONAL_SWITCH: f64 = 1e-6;

struct HolomorphicPart {
    coeffs: Vec<Complex64>, // c_n for n = 1..=N
}

impl HolomorphicPart {
    fn of(u: &FourierField) -> Self {
        let n = u.band_limit();
        HolomorphicPart { coeffs: (1..=n as i64).map(|k| u.coeff(k)).collect() }
    }

    fn phi(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = (acc + c) * z;
        }
        acc
    }

    fn phi_prime(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let n = (i + 1) as f64;
            acc = acc * z + c * n;
        }
        acc
    }

    fn phi_second(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().rev().take_while(|(i, _)| *i >= 1) {
            let n = (i + 1) as f64;
            acc = acc * z + c * (n * (n - 1.0));
        }
        acc
    }

    fn upsilon(&self, w: Complex64, z: Complex64) -> Complex64 {
        let d = w - z;
        if d.norm() < DIAGONAL_SWITCH {
            self.phi_prime(z)
        } else {
            (self.phi(w) - self.phi(z)) / d
        }
    }

    fn upsilon_dw(&self, w: Complex64, z: Complex64) -> Complex64 {
        let d = w - z;
        if d.norm() < DIAGONAL_SWITCH {
            self.phi_second(z) * 0.5
        } else {
            (self.phi_prime(w) * d - (self.phi(w) - self.phi(z))) / (d * d)
        }
    }
}

/// Integral form of `F` at a single angle: a boundary integral of the
/// squared difference quotient of `Phi` plus a disc integral of its
/// `w`-derivative. The polar tensor quadrature is exact to roundoff for
/// band limits up to half the angular resolution.
pub fn f_integral(u: &FourierField, theta: f64, quad: &DiscQuadrature) -> f64 {
    debug_assert!(u.is_mean_zero(1e-9));
    let part = HolomorphicPart::of(u);
    let z = Complex64::new(libm::cos(theta), libm::sin(theta));

    let kb = quad.boundary_nodes;
    let mut boundary = 0.0;
    for k in 0..kb {
        let psi = 2.0 * PI * k as f64 / kb as f64;
        let w = Complex64::new(libm::cos(psi), libm::sin(psi));
        boundary += part.upsilon(z, w).norm_sqr();
    }
    boundary *= 2.0 / kb as f64; // (1/pi) * (2 pi / K)

    let (radii, weights) = gauss_legendre_unit(quad.radial_nodes);
    let ka = quad.angular_nodes;
    let mut disc = 0.0;
    for (&r, &wr) in radii.iter().zip(weights.iter()) {
        let mut ring = 0.0;
        for j in 0..ka {
            let alpha = 2.0 * PI * j as f64 / ka as f64;
            let w = Complex64::new(r * libm::cos(alpha), r * libm::sin(alpha));
            ring += part.upsilon_dw(w, z).norm_sqr();
        }
        disc += wr * r * ring;
    }
    disc *= 8.0 / ka as f64; // (4/pi) * (2 pi / K)

    boundary + disc
}

/// `G = H (1 + d^2)^{-1} [ 2 u' Hu' - u'' Hu'' ]`. The bilinear interior
/// term must clear the resonance gate of the restricted inverse; failure is
/// an implementation bug, not a data condition.
pub fn compute_g(u: &FourierField) -> Result<FourierField, SpectralError> {
    debug_assert!(u.is_mean_zero(1e-9));
    let wide = (2 * u.band_limit()).max(1);
    let up = u.derivative(1).pad_to(wide);
    let upp = u.derivative(2).pad_to(wide);
    let interior = up
        .multiply(&up.hilbert())
        .scale(2.0)
        .add_scaled(&upp.multiply(&upp.hilbert()), -1.0);
    Ok(helmholtz_inverse_restricted(&interior, DEFAULT_GATE_TOL)?.hilbert())
}

/// Convolution coefficients of `f' Hf'`: `h_k = sum_{n=1}^{k-1} n(k-n)
/// f_n f_{k-n}`, returned indexed by `k = 0..=2N`; `h_0 = h_1 = 0` always.
pub fn transfer_coefficients(f: &FourierField) -> Vec<Complex64> {
    debug_assert!(f.is_mean_zero(1e-9));
    let n = f.band_limit();
    let mut h = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (k, slot) in h.iter_mut().enumerate().skip(2) {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..k as i64 {
            let w = (j * (k as i64 - j)) as f64;
            acc += f.coeff(j) * f.coeff(k as i64 - j) * w;
        }
        *slot = acc;
    }
    h
}

fn check_slack(
    quantity: &'static str,
    sup_norm: f64,
    bound: f64,
    seminorms: SeminormSet,
) -> Result<BoundReport, AnalysisError> {
    let slack = bound - sup_norm;
    if slack < -1e-9 * bound.abs().max(1.0) {
        return Err(AnalysisError::BoundViolated { quantity, slack });
    }
    Ok(BoundReport { quantity, sup_norm, bound, slack, seminorms, growth_constant: None })
}

/// Checks `max F <= (1/pi) ||u||_{3/2}^2 + (pi/2) ||u||_1^2`.
pub fn bound_f(u: &FourierField) -> Result<BoundReport, AnalysisError> {
    let seminorms = SeminormSet::of(u);
    let sup = compute_f(u).max_value();
    let bound = seminorms.h_three_halves_sq / PI + 0.5 * PI * seminorms.h_one_sq;
    check_slack("F", sup, bound, seminorms)
}

/// Checks `||G||_inf <= 8 pi ||u||_{1/2}^2 + 4 pi ||u||_{3/2}^2`.
pub fn bound_g(u: &FourierField) -> Result<BoundReport, AnalysisError> {
    let seminorms = SeminormSet::of(u);
    let sup = compute_g(u)?.sup_norm();
    let bound = 8.0 * PI * seminorms.h_half_sq + 4.0 * PI * seminorms.h_three_halves_sq;
    check_slack("G", sup, bound, seminorms)
}

/// Default refinement tolerance for the certificate search.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Locates the global maximizer `theta0` of `H u0`, refines the critical
/// point (a zero of the initial momentum `omega0 = H u0'`), and certifies
/// `u0'(theta0) < 0`. Existence for every non-constant mean-zero field is a
/// theorem, so failure after refinement signals a bug.
pub fn certify_blowup(u0: &FourierField) -> Result<BlowupCertificate, AnalysisError> {
    certify_blowup_with_tol(u0, CERTIFICATE_TOL)
}

pub fn certify_blowup_with_tol(
    u0: &FourierField,
    tol: f64,
) -> Result<BlowupCertificate, AnalysisError> {
    debug_assert!(u0.is_mean_zero(1e-9), "certificate requires mean-zero u0");
    let g = u0.hilbert();
    let gp = g.derivative(1); // = omega0 = H u0'
    let m = (8 * u0.band_limit()).max(32).next_power_of_two();
    let vals = g.sample_values(m);
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for (j, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let h = 2.0 * PI / m as f64;
    let theta_hat = best_j as f64 * h;

    // Bisection on g' around the discrete maximizer; widen the bracket if
    // the sign change is not captured at the first width.
    let mut theta0 = theta_hat;
    let mut refined = false;
    for widen in [1.0, 2.0, 4.0] {
        let mut a = theta_hat - widen * h;
        let mut b = theta_hat + widen * h;
        let (ga, gb) = (gp.evaluate_one(a), gp.evaluate_one(b));
        if ga > 0.0 && gb < 0.0 {
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if gp.evaluate_one(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            theta0 = 0.5 * (a + b);
            refined = true;
            break;
        }
    }
    if !refined {
        // flat or grid-exact maximum: damped Newton on g'
        let gpp = g.derivative(2);
        for _ in 0..60 {
            let d1 = gp.evaluate_one(theta0);
            let d2 = gpp.evaluate_one(theta0);
            if d2 == 0.0 {
                break;
            }
            let step = (d1 / d2).clamp(-h, h);
            theta0 -= step;
            if libm::fabs(step) < tol {
                break;
            }
        }
    }
    theta0 -= 2.0 * PI * libm::floor(theta0 / (2.0 * PI));

    let slope = u0.derivative(1).evaluate_one(theta0);
    let omega0_value = gp.evaluate_one(theta0);
    if slope < 0.0 {
        Ok(BlowupCertificate { theta0, u0_slope: slope, omega0_value, refinement_tolerance: tol })
    } else {
        Err(AnalysisError::CertificateFailed { theta0, slope })
    }
}

/// Constant of the affine growth bound for EWP runs, assembled from the
/// static bounds with the lower-order seminorms controlled by the conserved
/// energy (quotient representatives carry no modes below `|n| = 2`, so
/// `||u||_1^2 <= E0` and `||u||_{1/2}^2 <= E0 / 3`):
/// `d/dt ||u_theta||_inf <= (1/pi + pi/2 + 8 pi/3 + 4 pi) E0`.
pub const GROWTH_BOUND_CONSTANT: f64 = 1.0 / PI + 0.5 * PI + 8.0 * PI / 3.0 + 4.0 * PI;

/// Checks `||u_theta(t)||_inf <= ||u0'||_inf + C E0 t` along an EWP run.
/// The reported slack is the minimum over the sampled times; a negative
/// value flags an integrator fault. Panics when fed a non-EWP record.
pub fn growth_monitor(record: &TrajectoryRecord, e0: f64) -> BoundReport {
    assert_eq!(record.operator, OperatorKind::Ewp, "growth monitor applies to EWP runs only");
    let c = GROWTH_BOUND_CONSTANT;
    let samples = &record.samples;
    assert!(!samples.is_empty(), "empty trajectory record");
    let sup0 = samples[0].max_abs_u_theta;
    let t0 = samples[0].time;
    let mut worst_slack = f64::INFINITY;
    let mut at_sup = sup0;
    let mut at_bound = sup0;
    for s in samples {
        let bound = sup0 + c * e0 * (s.time - t0);
        let slack = bound - s.max_abs_u_theta;
        if slack < worst_slack {
            worst_slack = slack;
            at_sup = s.max_abs_u_theta;
            at_bound = bound;
        }
    }
    BoundReport {
        quantity: "u_theta_growth",
        sup_norm: at_sup,
        bound: at_bound,
        slack: worst_slack,
        // the seminorm values the assembled constant charges to E0
        seminorms: SeminormSet { h_half_sq: e0 / 3.0, h_one_sq: e0, h_three_halves_sq: e0 },
        growth_constant: Some(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn sup_diff(a: &FourierField, b: &FourierField) -> f64 {
        let band = a.band_limit().max(b.band_limit());
        a.pad_to(band).add_scaled(&b.pad_to(band), -1.0).sup_norm()
    }

    fn random_mean_zero(rng: &mut impl Rng, max_band: usize) -> FourierField {
        let band = rng.gen_range(2..=max_band);
        let terms: Vec<(usize, f64, f64)> = (1..=band)
            .map(|k| (k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        FourierField::from_modes(band, &terms)
    }

    #[test]
    fn compute_f_examples() {
        let sin1 = FourierField::from_modes(2, &[(1, 0.0, 1.0)]);
        let half = FourierField::from_modes(0, &[(0, 0.5, 0.0)]);
        assert!(sup_diff(&compute_f(&sin1), &half) < 1e-14);

        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        let two = FourierField::from_modes(0, &[(0, 2.0, 0.0)]);
        assert!(sup_diff(&compute_f(&cos2), &two) < 1e-13);

        assert!(compute_f(&FourierField::zero(3)).sup_norm() == 0.0);
    }

    #[test]
    fn f_series_examples() {
        let sin1 = FourierField::from_modes(2, &[(1, 0.0, 1.0)]);
        assert!((f_series(&sin1).coeff(0).re - 0.5).abs() < 1e-15);

        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        let f = f_series(&cos2);
        assert!((f.coeff(0).re - 2.0).abs() < 1e-15);
        assert!(f.sup_norm() - 2.0 < 1e-13);

        assert_eq!(f_series(&FourierField::zero(3)).sup_norm(), 0.0);
    }

    #[test]
    fn f_series_matches_tail_sum_and_is_nonnegative() {
        // oracle: the literal tail sums 2 sum (2n-1) |phi_n|^2, which are
        // nonnegative in floating point term by term
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let u = random_mean_zero(&mut rng, 24);
            let n = u.band_limit();
            let f = f_series(&u);
            for j in 0..64 {
                let theta = 2.0 * PI * j as f64 / 64.0;
                let z = Complex64::new(theta.cos(), theta.sin());
                let mut oracle = 0.0;
                for lo in 1..=n as i64 {
                    let mut phi = Complex64::new(0.0, 0.0);
                    let mut zn = z.powi(lo as i32 - 1);
                    for m in lo..=n as i64 {
                        zn *= z;
                        phi += u.coeff(m) * zn;
                    }
                    oracle += 2.0 * (2.0 * lo as f64 - 1.0) * phi.norm_sqr();
                }
                assert!(oracle >= 0.0);
                let tol = 1e-11 * (1.0 + oracle.abs());
                assert!((oracle - f.evaluate_one(theta)).abs() < tol);
            }
        }
    }

    #[test]
    fn triple_oracle_agreement() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let quad = DiscQuadrature::default();
        for _ in 0..20 {
            let u = random_mean_zero(&mut rng, 32);
            let direct = compute_f(&u);
            let series = f_series(&u);
            assert!(sup_diff(&direct, &series) < 1e-10);
            let theta = rng.gen_range(0.0..2.0 * PI);
            let integral = f_integral(&u, theta, &quad);
            assert!((integral - direct.evaluate_one(theta)).abs() < 1e-3);
        }
    }

    #[test]
    fn f_integral_examples() {
        let quad = DiscQuadrature::default();
        let sin1 = FourierField::from_modes(2, &[(1, 0.0, 1.0)]);
        for theta in [0.0, 1.0, 4.4] {
            assert!((f_integral(&sin1, theta, &quad) - 0.5).abs() < 1e-12);
        }
        assert_eq!(f_integral(&FourierField::zero(2), 0.3, &quad), 0.0);
        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        assert!((f_integral(&cos2, 0.0, &quad) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn compute_g_examples() {
        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        let expected = FourierField::from_modes(4, &[(4, -0.8, 0.0)]);
        assert!(sup_diff(&compute_g(&cos2).unwrap(), &expected) < 1e-13);

        let sin1 = FourierField::from_modes(1, &[(1, 0.0, 1.0)]);
        let expected = FourierField::from_modes(2, &[(2, 0.5, 0.0)]);
        assert!(sup_diff(&compute_g(&sin1).unwrap(), &expected) < 1e-14);

        assert_eq!(compute_g(&FourierField::zero(3)).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn transfer_coefficient_examples() {
        // f = 2 cos t has f_1 = f_{-1} = 1, so h_2 = 1 and nothing else
        let f = FourierField::from_modes(3, &[(1, 2.0, 0.0)]);
        let h = transfer_coefficients(&f);
        assert!((h[2] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for (k, v) in h.iter().enumerate() {
            if k != 2 {
                assert!(v.norm() < 1e-15, "h_{k} should vanish");
            }
        }
        assert!(transfer_coefficients(&FourierField::zero(4)).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn transfer_coefficients_synthesize_h_f_prime_hf_prime() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let f = random_mean_zero(&mut rng, 16);
            let n = f.band_limit();
            let h = transfer_coefficients(&f);
            assert!(h[0].norm() < 1e-13);
            assert!(h[1].norm() == 0.0);
            let mut coeffs = vec![Complex64::new(0.0, 0.0); 4 * n + 1];
            for (k, &hk) in h.iter().enumerate().skip(2) {
                coeffs[2 * n + k] = hk;
                coeffs[2 * n - k] = hk.conj();
            }
            let from_h = FourierField::from_coeffs(2 * n, coeffs).unwrap();
            let fp = f.derivative(1).pad_to(2 * n);
            let spectral = fp.multiply(&fp.hilbert()).hilbert();
            assert!(sup_diff(&from_h, &spectral) < 1e-11);
        }
    }

    #[test]
    fn bound_f_examples() {
        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        let r = bound_f(&cos2).unwrap();
        assert!((r.sup_norm - 2.0).abs() < 1e-12);
        assert!((r.bound - (6.0 + 2.0 * PI * PI)).abs() < 1e-12);
        assert!(r.slack >= 0.0);
        assert!(r.growth_constant.is_none());

        let sin1 = FourierField::from_modes(1, &[(1, 0.0, 1.0)]);
        let r = bound_f(&sin1).unwrap();
        assert!((r.sup_norm - 0.5).abs() < 1e-12);
        assert!((r.bound - PI * PI / 2.0).abs() < 1e-12);
        assert!((r.seminorms.h_one_sq - PI).abs() < 1e-12);
        assert_eq!(r.seminorms.h_three_halves_sq, 0.0);

        let r = bound_f(&FourierField::zero(2)).unwrap();
        assert_eq!(r.sup_norm, 0.0);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn bound_g_examples() {
        let cos2 = FourierField::from_modes(2, &[(2, 1.0, 0.0)]);
        let r = bound_g(&cos2).unwrap();
        assert!((r.sup_norm - 0.8).abs() < 1e-12);
        assert!((r.bound - 40.0 * PI * PI).abs() < 1e-10);

        let sin1 = FourierField::from_modes(1, &[(1, 0.0, 1.0)]);
        let r = bound_g(&sin1).unwrap();
        assert!((r.sup_norm - 0.5).abs() < 1e-12);
        assert!((r.bound - 8.0 * PI * PI).abs() < 1e-10);

        let r = bound_g(&FourierField::zero(2)).unwrap();
        assert_eq!(r.slack, 0.0);
    }

    #[test]
    fn bounds_hold_on_random_fields() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        for _ in 0..200 {
            let u = random_mean_zero(&mut rng, 32);
            assert!(bound_f(&u).unwrap().slack >= 0.0);
            assert!(bound_g(&u).unwrap().slack >= 0.0);
        }
    }

    #[test]
    fn certificate_examples() {
        let sin1 = FourierField::from_modes(1, &[(1, 0.0, 1.0)]);
        let cert = certify_blowup(&sin1).unwrap();
        assert!((cert.theta0 - PI).abs() < 1e-9);
        assert!((cert.u0_slope + 1.0).abs() < 1e-9);
        assert!(cert.omega0_value.abs() < 1e-9);

        let cos1 = FourierField::from_modes(1, &[(1, 1.0, 0.0)]);
        let cert = certify_blowup(&cos1).unwrap();
        assert!((cert.theta0 - PI / 2.0).abs() < 1e-9);
        assert!((cert.u0_slope + 1.0).abs() < 1e-9);

        let u0 = FourierField::from_modes(3, &[(2, 0.0, 1.0), (3, 0.5, 0.0)]);
        let cert = certify_blowup(&u0).unwrap();
        assert!(cert.u0_slope < 0.0);
        assert!(cert.omega0_value.abs() < 1e-8);
    }

    #[test]
    fn certificate_on_random_fields() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..500 {
            let u = random_mean_zero(&mut rng, 32);
            let cert = certify_blowup(&u).unwrap();
            assert!(cert.u0_slope < 0.0);
        }
    }
}
