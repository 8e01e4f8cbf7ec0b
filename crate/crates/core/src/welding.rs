//! Conformal welding of circle diffeomorphisms to plane curves.
//!
//! Given a diffeomorphism `eta`, the boundary values `W(theta)` of the
//! exterior map solve a Fredholm equation of the second kind whose kernel
//! couples the cotangent kernel with its pullback under `eta^{-1}`; the two
//! singularities cancel, so the Nystrom discretization on a uniform grid
//! with trapezoid weights converges spectrally. The interior map's boundary
//! values are `W o eta`, which pins the translation/scale normalization
//! `a_0 = 0`, `a_1 = 1` (conformal radius one at the origin) directly,
//! without a separate Riemann-map construction.
//!
//! The kernel prefactor is `(i/2)` against the rotation-invariant measure
//! `d psi / (2 pi)`; with that normalization the cotangent integral is the
//! circle Hilbert transform and Moebius boundary maps weld to round circles,
//! which is the test that pins the constant. A multiplicative override is
//! exposed for experimentation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::dft;
use crate::error::WeldingError;
use crate::field::{uniform_grid, FourierField};
use crate::linalg::CMatrix;

/// Disc automorphism `z -> e^{i rotation} (z - center) / (1 - conj(center) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub rotation: f64,
    pub center: Complex64,
}

impl MobiusMap {
    pub fn identity() -> Self {
        MobiusMap { rotation: 0.0, center: Complex64::new(0.0, 0.0) }
    }

    pub fn rotation_map(alpha: f64) -> Self {
        MobiusMap { rotation: alpha, center: Complex64::new(0.0, 0.0) }
    }

    pub fn new(rotation: f64, center: Complex64) -> Self {
        assert!(center.norm() < 1.0, "Moebius center must lie inside the disc");
        MobiusMap { rotation, center }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let phase = Complex64::new(libm::cos(self.rotation), libm::sin(self.rotation));
        phase * (z - self.center) / (Complex64::new(1.0, 0.0) - self.center.conj() * z)
    }

    /// Boundary angle of the image of `e^{i theta}` (not lifted).
    pub fn boundary_angle(&self, theta: f64) -> f64 {
        let w = self.apply(Complex64::new(libm::cos(theta), libm::sin(theta)));
        libm::atan2(w.im, w.re)
    }

    /// Derivative of the boundary angle map, the Poisson kernel
    /// `(1 - |a|^2) / |1 - conj(a) e^{i theta}|^2`; strictly positive.
    pub fn boundary_slope(&self, theta: f64) -> f64 {
        let z = Complex64::new(libm::cos(theta), libm::sin(theta));
        let denom = (Complex64::new(1.0, 0.0) - self.center.conj() * z).norm_sqr();
        (1.0 - self.center.norm_sqr()) / denom
    }

    /// The unique disc automorphism carrying `e^{i sources}` to
    /// `e^{i targets}`, via the cross-ratio construction. The triples must
    /// share their cyclic order, otherwise no orientation-preserving
    /// automorphism exists.
    pub fn from_triple(sources: [f64; 3], targets: [f64; 3]) -> Result<Self, WeldingError> {
        if cyclic_orientation(&sources) != cyclic_orientation(&targets) {
            return Err(WeldingError::OrderMismatch);
        }
        let z: Vec<Complex64> =
            sources.iter().map(|&t| Complex64::new(libm::cos(t), libm::sin(t))).collect();
        let w: Vec<Complex64> =
            targets.iter().map(|&t| Complex64::new(libm::cos(t), libm::sin(t))).collect();
        // maps sending each triple to (0, 1, infinity)
        let mz = triple_to_standard(&z);
        let mw = triple_to_standard(&w);
        let phi = compose(invert2x2(mw), mz);
        // extract (rotation, center) from phi(0) and phi'(0)
        let (a, b, c, d) = (phi[0], phi[1], phi[2], phi[3]);
        let value0 = b / d;
        let deriv0 = (a * d - b * c) / (d * d);
        let rotation = libm::atan2(deriv0.im, deriv0.re);
        let phase = Complex64::new(libm::cos(rotation), libm::sin(rotation));
        let center = -value0 / phase;
        if center.norm() >= 1.0 {
            return Err(WeldingError::OrderMismatch);
        }
        let map = MobiusMap { rotation, center };
        // the construction is exact up to roundoff; anything worse means
        // the triples were degenerate
        for (s, t) in sources.iter().zip(targets.iter()) {
            let img = map.apply(Complex64::new(libm::cos(*s), libm::sin(*s)));
            let want = Complex64::new(libm::cos(*t), libm::sin(*t));
            if (img - want).norm() > 1e-9 {
                return Err(WeldingError::OrderMismatch);
            }
        }
        Ok(map)
    }
}

fn cyclic_orientation(t: &[f64; 3]) -> bool {
    let two_pi = 2.0 * PI;
    let d1 = (t[1] - t[0]) - two_pi * libm::floor((t[1] - t[0]) / two_pi);
    let d2 = (t[2] - t[0]) - two_pi * libm::floor((t[2] - t[0]) / two_pi);
    d1 < d2
}

/// Matrix of the Moebius map sending (z1, z2, z3) to (0, 1, infinity).
fn triple_to_standard(z: &[Complex64]) -> [Complex64; 4] {
    [z[1] - z[2], -z[0] * (z[1] - z[2]), z[1] - z[0], -z[2] * (z[1] - z[0])]
}

fn invert2x2(m: [Complex64; 4]) -> [Complex64; 4] {
    [m[3], -m[1], -m[2], m[0]]
}

fn compose(m: [Complex64; 4], n: [Complex64; 4]) -> [Complex64; 4] {
    [
        m[0] * n[0] + m[1] * n[2],
        m[0] * n[1] + m[1] * n[3],
        m[2] * n[0] + m[3] * n[2],
        m[2] * n[1] + m[3] * n[3],
    ]
}

/// Uniform samples of a circle diffeomorphism and its derivative. `eta`
/// holds the lift: strictly increasing with `eta(theta + 2 pi) = eta + 2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffeo {
    pub grid: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_prime: Vec<f64>,
}

impl CircleDiffeo {
    pub fn identity(points: usize) -> Self {
        let grid = uniform_grid(points);
        CircleDiffeo { eta: grid.clone(), eta_prime: vec![1.0; points], grid }
    }

    pub fn rotation(points: usize, alpha: f64) -> Self {
        let grid = uniform_grid(points);
        CircleDiffeo {
            eta: grid.iter().map(|&t| t + alpha).collect(),
            eta_prime: vec![1.0; points],
            grid,
        }
    }

    /// Wraps lifted samples, validating monotonicity and slope positivity.
    pub fn from_samples(eta: Vec<f64>, eta_prime: Vec<f64>) -> Result<Self, WeldingError> {
        assert_eq!(eta.len(), eta_prime.len());
        let m = eta.len();
        assert!(m >= 4, "need at least 4 samples");
        for j in 0..m {
            let next = if j + 1 < m { eta[j + 1] } else { eta[0] + 2.0 * PI };
            if next <= eta[j] {
                return Err(WeldingError::SlopeCollapse { min_slope: next - eta[j], floor: 0.0 });
            }
        }
        let min_slope = eta_prime.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min_slope <= 0.0 {
            return Err(WeldingError::SlopeCollapse { min_slope, floor: 0.0 });
        }
        Ok(CircleDiffeo { grid: uniform_grid(m), eta, eta_prime })
    }

    /// View of a Lagrangian flow snapshot as a welding input.
    pub fn from_flow(flow: &crate::dynamics::LagrangianState) -> Result<Self, WeldingError> {
        Self::from_samples(flow.eta.clone(), flow.eta_theta.clone())
    }

    /// Boundary map of a disc automorphism, lifted so `eta(0) in [0, 2 pi)`.
    pub fn from_mobius(map: &MobiusMap, points: usize) -> Self {
        let grid = uniform_grid(points);
        let mut eta = Vec::with_capacity(points);
        let mut prev = 0.0;
        for (j, &t) in grid.iter().enumerate() {
            let mut a = map.boundary_angle(t);
            if j == 0 {
                a -= 2.0 * PI * libm::floor(a / (2.0 * PI));
            } else {
                while a < prev {
                    a += 2.0 * PI;
                }
            }
            prev = a;
            eta.push(a);
        }
        let eta_prime = grid.iter().map(|&t| map.boundary_slope(t)).collect();
        CircleDiffeo { grid, eta, eta_prime }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn min_slope(&self) -> f64 {
        self.eta_prime.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Spectral interpolants of the periodic parts `eta - id` and `eta'`.
    fn interpolants(&self) -> (FourierField, FourierField) {
        let m = self.len();
        let band = m / 2 - 1;
        let periodic: Vec<f64> = self.eta.iter().zip(self.grid.iter()).map(|(e, t)| e - t).collect();
        let displacement = FourierField::from_samples(band, &periodic).expect("finite samples");
        let slope = FourierField::from_samples(band, &self.eta_prime).expect("finite samples");
        (displacement, slope)
    }
}

/// Knobs of the welding pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeldingOptions {
    /// Multiplier on the default kernel prefactor `i / (4 pi)` (that is,
    /// `(i/2)` against `d psi / 2 pi`). Left at 1.0 unless experimenting
    /// with the normalization.
    pub kernel_prefactor_scale: f64,
    /// Reject solves whose 1-norm condition estimate exceeds this.
    pub condition_limit: f64,
    /// Refuse diffeomorphisms whose slope falls to this floor.
    pub slope_floor: f64,
    /// Gate on the negative-mode energy fraction of the interior boundary
    /// values.
    pub holomorphy_tol: f64,
    /// Acceptable composition residual of the numerical inverse.
    pub inverse_residual_tol: f64,
}

impl Default for WeldingOptions {
    fn default() -> Self {
        WeldingOptions {
            kernel_prefactor_scale: 1.0,
            condition_limit: 1e12,
            slope_floor: 1e-6,
            holomorphy_tol: 1e-6,
            inverse_residual_tol: 1e-9,
        }
    }
}

/// Boundary values of the exterior map together with the solve residual.
#[derive(Debug, Clone)]
pub struct WeldingSolution {
    pub boundary: Vec<Complex64>,
    pub diffeo: CircleDiffeo,
    /// Max-norm residual of `(I + K) W - e^{i theta}` at the grid nodes.
    pub residual: f64,
}

/// Interior-map coefficients recovered from `W o eta`.
#[derive(Debug, Clone)]
pub struct InteriorExpansion {
    /// `a_n` for `n = 0, 1, ...`; the interior map is `sum a_n z^n`.
    pub coeffs: Vec<Complex64>,
    /// Energy fraction on negative modes, the holomorphy defect.
    pub negative_mode_fraction: f64,
}

/// A welded curve normalized to conformal radius one about the origin.
#[derive(Debug, Clone)]
pub struct NormalizedCurve {
    pub points: Vec<Complex64>,
    /// Interior coefficients after normalization (`a_0 = 0`, `a_1 = 1`).
    pub coefficients: Vec<Complex64>,
    /// Translation `a_0` removed from the raw curve.
    pub translation: Complex64,
    /// Scale/rotation `a_1` divided out of the raw curve.
    pub scale: Complex64,
}

/// Numerical inverse of a circle diffeomorphism on the uniform grid:
/// monotone bracketing plus Newton on the lift. The derivative samples are
/// `1 / eta'(eta^{-1})`.
pub fn invert_circle_diffeo(
    eta: &CircleDiffeo,
    opts: &WeldingOptions,
) -> Result<CircleDiffeo, WeldingError> {
    let min_slope = eta.min_slope();
    if min_slope <= opts.slope_floor {
        return Err(WeldingError::SlopeCollapse { min_slope, floor: opts.slope_floor });
    }
    let m = eta.len();
    let (disp, slope) = eta.interpolants();
    let eval_eta = |x: f64| x + disp.evaluate_one(x);
    let eval_slope = |x: f64| slope.evaluate_one(x);

    let base = eta.eta[0];
    let two_pi = 2.0 * PI;
    let mut inv = Vec::with_capacity(m);
    let mut inv_prime = Vec::with_capacity(m);
    let mut worst = 0.0f64;
    for j in 0..m {
        let psi = eta.grid[j];
        // shift the target into the principal range of the lift
        let shift = libm::ceil((base - psi) / two_pi);
        let target = psi + two_pi * shift;
        // bracket by the stored samples (sentinel closes the period)
        let mut lo = 0usize;
        let mut hi = m; // cell index: eta[k] .. eta[k+1] with sentinel
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let v = if mid < m { eta.eta[mid] } else { base + two_pi };
            if v <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut a = eta.grid[lo];
        let mut b = if hi < m { eta.grid[hi] } else { two_pi };
        let mut x = 0.5 * (a + b);
        for _ in 0..60 {
            let fx = eval_eta(x) - target;
            if libm::fabs(fx) < 1e-14 {
                break;
            }
            if fx > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = eval_slope(x);
            let mut next = x - fx / d;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if libm::fabs(next - x) < 1e-15 {
                x = next;
                break;
            }
            x = next;
        }
        let residual = libm::fabs(eval_eta(x) - target);
        worst = worst.max(residual);
        inv.push(x - two_pi * shift);
        inv_prime.push(1.0 / eval_slope(x));
    }
    if worst > opts.inverse_residual_tol {
        return Err(WeldingError::InverseDiverged { residual: worst });
    }
    Ok(CircleDiffeo { grid: eta.grid.clone(), eta: inv, eta_prime: inv_prime })
}

/// The smooth welding kernel sample `cot((theta-psi)/2) -
/// a'(psi) cot((a(theta)-a(psi))/2)` with `a = eta^{-1}`; at the diagonal
/// the cancellation leaves the limit `a''/a'`.
fn kernel_bracket(inv: &CircleDiffeo, inv_second: &[f64], j: usize, k: usize) -> f64 {
    if j == k {
        return inv_second[j] / inv.eta_prime[j];
    }
    let t = 0.5 * (inv.grid[j] - inv.grid[k]);
    let s = 0.5 * (inv.eta[j] - inv.eta[k]);
    libm::cos(t) / libm::sin(t) - inv.eta_prime[k] * libm::cos(s) / libm::sin(s)
}

fn second_derivative_samples(inv: &CircleDiffeo) -> Vec<f64> {
    let band = inv.len() / 2 - 1;
    FourierField::from_samples(band, &inv.eta_prime)
        .expect("finite slopes")
        .derivative(1)
        .sample_values(inv.len())
}

/// Nystrom matrix of the welding kernel `K` with uniform trapezoid weights.
pub fn welding_matrix(eta: &CircleDiffeo, opts: &WeldingOptions) -> Result<CMatrixView, WeldingError> {
    let inv = invert_circle_diffeo(eta, opts)?;
    Ok(assemble_kernel(&inv, opts))
}

/// Dense complex matrix wrapper so callers outside the crate can inspect
/// entries without depending on the internal linear algebra type.
pub struct CMatrixView {
    pub(crate) matrix: CMatrix,
}

impl CMatrixView {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.at(i, j)
    }
}

fn assemble_kernel(inv: &CircleDiffeo, opts: &WeldingOptions) -> CMatrixView {
    let m = inv.len();
    let inv_second = second_derivative_samples(inv);
    // (i/2) * (1/2pi) * (2pi/M) = i / (2M)
    let pref = Complex64::new(0.0, opts.kernel_prefactor_scale / (2.0 * m as f64));
    let matrix = CMatrix::from_fn(m, |j, k| pref * kernel_bracket(inv, &inv_second, j, k));
    CMatrixView { matrix }
}

/// Solves `(I + K) W = e^{i theta}` by dense LU; the condition estimate
/// guards against welding a diffeomorphism too close to breaking for the
/// grid.
pub fn solve_welding(
    eta: &CircleDiffeo,
    opts: &WeldingOptions,
) -> Result<WeldingSolution, WeldingError> {
    let inv = invert_circle_diffeo(eta, opts)?;
    let kernel = assemble_kernel(&inv, opts);
    let m = eta.len();
    let a = CMatrix::from_fn(m, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        id + kernel.matrix.at(i, j)
    });
    let lu = a.lu().ok_or(WeldingError::SingularMatrix)?;
    let estimate = a.one_norm() * lu.inverse_one_norm_estimate();
    if estimate > opts.condition_limit {
        return Err(WeldingError::IllConditioned { estimate, limit: opts.condition_limit });
    }
    let rhs: Vec<Complex64> =
        eta.grid.iter().map(|&t| Complex64::new(libm::cos(t), libm::sin(t))).collect();
    let w = lu.solve(&rhs);
    let residual = a
        .mat_vec(&w)
        .iter()
        .zip(rhs.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max);
    Ok(WeldingSolution { boundary: w, diffeo: eta.clone(), residual })
}

fn complex_interp_eval(coeffs: &[Complex64], band: usize, x: f64) -> Complex64 {
    let z = Complex64::new(libm::cos(x), libm::sin(x));
    let zc = z.conj();
    let mut acc = coeffs[band]; // n = 0
    let mut zp = Complex64::new(1.0, 0.0);
    let mut zm = Complex64::new(1.0, 0.0);
    for n in 1..=band {
        zp *= z;
        zm *= zc;
        acc += coeffs[band + n] * zp + coeffs[band - n] * zm;
    }
    acc
}

/// Fourier coefficients of the interior boundary values `W o eta`,
/// evaluated by trigonometric interpolation of `W` at the warped nodes.
/// Negative-mode energy beyond the gate means the welding (or its
/// discretization) failed to produce a holomorphic interior map.
pub fn interior_coefficients(
    sol: &WeldingSolution,
    opts: &WeldingOptions,
) -> Result<InteriorExpansion, WeldingError> {
    let m = sol.boundary.len();
    let band = m / 2 - 1;
    let w_hat = dft::analyze(&sol.boundary, band);
    let v: Vec<Complex64> =
        sol.diffeo.eta.iter().map(|&t| complex_interp_eval(&w_hat, band, t)).collect();
    let v_hat = dft::analyze(&v, band);
    let total: f64 = v_hat.iter().map(|c| c.norm_sqr()).sum();
    let negative: f64 = v_hat[..band].iter().map(|c| c.norm_sqr()).sum();
    let fraction = if total == 0.0 { 0.0 } else { negative / total };
    if fraction > opts.holomorphy_tol {
        return Err(WeldingError::HolomorphyViolation { fraction, tolerance: opts.holomorphy_tol });
    }
    Ok(InteriorExpansion { coeffs: v_hat[band..].to_vec(), negative_mode_fraction: fraction })
}

/// Normalizes the curve to `a_0 = 0`, `a_1 = 1`: the interior map fixes the
/// origin with conformal radius one.
pub fn normalize_curve(
    sol: &WeldingSolution,
    interior: &InteriorExpansion,
) -> Result<NormalizedCurve, WeldingError> {
    let a0 = interior.coeffs[0];
    let a1 = interior.coeffs[1];
    if a1.norm() < 1e-10 {
        return Err(WeldingError::DegenerateScale { magnitude: a1.norm() });
    }
    let points: Vec<Complex64> = sol.boundary.iter().map(|&w| (w - a0) / a1).collect();
    let mut coefficients: Vec<Complex64> = interior.coeffs.iter().map(|&c| c / a1).collect();
    coefficients[0] = Complex64::new(0.0, 0.0);
    coefficients[1] = Complex64::new(1.0, 0.0);
    Ok(NormalizedCurve { points, coefficients, translation: a0, scale: a1 })
}

/// Round-trip defect: rebuilds the exterior boundary from the normalized
/// curve, re-checks the kernel equation *between* the solve nodes (where
/// the Nystrom system enforced nothing, so interpolation and quadrature
/// error show up), and re-measures the holomorphy defect of the rebuilt
/// interior values; returns the larger of the two.
pub fn welding_residual(
    curve: &NormalizedCurve,
    eta: &CircleDiffeo,
    opts: &WeldingOptions,
) -> Result<f64, WeldingError> {
    let m = curve.points.len();
    assert_eq!(m, eta.len(), "curve and diffeo grids must match");
    let w_rebuilt: Vec<Complex64> =
        curve.points.iter().map(|&p| p * curve.scale + curve.translation).collect();

    let inv = invert_circle_diffeo(eta, opts)?;
    let (inv_disp, _) = inv.interpolants();
    let band = m / 2 - 1;
    let w_hat = dft::analyze(&w_rebuilt, band);
    let pref = Complex64::new(0.0, opts.kernel_prefactor_scale / (2.0 * m as f64));
    let h = PI / m as f64; // half a grid cell
    let mut equation_residual = 0.0f64;
    for j in 0..m {
        let theta = eta.grid[j] + h;
        let a_theta = theta + inv_disp.evaluate_one(theta);
        let mut k_val = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let t = 0.5 * (theta - inv.grid[k]);
            let s = 0.5 * (a_theta - inv.eta[k]);
            let bracket =
                libm::cos(t) / libm::sin(t) - inv.eta_prime[k] * libm::cos(s) / libm::sin(s);
            k_val += w_rebuilt[k] * bracket;
        }
        let lhs = complex_interp_eval(&w_hat, band, theta) + pref * k_val;
        let rhs = Complex64::new(libm::cos(theta), libm::sin(theta));
        equation_residual = equation_residual.max((lhs - rhs).norm());
    }

    let c_hat = dft::analyze(&curve.points, band);
    let v: Vec<Complex64> = eta.eta.iter().map(|&t| complex_interp_eval(&c_hat, band, t)).collect();
    let v_hat = dft::analyze(&v, band);
    let total: f64 = v_hat.iter().map(|c| c.norm_sqr()).sum();
    let negative: f64 = v_hat[..band].iter().map(|c| c.norm_sqr()).sum();
    let holomorphy_defect = if total == 0.0 { 0.0 } else { negative / total };

    Ok(equation_residual.max(holomorphy_defect))
}

/// Max deviation of the points from their best-fit circle (centroid
/// center); zero for an exact circle sampled at the Fourier nodes.
pub fn circle_deviation(points: &[Complex64]) -> f64 {
    let n = points.len() as f64;
    let center = points.iter().sum::<Complex64>() / n;
    let radii: Vec<f64> = points.iter().map(|p| (p - center).norm()).collect();
    let mean = radii.iter().sum::<f64>() / n;
    radii.iter().map(|r| libm::fabs(r - mean)).fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle_deviation(points: &[Complex64]) -> f64 {
        points.iter().map(|p| libm::fabs(p.norm() - 1.0)).fold(0.0f64, f64::max)
    }

    #[test]
    fn identity_welds_to_unit_circle() {
        let eta = CircleDiffeo::identity(64);
        let opts = WeldingOptions::default();
        let sol = solve_welding(&eta, &opts).unwrap();
        assert!(sol.residual < 1e-12);
        for (j, &t) in eta.grid.iter().enumerate() {
            let want = Complex64::new(t.cos(), t.sin());
            assert!((sol.boundary[j] - want).norm() < 1e-12);
        }
        let interior = interior_coefficients(&sol, &opts).unwrap();
        assert!(interior.negative_mode_fraction < 1e-20);
        assert!((interior.coeffs[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(interior.coeffs[0].norm() < 1e-12);
        for c in &interior.coeffs[2..] {
            assert!(c.norm() < 1e-12);
        }
        let curve = normalize_curve(&sol, &interior).unwrap();
        assert!(unit_circle_deviation(&curve.points) < 1e-12);
        let defect = welding_residual(&curve, &eta, &opts).unwrap();
        assert!(defect < 1e-12);
    }

    #[test]
    fn rotation_welds_to_unit_circle() {
        let eta = CircleDiffeo::rotation(64, 0.8);
        let opts = WeldingOptions::default();
        let sol = solve_welding(&eta, &opts).unwrap();
        for (j, &t) in eta.grid.iter().enumerate() {
            let want = Complex64::new(t.cos(), t.sin());
            assert!((sol.boundary[j] - want).norm() < 1e-12, "node {j}");
        }
        let interior = interior_coefficients(&sol, &opts).unwrap();
        // a_1 picks up the rotation phase
        let want = Complex64::new(0.8f64.cos(), 0.8f64.sin());
        assert!((interior.coeffs[1] - want).norm() < 1e-12);
        let curve = normalize_curve(&sol, &interior).unwrap();
        assert!(unit_circle_deviation(&curve.points) < 1e-12);
    }

    #[test]
    fn mobius_welds_to_a_circle() {
        // the T(1) statement: PSL2 boundary maps are the kernel of the
        // welding; this is also the test that pins the kernel constant
        let map = MobiusMap::new(0.4, Complex64::new(0.3, -0.2));
        let eta = CircleDiffeo::from_mobius(&map, 512);
        let opts = WeldingOptions::default();
        let sol = solve_welding(&eta, &opts).unwrap();
        let interior = interior_coefficients(&sol, &opts).unwrap();
        let curve = normalize_curve(&sol, &interior).unwrap();
        assert!(circle_deviation(&curve.points) < 1e-6, "deviation {}", circle_deviation(&curve.points));
    }

    #[test]
    fn wrong_prefactor_breaks_interior_holomorphy() {
        // Moebius weldings stay circular under any kernel scale (the
        // constant solution family absorbs it), so the normalization is
        // pinned by the holomorphy of a nontrivial welding instead:
        // reading the paper's integral against plain d psi (scale 2 pi)
        // leaves O(1) energy on negative interior modes
        let grid = uniform_grid(256);
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| t + 0.1 * (2.0 * t).sin()).collect(),
            grid.iter().map(|&t| 1.0 + 0.2 * (2.0 * t).cos()).collect(),
        )
        .unwrap();
        let mut opts = WeldingOptions::default();
        let sol = solve_welding(&eta, &opts).unwrap();
        assert!(
            interior_coefficients(&sol, &opts).unwrap().negative_mode_fraction < 1e-12
        );
        opts.kernel_prefactor_scale = 2.0 * PI;
        let sol = solve_welding(&eta, &opts).unwrap();
        match interior_coefficients(&sol, &opts) {
            Err(WeldingError::HolomorphyViolation { fraction, .. }) => assert!(fraction > 1e-3),
            Ok(interior) => panic!(
                "mis-scaled kernel passed the gate: fraction {}",
                interior.negative_mode_fraction
            ),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn invert_diffeo_examples() {
        let opts = WeldingOptions::default();
        // identity inverts to identity
        let id = CircleDiffeo::identity(64);
        let inv = invert_circle_diffeo(&id, &opts).unwrap();
        for (a, b) in inv.eta.iter().zip(id.grid.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // rotation inverts to the opposite rotation
        let rot = CircleDiffeo::rotation(64, 0.5);
        let inv = invert_circle_diffeo(&rot, &opts).unwrap();
        for (a, &t) in inv.eta.iter().zip(rot.grid.iter()) {
            assert!((a - (t - 0.5)).abs() < 1e-12);
        }
        // smooth perturbation: composition residual at machine precision
        let m = 512;
        let grid = uniform_grid(m);
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| t + 0.1 * t.sin()).collect(),
            grid.iter().map(|&t| 1.0 + 0.1 * t.cos()).collect(),
        )
        .unwrap();
        let inv = invert_circle_diffeo(&eta, &opts).unwrap();
        let worst = grid
            .iter()
            .zip(inv.eta.iter())
            .map(|(&psi, &x)| {
                let composed = x + 0.1 * x.sin();
                (composed - psi).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "composition residual {worst}");
        // derivative relation (eta^{-1})' = 1 / eta'(eta^{-1})
        for (&x, &d) in inv.eta.iter().zip(inv.eta_prime.iter()) {
            assert!((d - 1.0 / (1.0 + 0.1 * x.cos())).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_floor_refuses_near_broken_flows() {
        let m = 64;
        let grid = uniform_grid(m);
        // slope dips to 0.005 at theta = pi
        let eta: Vec<f64> = grid.iter().map(|&t| t + 0.995 * t.sin()).collect();
        let eta_prime: Vec<f64> = grid.iter().map(|&t| 1.0 + 0.995 * t.cos()).collect();
        let diffeo = CircleDiffeo::from_samples(eta, eta_prime).unwrap();
        let mut opts = WeldingOptions::default();
        opts.slope_floor = 0.01;
        assert!(matches!(
            invert_circle_diffeo(&diffeo, &opts),
            Err(WeldingError::SlopeCollapse { .. })
        ));
    }

    #[test]
    fn kernel_diagonal_matches_offdiagonal_extrapolation() {
        // Richardson oracle for the diagonal limit: averaging the bracket
        // at psi = theta +- eps cancels the odd term, leaving the limit
        // up to O(eps^2)
        let m = 256;
        let grid = uniform_grid(m);
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| t + 0.1 * t.sin()).collect(),
            grid.iter().map(|&t| 1.0 + 0.1 * t.cos()).collect(),
        )
        .unwrap();
        let opts = WeldingOptions::default();
        let inv = invert_circle_diffeo(&eta, &opts).unwrap();
        let inv_second = second_derivative_samples(&inv);
        let (disp, slope) = inv.interpolants();
        let a = |x: f64| x + disp.evaluate_one(x);
        let ap = |x: f64| slope.evaluate_one(x);
        let eps = 1e-4;
        for &j in &[0usize, 31, 97, 200] {
            let theta = inv.grid[j];
            let bracket = |psi: f64| {
                let t = 0.5 * (theta - psi);
                let s = 0.5 * (a(theta) - a(psi));
                t.cos() / t.sin() - ap(psi) * s.cos() / s.sin()
            };
            let extrapolated = 0.5 * (bracket(theta + eps) + bracket(theta - eps));
            let diagonal = inv_second[j] / inv.eta_prime[j];
            assert!(
                (extrapolated - diagonal).abs() < 1e-6,
                "node {j}: {extrapolated} vs {diagonal}"
            );
        }
    }

    #[test]
    fn interior_holomorphy_at_resolution() {
        // the gentle criterion map is fully converged by M = 128; the
        // negative-mode fraction sits at roundoff from there on
        let opts = WeldingOptions::default();
        let fraction_at = |m: usize| -> f64 {
            let grid = uniform_grid(m);
            let eta = CircleDiffeo::from_samples(
                grid.iter().map(|&t| t + 0.1 * (2.0 * t).sin()).collect(),
                grid.iter().map(|&t| 1.0 + 0.2 * (2.0 * t).cos()).collect(),
            )
            .unwrap();
            let sol = solve_welding(&eta, &opts).unwrap();
            interior_coefficients(&sol, &opts).unwrap().negative_mode_fraction
        };
        assert!(fraction_at(512) < 1e-8);
        assert!(fraction_at(128) < 1e-8);
    }

    #[test]
    fn round_trip_residual_decreases_under_refinement() {
        // a steep diffeomorphism keeps the discretization error visible
        // through M = 512, so the decrease is strict
        let opts = WeldingOptions { holomorphy_tol: 1.0, ..WeldingOptions::default() };
        let defect_at = |m: usize| -> f64 {
            let grid = uniform_grid(m);
            let eta = CircleDiffeo::from_samples(
                grid.iter().map(|&t| t + 0.45 * (2.0 * t).sin()).collect(),
                grid.iter().map(|&t| 1.0 + 0.9 * (2.0 * t).cos()).collect(),
            )
            .unwrap();
            let sol = solve_welding(&eta, &opts).unwrap();
            let interior = interior_coefficients(&sol, &opts).unwrap();
            let curve = normalize_curve(&sol, &interior).unwrap();
            welding_residual(&curve, &eta, &opts).unwrap()
        };
        let d128 = defect_at(128);
        let d256 = defect_at(256);
        let d512 = defect_at(512);
        assert!(d256 < d128 && d512 < d256, "defects {d128} {d256} {d512}");
        // the gentle criterion map is already at the roundoff floor
        let gentle = |m: usize| -> f64 {
            let grid = uniform_grid(m);
            let eta = CircleDiffeo::from_samples(
                grid.iter().map(|&t| t + 0.1 * (2.0 * t).sin()).collect(),
                grid.iter().map(|&t| 1.0 + 0.2 * (2.0 * t).cos()).collect(),
            )
            .unwrap();
            let sol = solve_welding(&eta, &opts).unwrap();
            let interior = interior_coefficients(&sol, &opts).unwrap();
            let curve = normalize_curve(&sol, &interior).unwrap();
            welding_residual(&curve, &eta, &opts).unwrap()
        };
        assert!(gentle(512) < 1e-10);
    }

    #[test]
    fn normalization_undoes_translation_and_scale() {
        let opts = WeldingOptions::default();
        let grid = uniform_grid(128);
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| t + 0.1 * (2.0 * t).sin()).collect(),
            grid.iter().map(|&t| 1.0 + 0.2 * (2.0 * t).cos()).collect(),
        )
        .unwrap();
        let sol = solve_welding(&eta, &opts).unwrap();
        let interior = interior_coefficients(&sol, &opts).unwrap();
        let base = normalize_curve(&sol, &interior).unwrap();

        // translate and scale the raw boundary; the normalized curve is
        // unchanged because a_0 and a_1 transform the same way
        let shift = Complex64::new(0.7, -0.3);
        let factor = Complex64::new(1.8, 0.0);
        let moved = WeldingSolution {
            boundary: sol.boundary.iter().map(|&w| w * factor + shift).collect(),
            diffeo: sol.diffeo.clone(),
            residual: sol.residual,
        };
        let interior2 = InteriorExpansion {
            coeffs: {
                let mut c: Vec<Complex64> =
                    interior.coeffs.iter().map(|&x| x * factor).collect();
                c[0] += shift;
                c
            },
            negative_mode_fraction: interior.negative_mode_fraction,
        };
        let renorm = normalize_curve(&moved, &interior2).unwrap();
        for (a, b) in renorm.points.iter().zip(base.points.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rotation_equivariance_of_the_normalized_curve() {
        // precomposing the welded curve's diffeo with a grid rotation
        // reparametrizes the boundary; the normalized point set agrees
        let opts = WeldingOptions::default();
        let m = 128;
        let grid = uniform_grid(m);
        let eta_fn = |t: f64| t + 0.1 * (2.0 * t).sin();
        let eta_prime_fn = |t: f64| 1.0 + 0.2 * (2.0 * t).cos();
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| eta_fn(t)).collect(),
            grid.iter().map(|&t| eta_prime_fn(t)).collect(),
        )
        .unwrap();
        // left rotation by a grid multiple: eta2 = eta + alpha
        let shift_steps = 16usize;
        let alpha = 2.0 * PI * shift_steps as f64 / m as f64;
        let eta2 = CircleDiffeo::from_samples(
            grid.iter().map(|&t| eta_fn(t) + alpha).collect(),
            grid.iter().map(|&t| eta_prime_fn(t)).collect(),
        )
        .unwrap();

        let curve = |e: &CircleDiffeo| {
            let sol = solve_welding(e, &opts).unwrap();
            let interior = interior_coefficients(&sol, &opts).unwrap();
            normalize_curve(&sol, &interior).unwrap()
        };
        let c1 = curve(&eta);
        let c2 = curve(&eta2);
        // the boundary samples shift by the rotation steps
        for j in 0..m {
            let k = (j + m - shift_steps) % m;
            assert!((c2.points[j] - c1.points[k]).norm() < 1e-8, "node {j}");
        }
    }

    #[test]
    fn mobius_from_triple_examples() {
        // identical triples give the identity
        let t = [0.3, 1.9, 4.0];
        let map = MobiusMap::from_triple(t, t).unwrap();
        assert!(map.center.norm() < 1e-12);
        assert!(map.rotation.abs() < 1e-12);

        // offset triples give a rotation
        let s = [0.3, 1.9, 4.0];
        let t = [1.0, 2.6, 4.7];
        let map = MobiusMap::from_triple(s, t).unwrap();
        assert!(map.center.norm() < 1e-12);
        assert!((map.rotation - 0.7).abs() < 1e-12);

        // generic triples interpolate to roundoff
        let s = [0.0, PI / 2.0, PI];
        let t = [0.1, 1.7, 3.2];
        let map = MobiusMap::from_triple(s, t).unwrap();
        for (a, b) in s.iter().zip(t.iter()) {
            let img = map.apply(Complex64::new(a.cos(), a.sin()));
            let want = Complex64::new(b.cos(), b.sin());
            assert!((img - want).norm() < 1e-12);
        }

        // swapped order has no orientation-preserving automorphism
        let bad = [3.2, 1.7, 0.1];
        assert!(matches!(MobiusMap::from_triple(s, bad), Err(WeldingError::OrderMismatch)));
    }

    #[test]
    fn welding_matrix_is_zero_for_identity_and_rotation() {
        let opts = WeldingOptions::default();
        for eta in [CircleDiffeo::identity(32), CircleDiffeo::rotation(32, 1.1)] {
            let k = welding_matrix(&eta, &opts).unwrap();
            for i in 0..k.n() {
                for j in 0..k.n() {
                    assert!(k.entry(i, j).norm() < 1e-10, "entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn deterministic_solutions() {
        let grid = uniform_grid(64);
        let eta = CircleDiffeo::from_samples(
            grid.iter().map(|&t| t + 0.1 * (2.0 * t).sin()).collect(),
            grid.iter().map(|&t| 1.0 + 0.2 * (2.0 * t).cos()).collect(),
        )
        .unwrap();
        let opts = WeldingOptions::default();
        let a = solve_welding(&eta, &opts).unwrap();
        let b = solve_welding(&eta, &opts).unwrap();
        assert_eq!(a.boundary, b.boundary);
        assert_eq!(a.residual, b.residual);
    }
}
