//! Dense complex LU with partial pivoting and a Hager-style 1-norm
//! condition estimate. Sized for the Nystrom systems of the welding module
//! (M <= 1024), where a direct factorization is cheap and reproducible.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct CMatrix {
    n: usize,
    data: Vec<Complex64>, // row-major
}

impl CMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mat_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.n {
            let mut col = 0.0;
            for i in 0..self.n {
                col += self.at(i, j).norm();
            }
            best = best.max(col);
        }
        best
    }

    /// LU factorization with partial pivoting, LAPACK-style ipiv.
    pub fn lu(&self) -> Option<LuFactors> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = a[i * n + k].norm();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                a[i * n + k] = factor;
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= factor * akj;
                }
            }
        }
        Some(LuFactors { n, lu: a, piv })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl LuFactors {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        // L y = P b (unit lower triangle)
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        // U x = y
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^H x = b` (conjugate transpose), used by the norm estimator.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        // U^H w = b (lower triangular, conjugated)
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc / self.lu[i * n + i].conj();
        }
        // L^H v = w (unit upper triangular, conjugated)
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc;
        }
        // x = P^T v: undo the row swaps in reverse
        for k in (0..n).rev() {
            x.swap(k, self.piv[k]);
        }
        x
    }

    /// Hager-style estimate of `||A^{ -1 }||_1`.
    pub fn inverse_one_norm_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut best = 0.0f64;
        for _ in 0..5 {
            let y = self.solve(&x);
            let norm1: f64 = y.iter().map(|c| c.norm()).sum();
            best = best.max(norm1);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|c| {
                    let m = c.norm();
                    if m == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        c / m
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (mut jmax, mut zmax) = (0usize, 0.0f64);
            for (j, c) in z.iter().enumerate() {
                if c.norm() > zmax {
                    zmax = c.norm();
                    jmax = j;
                }
            }
            let zx: f64 = z.iter().zip(x.iter()).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx + 1e-14 {
                break;
            }
            x = vec![Complex64::new(0.0, 0.0); n];
            x[jmax] = Complex64::new(1.0, 0.0);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn solve_random_system() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 17, 64] {
            let a = CMatrix::from_fn(n, |i, j| {
                let diag = if i == j { 4.0 } else { 0.0 };
                Complex64::new(rng.gen_range(-1.0..1.0) + diag, rng.gen_range(-1.0..1.0))
            });
            let x_true: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let b = a.mat_vec(&x_true);
            let lu = a.lu().unwrap();
            let x = lu.solve(&b);
            for (u, v) in x.iter().zip(x_true.iter()) {
                assert!((u - v).norm() < 1e-10);
            }
            // adjoint solve consistency: A^H y = b
            let y = lu.solve_adjoint(&b);
            let ah = CMatrix::from_fn(n, |i, j| a.at(j, i).conj());
            let back = ah.mat_vec(&y);
            for (u, v) in back.iter().zip(b.iter()) {
                assert!((u - v).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn condition_estimate_orders_of_magnitude() {
        // diagonal matrix with spread eps has condition 1/eps
        for eps in [1e-2, 1e-6] {
            let n = 32;
            let a = CMatrix::from_fn(n, |i, j| {
                if i != j {
                    Complex64::new(0.0, 0.0)
                } else if i == 0 {
                    Complex64::new(eps, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            });
            let lu = a.lu().unwrap();
            let est = a.one_norm() * lu.inverse_one_norm_estimate();
            assert!(est > 0.5 / eps && est < 2.0 / eps, "eps={eps} est={est}");
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let a = CMatrix::from_fn(4, |_, j| Complex64::new(j as f64, 0.0));
        assert!(a.lu().is_none());
    }
}
