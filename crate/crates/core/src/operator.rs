//! Inertia operators: Fourier-multiplier symbols with declared kernel modes.
//!
//! `Wunsch` uses `|n|`, `Ewp` uses `|n|(n^2 - 1)` and `Clm` shares the `|n|`
//! symbol for its velocity relation. The symbols vanish exactly on the kernel
//! modes, so inversion is gated: kernel-mode energy above tolerance means the
//! dynamics left the quotient.

use crate::error::SpectralError;
use crate::field::FourierField;
use crate::DEFAULT_GATE_TOL;
use num_complex::Complex64;

/// Which geodesic equation the operator selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Wunsch,
    Ewp,
    Clm,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Wunsch => "wunsch",
            OperatorKind::Ewp => "ewp",
            OperatorKind::Clm => "clm",
        }
    }
}

/// A symmetric positive semi-definite Fourier multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InertiaOperator {
    kind: OperatorKind,
}

impl InertiaOperator {
    pub fn new(kind: OperatorKind) -> Self {
        InertiaOperator { kind }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Multiplier value at mode `n`; even and nonnegative, zero exactly on
    /// the kernel modes.
    pub fn symbol(&self, n: i64) -> f64 {
        let a = n.unsigned_abs() as f64;
        match self.kind {
            OperatorKind::Wunsch | OperatorKind::Clm => a,
            OperatorKind::Ewp => a * (a * a - 1.0),
        }
    }

    /// Modes on which the symbol vanishes.
    pub fn kernel_modes(&self) -> &'static [i64] {
        match self.kind {
            OperatorKind::Wunsch | OperatorKind::Clm => &[0],
            OperatorKind::Ewp => &[-1, 0, 1],
        }
    }

    /// `m = Lambda u`.
    pub fn apply(&self, u: &FourierField) -> FourierField {
        u.map_multiplier(|n| Complex64::new(self.symbol(n), 0.0))
    }

    /// Recovers `u` from `m = Lambda u`, zeroing the kernel modes, with the
    /// default contamination gate.
    pub fn invert(&self, m: &FourierField) -> Result<FourierField, SpectralError> {
        self.invert_with_tol(m, DEFAULT_GATE_TOL)
    }

    /// As [`invert`](Self::invert) with an explicit relative tolerance.
    pub fn invert_with_tol(
        &self,
        m: &FourierField,
        tol: f64,
    ) -> Result<FourierField, SpectralError> {
        let threshold = tol * m.max_abs_coeff();
        for &k in self.kernel_modes() {
            let mag = m.coeff(k).norm();
            if mag > threshold {
                return Err(SpectralError::KernelContamination { mode: k, magnitude: mag, threshold });
            }
        }
        Ok(m.map_multiplier(|n| {
            let s = self.symbol(n);
            if s == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / s, 0.0)
            }
        }))
    }

    /// Projects onto the quotient representative: kernel-mode coefficients
    /// are zeroed, everything else is unchanged.
    pub fn project_representative(&self, u: &FourierField) -> FourierField {
        u.zero_modes(self.kernel_modes())
    }
}

/// Inverse of `(1 + d^2/dtheta^2)` restricted to the orthogonal complement
/// of `span{1, sin, cos}`: divides mode `n` by `1 - n^2` for `|n| >= 2` and
/// zeroes modes `0, +-1`. Input energy on those modes above tolerance is a
/// resonance error.
pub fn helmholtz_inverse_restricted(
    f: &FourierField,
    tol: f64,
) -> Result<FourierField, SpectralError> {
    let threshold = tol * f.max_abs_coeff();
    for k in [-1i64, 0, 1] {
        let mag = f.coeff(k).norm();
        if mag > threshold {
            return Err(SpectralError::ResonantModes { mode: k, magnitude: mag, threshold });
        }
    }
    Ok(f.map_multiplier(|n| {
        if n.abs() <= 1 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / (1.0 - (n * n) as f64), 0.0)
        }
    }))
}
