//! Error types shared across the crate.
//!
//! Every gate that rejects input carries the measured quantity so callers can
//! log actionable diagnostics.

use core::fmt;

/// Errors from band-limited field and multiplier operations.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    /// A coefficient on a kernel mode of the inertia operator exceeded the
    /// gate tolerance; the dynamics drifted off the quotient.
    KernelContamination { mode: i64, magnitude: f64, threshold: f64 },
    /// A bilinear term fed to the restricted Helmholtz inverse carried
    /// energy on modes 0, +-1, violating the orthogonality the inverse
    /// relies on.
    ResonantModes { mode: i64, magnitude: f64, threshold: f64 },
    /// Non-finite coefficient data.
    NonFinite,
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::KernelContamination { mode, magnitude, threshold } => write!(
                f,
                "kernel mode {mode} carries |c| = {magnitude:.3e} above gate {threshold:.3e}"
            ),
            SpectralError::ResonantModes { mode, magnitude, threshold } => write!(
                f,
                "resonant mode {mode} carries |c| = {magnitude:.3e} above gate {threshold:.3e}"
            ),
            SpectralError::NonFinite => write!(f, "non-finite coefficient data"),
        }
    }
}

impl core::error::Error for SpectralError {}

/// Errors from time integration and blowup detection.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// A coefficient became non-finite during a step ending at `time`.
    NonFiniteState { time: f64 },
    /// The Lagrangian slope passed to an acceleration formula was not
    /// strictly positive.
    DegenerateSlope { value: f64 },
    /// The spectral-tail trigger fired before any slope trend was
    /// established: the run is under-resolved, not breaking.
    InconclusiveResolution { time: f64 },
    /// A configuration invariant does not hold.
    InvalidConfig { field: &'static str, message: &'static str },
    /// A gate from the spectral layer tripped mid-run.
    Spectral(SpectralError),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::NonFiniteState { time } => {
                write!(f, "non-finite state while stepping to t = {time}")
            }
            DynamicsError::DegenerateSlope { value } => {
                write!(f, "flow slope {value} is not strictly positive")
            }
            DynamicsError::InconclusiveResolution { time } => write!(
                f,
                "spectral tail exceeded its threshold at t = {time} before any slope trend; \
                 increase the band limit"
            ),
            DynamicsError::InvalidConfig { field, message } => {
                write!(f, "invalid config field `{field}`: {message}")
            }
            DynamicsError::Spectral(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<SpectralError> for DynamicsError {
    fn from(e: SpectralError) -> Self {
        DynamicsError::Spectral(e)
    }
}

/// Errors from the analytic machinery (forces, bounds, certificates).
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// An unconditional inequality came out negative beyond tolerance;
    /// this indicates an implementation bug, not a data condition.
    BoundViolated { quantity: &'static str, slack: f64 },
    /// The certificate search ended at a point with nonnegative slope,
    /// which the existence theorem rules out.
    CertificateFailed { theta0: f64, slope: f64 },
    /// A gate from the spectral layer tripped.
    Spectral(SpectralError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::BoundViolated { quantity, slack } => {
                write!(f, "bound on {quantity} violated: slack = {slack:.3e}")
            }
            AnalysisError::CertificateFailed { theta0, slope } => write!(
                f,
                "certificate failed: slope {slope:.3e} >= 0 at theta0 = {theta0}"
            ),
            AnalysisError::Spectral(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

impl From<SpectralError> for AnalysisError {
    fn from(e: SpectralError) -> Self {
        AnalysisError::Spectral(e)
    }
}

/// Errors from conformal welding.
#[derive(Debug, Clone, PartialEq)]
pub enum WeldingError {
    /// The diffeomorphism slope fell below the floor; welding a
    /// near-broken flow is refused.
    SlopeCollapse { min_slope: f64, floor: f64 },
    /// The Nystrom matrix condition estimate exceeded its limit.
    IllConditioned { estimate: f64, limit: f64 },
    /// Negative-index interior coefficients carry too much energy; the
    /// interior map is not numerically holomorphic.
    HolomorphyViolation { fraction: f64, tolerance: f64 },
    /// Source and target triples have different cyclic order; no
    /// orientation-preserving disc automorphism exists.
    OrderMismatch,
    /// The interior derivative coefficient is too small to normalize by.
    DegenerateScale { magnitude: f64 },
    /// The Nystrom matrix is numerically singular.
    SingularMatrix,
    /// The inverse-diffeomorphism solve did not meet its residual target.
    InverseDiverged { residual: f64 },
}

impl fmt::Display for WeldingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeldingError::SlopeCollapse { min_slope, floor } => {
                write!(f, "diffeo slope {min_slope:.3e} at or below floor {floor:.3e}")
            }
            WeldingError::IllConditioned { estimate, limit } => {
                write!(f, "condition estimate {estimate:.3e} exceeds {limit:.3e}")
            }
            WeldingError::HolomorphyViolation { fraction, tolerance } => write!(
                f,
                "negative-mode energy fraction {fraction:.3e} exceeds {tolerance:.3e}"
            ),
            WeldingError::OrderMismatch => {
                write!(f, "point triples differ in cyclic order")
            }
            WeldingError::DegenerateScale { magnitude } => {
                write!(f, "interior derivative |a1| = {magnitude:.3e} too small")
            }
            WeldingError::SingularMatrix => write!(f, "welding matrix is singular"),
            WeldingError::InverseDiverged { residual } => {
                write!(f, "diffeo inversion residual {residual:.3e} too large")
            }
        }
    }
}

impl core::error::Error for WeldingError {}
