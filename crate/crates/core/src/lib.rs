//! Spectral toolkit for one-dimensional Euler-Arnold equations on quotients of
//! the circle diffeomorphism group.
//!
//! The crate covers three equations selected by an [`operator::InertiaOperator`]:
//! the Wunsch equation (multiplier `|n|`), the Euler-Weil-Petersson equation
//! (multiplier `|n|(n^2-1)`) and the periodic Constantin-Lax-Majda analogue.
//! On top of the band-limited field arithmetic in [`field`] it provides
//!
//! * momentum-form time integration, Lagrangian flow transport and
//!   wave-breaking detection ([`dynamics`]),
//! * the nonlocal forces `F` and `G` of the slope equations together with
//!   their sharp sup-norm bounds and the constructive blowup certificate
//!   ([`analysis`]),
//! * conformal welding of circle diffeomorphisms to normalized plane curves
//!   through a Fredholm kernel equation ([`welding`]).
//!
//! Everything is pure and allocation-only; the crate is `no_std` + `alloc`.
//! IO, configuration and figure export live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
mod dft;
pub mod dynamics;
pub mod error;
pub mod field;
mod linalg;
pub mod operator;
mod quad;
pub mod welding;

pub use error::{AnalysisError, DynamicsError, SpectralError, WeldingError};
pub use field::{FourierField, SobolevOrder};
pub use operator::{InertiaOperator, OperatorKind};

/// Default relative tolerance for "coefficient below tolerance" gates
/// (kernel contamination, resonant modes), taken relative to the largest
/// coefficient magnitude of the gated field.
pub const DEFAULT_GATE_TOL: f64 = 1e-10;
