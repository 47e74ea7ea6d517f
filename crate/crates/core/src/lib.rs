//! Finite-time Lyapunov, dichotomy and nonuniform-dichotomy spectra of
//! diagonal linear nonautonomous systems `x' = diag(a_1(t), …, a_n(t)) x`.
//!
//! The building blocks, bottom up:
//!
//! * [`expr`] parses coefficient expressions in `t`.
//! * [`quad`] provides cumulative integrals `F(t) = ∫_0^t a`.
//! * [`steklov`] has windowed averages `(F(t + H) - F(t)) / H`.
//! * [`spectra`] turns them into spectral intervals and the bias detector.
//! * [`wis`] checks separation certificates and growth bounds.
//! * [`systems`] holds the builtin example systems.

// `!(x > 0.0)` style guards are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficient;
pub mod expr;
pub mod quad;
pub mod spectra;
pub mod steklov;
pub mod systems;
pub mod wis;

pub use coefficient::{CoefficientError, CoefficientFunction};
pub use quad::QuadError;
pub use spectra::{DiagonalSystem, SpectraError};
pub use steklov::SteklovError;
pub use systems::SystemError;
pub use wis::WisError;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Steklov(#[from] SteklovError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Wis(#[from] WisError),
}

impl Error {
    /// Whether the error is a violated numerical precondition (bad window,
    /// out-of-range query, resource cap) rather than malformed input.
    pub fn is_precondition(&self) -> bool {
        match self {
            Error::Coefficient(e) => matches!(e, CoefficientError::Eval(_)),
            Error::System(_) => false,
            Error::Quad(_) | Error::Steklov(_) | Error::Spectra(_) | Error::Wis(_) => true,
        }
    }
}
