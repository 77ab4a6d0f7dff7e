//! Numeric substrate and Taylor-domination machinery.
//!
//! Kernels are generic over [`Scalar`]; exact work uses [`Rational`] and the
//! fast paths use `f64` or [`num_complex::Complex64`]. Recurrence coefficient
//! laws are always exact rationals so that certificate thresholds can be
//! decided for every index, not only on a finite horizon.

pub mod domination;
pub mod dyadic;
pub mod error;
pub mod law;
pub mod linalg;
pub mod multipoly;
pub mod poly;
pub mod recurrence;
pub mod roots;
pub mod scalar;
pub mod serde_q;
pub mod zeros;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use dyadic::Dyadic;
pub use domination::{DominationCertificate, Method, SRule, VerificationReport};
pub use law::IndexLaw;
pub use linalg::Matrix;
pub use multipoly::MultiPoly;
pub use poly::UniPoly;
pub use recurrence::{CoefficientSequence, RecurrenceSpec};
pub use roots::{Root, RootSet};

/// Arbitrary-size rational, always in lowest terms.
pub type Rational = num_rational::BigRational;
/// Exact univariate polynomial.
pub type QPoly = UniPoly<Rational>;
/// Real double-precision polynomial.
pub type FPoly = UniPoly<f64>;
/// Complex double-precision polynomial.
pub type CPoly = UniPoly<num_complex::Complex64>;
/// Exact sparse multivariate polynomial.
pub type QMultiPoly = MultiPoly<Rational>;
/// Exact rational matrix.
pub type QMatrix = Matrix<Rational>;
/// Exact coefficient sequence.
pub type QSequence = CoefficientSequence<Rational>;
/// Double-precision coefficient sequence.
pub type FSequence = CoefficientSequence<f64>;
/// Complex double-precision coefficient sequence.
pub type CSequence = CoefficientSequence<num_complex::Complex64>;
