//! Parametric Taylor coefficients `a_k(lambda)` generated by non-stationary
//! polynomial recurrences, their ideal-membership witnesses, `A_0` growth
//! constants and empirical uniform domination.

pub mod certify;
pub mod profile;
pub mod random;
pub mod recurrence;
pub mod witness;

pub use certify::{specialize_and_certify, RadiusRow, UniformReport};
pub use profile::{a0_profile, coefficient_norm, coefficient_recurrence_check, A0Profile, CoefficientCheck};
pub use random::{random_case, random_poly, RandomConfig};
pub use recurrence::{
    generate_capped, generate_parametric, generate_values, ParametricRecurrence, ParametricSeries, PolyTerm,
    SeriesProvenance, MONOMIAL_CAP,
};
pub use witness::{ideal_witness, ideal_witness_capped, IdealWitness};
