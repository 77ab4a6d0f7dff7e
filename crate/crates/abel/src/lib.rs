//! Abel equation `y' = p(x) y^2 + q(x) y^3`: Poincaré coefficients of the
//! return map, its truncated evaluation and fixed points, moment-like
//! approximations and a Taylor-series integrator used as an oracle.

pub mod equation;
pub mod fixed;
pub mod moments;
pub mod ode;
pub mod poincare;
pub mod validate;

pub use equation::AbelEquation;
pub use fixed::{fixed_point_count, FixedPointReport};
pub use moments::{moment_like, primitive};
pub use ode::{integrate, ode_oracle, ode_oracle_dyadic, Direction, OdeConfig, DEFAULT_BITS, F64_TOLERANCE};
pub use poincare::{
    displacement_coefficients, poincare_coefficients, return_map_eval, Orientation, PoincareExpansion, DEFAULT_ORDER,
    ORIENTATION, TAIL_TOLERANCE,
};
pub use validate::{default_samples, oracle_agreement, oracle_agreement_with, random_equation, Agreement};
