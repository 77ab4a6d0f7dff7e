//! Piecewise D-finite functions: moment recurrences, the companion matrix
//! system of the moments, vanishing-moment bounds and Taylor domination for
//! the Stieltjes transform `S_g(z) = int g(x) / (1 - z x) dx`.

pub mod analysis;
pub mod family;
pub mod moments;
pub mod operator;
pub mod system;

pub use analysis::{
    analyze_operator, fuchsian_check, lambda, r_star, stieltjes_certificate, stieltjes_n, vanishing_bound, OperatorAnalysis,
    SpectrumPoint, VanishingBound, VanishingCase,
};
pub use family::{direct_moments, exponential_case, moment_map_rank, test_family, DirectMoments, TestCase, TestFunction};
pub use moments::{epsilon_direct, epsilon_rule, moment_recurrence, recurrence_residuals, EpsilonRule, MomentRecurrence};
pub use operator::{DifferentialOperator, PiecewiseData};
pub use system::{companion_system, MomentSystem};
