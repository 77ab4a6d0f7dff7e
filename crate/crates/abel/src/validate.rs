//! Agreement of the truncated return map with the integrator.

use rand::Rng;
use serde::{Deserialize, Serialize};
use taydom_core::scalar::{ln_abs_rational, rat};
use taydom_core::{QPoly, Rational, Result};

use crate::equation::AbelEquation;
use crate::ode::{ode_oracle_dyadic, Direction};
use crate::poincare::{return_map_eval, PoincareExpansion, ORIENTATION, Orientation};

/// Sample points `10^{-2}, 10^{-3}, 10^{-4}`.
pub fn default_samples() -> Vec<Rational> {
    vec![rat(1, 100), rat(1, 1000), rat(1, 10000)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub order: usize,
    pub ln_y: Vec<f64>,
    /// `ln |G_K(y) - oracle(y)|`; `-inf` for exact agreement.
    pub ln_mismatch: Vec<f64>,
    /// Least-squares slope of `ln_mismatch` against `ln_y`.
    pub slope: f64,
    /// `ln` of the oracle resolution at each sample.
    pub ln_floor: Vec<f64>,
    /// Every mismatch is below the oracle resolution.
    pub below_floor: bool,
    pub pass: bool,
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn oracle_direction(o: Orientation) -> Direction {
    match o {
        Orientation::Backward => Direction::Backward,
        Orientation::Forward => Direction::Forward,
    }
}

/// Compares `G_K(y)` at `b` against the dyadic integrator run in the
/// direction given by `orientation`; passes when the log-mismatch slope is at
/// least `K + 1 - 0.5`.
pub fn oracle_agreement_with(
    eq: &AbelEquation,
    exp: &PoincareExpansion,
    ys: &[Rational],
    bits: u32,
    orientation: Orientation,
) -> Result<Agreement> {
    let mut ln_y = Vec::new();
    let mut ln_mismatch = Vec::new();
    let mut ln_floor = Vec::new();
    for y in ys {
        let g = return_map_eval(exp, &eq.b, y)?;
        let o = ode_oracle_dyadic(eq, y, oracle_direction(orientation), bits)?;
        ln_y.push(ln_abs_rational(y));
        ln_mismatch.push(ln_abs_rational(&(g - o)));
        ln_floor.push(ln_abs_rational(y) - (bits as f64 - 24.0) * std::f64::consts::LN_2);
    }
    let below_floor = ln_mismatch.iter().zip(&ln_floor).all(|(m, f)| m <= f);
    let s = if ln_mismatch.iter().all(|m| m.is_finite()) {
        slope(&ln_y, &ln_mismatch)
    } else {
        f64::INFINITY
    };
    let pass = below_floor || s >= exp.order as f64 + 0.5;
    Ok(Agreement {
        order: exp.order,
        ln_y,
        ln_mismatch,
        slope: s,
        ln_floor,
        below_floor,
        pass,
    })
}

pub fn oracle_agreement(eq: &AbelEquation, exp: &PoincareExpansion, ys: &[Rational], bits: u32) -> Result<Agreement> {
    oracle_agreement_with(eq, exp, ys, bits, ORIENTATION)
}

/// `p, q` of degree at most `max_deg` with coefficients in `{-2, -3/2, .., 2}`
/// on an interval `[a, a + 1]`, `a` in `{0, 1/2}`.
pub fn random_equation<R: Rng>(rng: &mut R, max_deg: usize) -> AbelEquation {
    let poly = |rng: &mut R| {
        let deg = rng.gen_range(0..=max_deg);
        QPoly::new((0..=deg).map(|_| rat(rng.gen_range(-4..=4), 2)).collect())
    };
    let p = poly(rng);
    let q = poly(rng);
    let a = if rng.gen_bool(0.25) { rat(1, 2) } else { rat(0, 1) };
    let b = &a + rat(1, 1);
    AbelEquation::new(p, q, a, b).expect("b > a")
}
