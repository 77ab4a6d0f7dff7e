//! Taylor-series integrator for `y' = p y^2 + q y^3`, generic over the
//! scalar. Floating runs use `f64`; validation runs use [`Dyadic`] numbers
//! carrying a fixed number of significant bits.

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use taydom_core::scalar::rat;
use taydom_core::{Dyadic, Error, QPoly, Rational, Result, Scalar};

use crate::equation::AbelEquation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From `a` to `b`.
    Forward,
    /// From `b` to `a`.
    Backward,
}

/// Local error tolerance of the `f64` integrator, relative to `|y|`.
pub const F64_TOLERANCE: f64 = 1e-13;
/// Significant bits of the dyadic integrator used for validation.
pub const DEFAULT_BITS: u32 = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct OdeConfig {
    /// `ln` of the per-step truncation tolerance relative to `|y|`.
    pub ln_tol: f64,
    pub max_order: usize,
    /// Smallest admissible step before blow-up is reported.
    pub min_step: f64,
}

impl OdeConfig {
    pub fn f64() -> Self {
        OdeConfig {
            ln_tol: F64_TOLERANCE.ln(),
            max_order: 60,
            min_step: 1e-9,
        }
    }

    pub fn dyadic(bits: u32) -> Self {
        OdeConfig {
            ln_tol: -((bits.saturating_sub(8)) as f64) * std::f64::consts::LN_2,
            max_order: 40 + bits as usize / 2,
            min_step: 1e-9,
        }
    }
}

const LOOKBACK: usize = 4;

/// Taylor coefficients `c_0 .. c_M` of the solution through `(x, y)` until
/// the last [`LOOKBACK`] terms `|c_m h^m|` fall below tolerance; `None` when
/// `max_order` is reached first.
fn taylor_step<T: Scalar>(
    ps: &[T],
    qs: &[T],
    y: &T,
    ln_h: f64,
    cfg: &OdeConfig,
    round: &dyn Fn(T) -> T,
) -> Option<Vec<T>> {
    let ln_goal = cfg.ln_tol + y.ln_modulus();
    let min_order = ps.len().max(qs.len()) + 2 + LOOKBACK;
    let mut c = vec![y.clone()];
    let mut s2: Vec<T> = Vec::new();
    let mut s3: Vec<T> = Vec::new();
    for m in 0..cfg.max_order {
        let mut v2 = T::zero();
        for i in 0..=m {
            v2 = v2 + c[i].clone() * c[m - i].clone();
        }
        s2.push(round(v2));
        let mut v3 = T::zero();
        for i in 0..=m {
            v3 = v3 + s2[i].clone() * c[m - i].clone();
        }
        s3.push(round(v3));
        let mut rhs = T::zero();
        for (j, pj) in ps.iter().enumerate().take(m + 1) {
            if !pj.is_zero() {
                rhs = rhs + pj.clone() * s2[m - j].clone();
            }
        }
        for (j, qj) in qs.iter().enumerate().take(m + 1) {
            if !qj.is_zero() {
                rhs = rhs + qj.clone() * s3[m - j].clone();
            }
        }
        c.push(round(rhs / T::from_i64(m as i64 + 1)));
        let top = c.len() - 1;
        if top >= min_order {
            let small = (top + 1 - LOOKBACK..=top).all(|j| c[j].ln_modulus() + j as f64 * ln_h < ln_goal);
            if small {
                return Some(c);
            }
        }
    }
    None
}

fn coeffs_at<T: Scalar>(p: &QPoly, x: &Rational) -> Vec<T> {
    p.shift(x).coeffs().iter().map(T::from_rational).collect()
}

/// Solution value at `x1` of the trajectory through `(x0, y0)`.
pub fn integrate<T: Scalar>(
    eq: &AbelEquation,
    x0: &Rational,
    x1: &Rational,
    y0: T,
    cfg: &OdeConfig,
    round: &dyn Fn(T) -> T,
) -> Result<T> {
    if y0.is_zero() || x0 == x1 {
        return Ok(y0);
    }
    let forward = x1 > x0;
    let span = (x1 - x0).abs();
    let max_h = &span / rat(4, 1);
    let mut h = max_h.clone();
    let mut x = x0.clone();
    let mut y = y0;
    while &x != x1 {
        let left = (x1 - &x).abs();
        if h > left {
            h = left;
        }
        if taydom_core::scalar::q_to_f64(&h) < cfg.min_step {
            return Err(Error::Invalid(format!(
                "step size fell below {:e} near x = {}: solution blows up",
                cfg.min_step,
                taydom_core::scalar::q_to_f64(&x)
            )));
        }
        let ps: Vec<T> = coeffs_at(&eq.p, &x);
        let qs: Vec<T> = coeffs_at(&eq.q, &x);
        let ln_h = taydom_core::scalar::ln_abs_rational(&h);
        match taylor_step(&ps, &qs, &y, ln_h, cfg, round) {
            None => h = &h / rat(2, 1),
            Some(c) => {
                let hs = if forward { h.clone() } else { -h.clone() };
                let ht = T::from_rational(&hs);
                let mut acc = T::zero();
                for v in c.iter().rev() {
                    acc = round(acc * ht.clone() + v.clone());
                }
                if !acc.ln_modulus().is_finite() && !acc.is_zero() {
                    return Err(Error::NonFinite(format!("{acc:?}")));
                }
                y = acc;
                x += hs;
                h = (&h * rat(2, 1)).min(max_h.clone());
            }
        }
    }
    Ok(y)
}

fn endpoints(eq: &AbelEquation, dir: Direction) -> (Rational, Rational) {
    match dir {
        Direction::Forward => (eq.a.clone(), eq.b.clone()),
        Direction::Backward => (eq.b.clone(), eq.a.clone()),
    }
}

/// `f64` oracle with local tolerance [`F64_TOLERANCE`].
pub fn ode_oracle(eq: &AbelEquation, y_init: f64, dir: Direction) -> Result<f64> {
    if !y_init.is_finite() {
        return Err(Error::NonFinite(y_init.to_string()));
    }
    let (x0, x1) = endpoints(eq, dir);
    integrate(eq, &x0, &x1, y_init, &OdeConfig::f64(), &|v| v)
}

/// Dyadic oracle carrying `bits` significant bits.
pub fn ode_oracle_dyadic(eq: &AbelEquation, y_init: &Rational, dir: Direction, bits: u32) -> Result<Rational> {
    let (x0, x1) = endpoints(eq, dir);
    let y = Dyadic::with_precision(bits, || {
        let y0 = Dyadic::from_rational(y_init);
        integrate(eq, &x0, &x1, y0, &OdeConfig::dyadic(bits), &|v| v)
    })?;
    Ok(y.to_rational().expect("dyadic values are finite"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::q_to_f64;

    #[test]
    fn riccati_forward_and_back() {
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        let y1 = ode_oracle(&eq, 0.1, Direction::Forward).unwrap();
        assert!((y1 - 0.1 / 0.9).abs() < 1e-14);
        let y0 = ode_oracle(&eq, y1, Direction::Backward).unwrap();
        assert!((y0 - 0.1).abs() < 1e-14);
        assert_eq!(ode_oracle(&eq, 0.0, Direction::Forward).unwrap(), 0.0);
    }

    #[test]
    fn dyadic_oracle_is_precise() {
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        let y0 = rat(1, 10);
        let y1 = ode_oracle_dyadic(&eq, &y0, Direction::Forward, 300).unwrap();
        let exact = rat(1, 9);
        let err = q_to_f64(&((&y1 - &exact).abs() / &exact));
        assert!(err < 1e-85, "{err:e}");
    }

    #[test]
    fn blow_up_is_detected() {
        // y = y0 / (1 - y0 x) blows up at x = 1/y0 = 1/2
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        assert!(ode_oracle(&eq, 2.0, Direction::Forward).is_err());
    }

    #[test]
    fn cubic_term_matches_closed_form() {
        // y' = y^3: y = y0 / sqrt(1 - 2 y0^2 x)
        let eq = AbelEquation::from_ints(&[], &[1], 0, 1).unwrap();
        let y = ode_oracle(&eq, 0.3, Direction::Forward).unwrap();
        assert!((y - 0.3 / (1.0f64 - 2.0 * 0.09).sqrt()).abs() < 1e-13);
    }
}
