//! Poincaré coefficients `v_k(x)` from
//! `v_k' = -(k-1) p v_{k-1} - (k-2) q v_{k-2}`, `v_0 = 0`, `v_1 = 1`,
//! `v_k(0) = 0`.
//!
//! `H(x, y) = sum_k v_k(x) y^k` is constant along solutions and equals `y` at
//! `x = 0`, so it sends the value at `x` back to the value at the left
//! endpoint: the expansion describes the backward map.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::{serde_q, Error, QPoly, Rational, Result, Scalar};

use crate::equation::AbelEquation;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 20;

/// Which numeric map the expansion reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Value at `x` mapped to the value at `a`.
    Backward,
    /// Value at `a` mapped to the value at `x`.
    Forward,
}

/// Orientation established against the integrator; `tests/oracle.rs` re-derives it.
pub const ORIENTATION: Orientation = Orientation::Backward;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareExpansion {
    /// `v_0 .. v_K` in the translated variable `t = x - a`.
    #[serde(with = "serde_q::poly_vec")]
    pub v: Vec<QPoly>,
    pub order: usize,
    /// The `a` that was subtracted from `x`.
    #[serde(with = "serde_q::one")]
    pub translation: Rational,
    pub orientation: Orientation,
}

fn kq(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

pub fn poincare_coefficients(eq: &AbelEquation, order: usize) -> Result<PoincareExpansion> {
    if order < 2 {
        return Err(Error::Invalid(format!("truncation order must be at least 2, got {order}")));
    }
    let n = eq.normalized();
    let mut v = vec![QPoly::zero().renamed("x"), QPoly::one().renamed("x")];
    for k in 2..=order {
        let rhs = derivative_rhs(&n, &v, k);
        v.push(rhs.antiderivative().renamed("x"));
    }
    let exp = PoincareExpansion {
        v,
        order,
        translation: eq.a.clone(),
        orientation: ORIENTATION,
    };
    exp.check_identity(eq)?;
    Ok(exp)
}

/// `-(k-1) p v_{k-1} - (k-2) q v_{k-2}`.
fn derivative_rhs(n: &AbelEquation, v: &[QPoly], k: usize) -> QPoly {
    let a = (&n.p * &v[k - 1]).scale(&-kq(k - 1));
    let b = (&n.q * &v[k - 2]).scale(&-kq(k - 2));
    &a + &b
}

impl PoincareExpansion {
    /// Re-checks `v_1 = 1`, `v_k(0) = 0` and the differential recurrence as
    /// polynomial identities.
    pub fn check_identity(&self, eq: &AbelEquation) -> Result<()> {
        let n = eq.normalized();
        if !self.v[0].is_zero() || self.v[1] != QPoly::one().renamed("x") {
            return Err(Error::Invalid("v_0 = 0, v_1 = 1 violated".into()));
        }
        for k in 2..=self.order {
            if !self.v[k].eval(&Rational::zero()).is_zero() {
                return Err(Error::Invalid(format!("v_{k}(0) != 0")));
            }
            if self.v[k].derivative() != derivative_rhs(&n, &self.v, k).renamed("x") {
                return Err(Error::Invalid(format!("differential recurrence fails at k = {k}")));
            }
        }
        Ok(())
    }

    /// `v_k` in the original variable `x`.
    pub fn v_original(&self, k: usize) -> QPoly {
        self.v[k].shift(&-self.translation.clone()).renamed("x")
    }

    /// `v_0(x) .. v_K(x)` at an original-coordinate point.
    pub fn values_at(&self, x: &Rational) -> Vec<Rational> {
        let t = x - &self.translation;
        self.v.iter().map(|p| p.eval(&t)).collect()
    }

    pub fn degrees(&self) -> Vec<Option<usize>> {
        self.v.iter().map(|p| p.degree()).collect()
    }

    /// First `k >= 2` with `v_k(x) != 0`.
    pub fn leading_index(&self, x: &Rational) -> Option<usize> {
        self.values_at(x).iter().enumerate().skip(2).find(|(_, c)| !c.is_zero()).map(|(k, _)| k)
    }
}

/// Tail heuristic: last two terms must stay below this fraction of `|y|`.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// `sum_{k=1}^K v_k(x) y^k`.
pub fn return_map_eval<T: Scalar>(exp: &PoincareExpansion, x: &Rational, y: &T) -> Result<T> {
    let c = exp.values_at(x);
    if y.is_zero() {
        return Ok(T::zero());
    }
    let ln_y = y.ln_modulus();
    let k = exp.order;
    let tail = [k - 1, k]
        .iter()
        .map(|&j| taydom_core::scalar::ln_abs_rational(&c[j]) + j as f64 * ln_y)
        .fold(f64::NEG_INFINITY, f64::max);
    if tail > TAIL_TOLERANCE.ln() + ln_y {
        return Err(Error::NoCertifiableTail(format!(
            "last terms of the truncated map reach {:.3e} at |y| = {:.3e}",
            tail.exp(),
            ln_y.exp()
        )));
    }
    let mut acc = T::zero();
    for v in c.iter().rev() {
        acc = acc * y.clone() + T::from_rational(v);
    }
    Ok(acc)
}

/// Coefficients of `G(y) - y` at `x`.
pub fn displacement_coefficients(exp: &PoincareExpansion, x: &Rational) -> Vec<Rational> {
    let mut c = exp.values_at(x);
    c[1] -= Rational::one();
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::{int, pow_q, rat};

    #[test]
    fn p_one_gives_alternating_powers() {
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        let e = poincare_coefficients(&eq, 12).unwrap();
        for k in 1..=12 {
            let expected = QPoly::monomial(pow_q(&int(-1), k as i64 - 1), k - 1).renamed("x");
            assert_eq!(e.v[k], expected, "k={k}");
        }
    }

    #[test]
    fn zero_equation_is_identity() {
        let eq = AbelEquation::from_ints(&[], &[], 0, 1).unwrap();
        let e = poincare_coefficients(&eq, 10).unwrap();
        assert!(e.v[2..].iter().all(|p| p.is_zero()));
        let y = rat(1, 7);
        assert_eq!(return_map_eval(&e, &int(1), &y).unwrap(), y);
    }

    #[test]
    fn q_one_hand_unroll() {
        let eq = AbelEquation::from_ints(&[], &[1], 0, 1).unwrap();
        let e = poincare_coefficients(&eq, 6).unwrap();
        assert!(e.v[2].is_zero());
        assert_eq!(e.v[3].coeffs(), &[int(0), int(-1)]);
        assert!(e.v[4].is_zero());
    }

    #[test]
    fn return_map_resums_geometric_series() {
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        let e = poincare_coefficients(&eq, 20).unwrap();
        let g: f64 = return_map_eval(&e, &int(1), &0.1).unwrap();
        assert!((g - 0.1 / 1.1).abs() < 1e-16);
        assert_eq!(return_map_eval(&e, &int(1), &0.0).unwrap(), 0.0);
        assert!(return_map_eval(&e, &int(1), &0.9).is_err());
    }

    #[test]
    fn translation_is_recorded() {
        let eq = AbelEquation::from_ints(&[1], &[], 2, 3).unwrap();
        let e = poincare_coefficients(&eq, 6).unwrap();
        assert_eq!(e.translation, int(2));
        // v_2 = -(x - a)
        assert_eq!(e.v_original(2).coeffs(), &[int(2), int(-1)]);
        assert_eq!(e.values_at(&int(3))[2], int(-1));
    }

    #[test]
    fn order_below_two_is_rejected() {
        let eq = AbelEquation::from_ints(&[1], &[], 0, 1).unwrap();
        assert!(poincare_coefficients(&eq, 1).is_err());
    }
}
