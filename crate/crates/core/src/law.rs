//! Closed-form laws `k -> value` for recurrence coefficients and weights.
//!
//! A law is a finite description of an infinite sequence of rationals, which
//! lets thresholds such as "for all k > n, |psi(k)| <= t" be decided for every
//! `k` rather than sampled on a horizon.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::UniPoly;
use crate::scalar::{int, pow_q};
use crate::{serde_q, Error, Result};

type Q = BigRational;

/// Integer scans inside exact sup/threshold searches stop here.
pub const SCAN_CAP: usize = 2_000_000;

/// Number of leading terms a [`IndexLaw::Sum`] scans before falling back to
/// per-component tail bounds.
const SUM_SCAN: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexLaw {
    Zero,
    Constant {
        #[serde(with = "serde_q::one")]
        value: Q,
    },
    /// `num(k) / den(k)`.
    Rational {
        #[serde(with = "serde_q::poly")]
        num: UniPoly<Q>,
        #[serde(with = "serde_q::poly")]
        den: UniPoly<Q>,
    },
    /// `coeff * ratio^k`.
    Geometric {
        #[serde(with = "serde_q::one")]
        coeff: Q,
        #[serde(with = "serde_q::one")]
        ratio: Q,
    },
    /// Explicit values for `k = start, start+1, ...`; `tail_bound` bounds
    /// `|value|` for every index, including those past the table.
    Tabulated {
        start: usize,
        #[serde(with = "serde_q::vec")]
        values: Vec<Q>,
        #[serde(with = "serde_q::opt", default)]
        tail_bound: Option<Q>,
    },
    Sum {
        parts: Vec<IndexLaw>,
    },
}

impl IndexLaw {
    pub fn constant(v: Q) -> Self {
        if v.is_zero() {
            IndexLaw::Zero
        } else {
            IndexLaw::Constant { value: v }
        }
    }

    /// `c / k`.
    pub fn harmonic(c: Q) -> Self {
        IndexLaw::Rational {
            num: UniPoly::constant(c),
            den: UniPoly::identity(),
        }
    }

    /// `c * 2^{-k}`.
    pub fn dyadic_decay(c: Q) -> Self {
        IndexLaw::Geometric {
            coeff: c,
            ratio: BigRational::new(1.into(), 2.into()),
        }
    }

    pub fn plus(self, other: IndexLaw) -> Self {
        match (self, other) {
            (IndexLaw::Zero, b) => b,
            (a, IndexLaw::Zero) => a,
            (IndexLaw::Sum { mut parts }, b) => {
                parts.push(b);
                IndexLaw::Sum { parts }
            }
            (a, b) => IndexLaw::Sum { parts: vec![a, b] },
        }
    }

    /// True when the law is identically zero as a description.
    pub fn is_zero(&self) -> bool {
        match self {
            IndexLaw::Zero => true,
            IndexLaw::Constant { value } => value.is_zero(),
            IndexLaw::Rational { num, .. } => num.is_zero(),
            IndexLaw::Geometric { coeff, .. } => coeff.is_zero(),
            IndexLaw::Tabulated { values, tail_bound, .. } => {
                values.iter().all(|v| v.is_zero()) && tail_bound.as_ref().is_some_and(|t| t.is_zero())
            }
            IndexLaw::Sum { parts } => parts.iter().all(|p| p.is_zero()),
        }
    }

    pub fn eval(&self, k: usize) -> Result<Q> {
        match self {
            IndexLaw::Zero => Ok(Q::zero()),
            IndexLaw::Constant { value } => Ok(value.clone()),
            IndexLaw::Rational { num, den } => {
                let kq = int(k as i64);
                let d = den.eval(&kq);
                if d.is_zero() {
                    return Err(Error::Undefined {
                        k,
                        reason: "denominator vanishes".into(),
                    });
                }
                Ok(num.eval(&kq) / d)
            }
            IndexLaw::Geometric { coeff, ratio } => Ok(coeff * pow_q(ratio, k as i64)),
            IndexLaw::Tabulated { start, values, .. } => k
                .checked_sub(*start)
                .and_then(|i| values.get(i))
                .cloned()
                .ok_or_else(|| Error::Undefined {
                    k,
                    reason: format!("outside table [{start}, {})", start + values.len()),
                }),
            IndexLaw::Sum { parts } => parts.iter().try_fold(Q::zero(), |acc, p| Ok(acc + p.eval(k)?)),
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        match self {
            IndexLaw::Zero => IndexLaw::Zero,
            IndexLaw::Constant { value } => IndexLaw::constant(value * c),
            IndexLaw::Rational { num, den } => IndexLaw::Rational {
                num: num.scale(c),
                den: den.clone(),
            },
            IndexLaw::Geometric { coeff, ratio } => IndexLaw::Geometric {
                coeff: coeff * c,
                ratio: ratio.clone(),
            },
            IndexLaw::Tabulated { start, values, tail_bound } => IndexLaw::Tabulated {
                start: *start,
                values: values.iter().map(|v| v * c).collect(),
                tail_bound: tail_bound.as_ref().map(|t| t * c.abs()),
            },
            IndexLaw::Sum { parts } => IndexLaw::Sum {
                parts: parts.iter().map(|p| p.scaled(c)).collect(),
            },
        }
    }

    /// Rigorous upper bound on `|law(k)|` over all integers `k >= k0`;
    /// `None` when no finite bound exists or none can be certified.
    pub fn sup_abs_from(&self, k0: usize) -> Option<Q> {
        match self {
            IndexLaw::Zero => Some(Q::zero()),
            IndexLaw::Constant { value } => Some(value.abs()),
            IndexLaw::Rational { num, den } => rational_sup(num, den, k0),
            IndexLaw::Geometric { coeff, ratio } => {
                if coeff.is_zero() {
                    Some(Q::zero())
                } else if ratio.abs() <= Q::one() {
                    Some(coeff.abs() * pow_q(&ratio.abs(), k0 as i64))
                } else {
                    None
                }
            }
            IndexLaw::Tabulated { start, values, tail_bound } => {
                let tail = tail_bound.clone()?;
                let skip = k0.saturating_sub(*start);
                Some(values.iter().skip(skip).map(|v| v.abs()).fold(tail, |a, b| a.max(b)))
            }
            IndexLaw::Sum { parts } => {
                let mut best = Q::zero();
                for k in k0..k0 + SUM_SCAN {
                    match self.eval(k) {
                        Ok(v) => best = best.max(v.abs()),
                        Err(_) => return None,
                    }
                }
                let mut tail = Q::zero();
                for p in parts {
                    tail += p.sup_abs_from(k0 + SUM_SCAN)?;
                }
                Some(best.max(tail))
            }
        }
    }

    /// Smallest `n >= 0` such that `|law(k)| <= t` for every `k > n` with
    /// `k >= k0`; `None` if that never happens or cannot be certified.
    pub fn first_tail_within(&self, t: &Q, k0: usize) -> Option<usize> {
        // Find m with sup_{k >= m} |law| <= t, then scan [k0, m) exactly.
        let ok = |m: usize| self.sup_abs_from(m).is_some_and(|s| &s <= t);
        let mut m = k0;
        let mut prev = k0;
        while !ok(m) {
            prev = m;
            m = (m * 2).max(m + 1);
            if m > SCAN_CAP {
                return None;
            }
        }
        // sup_abs_from is non-increasing in its argument, so bisect.
        let (mut lo, mut hi) = (prev, m);
        while hi > lo + 1 && hi > k0 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if ok(lo) {
            hi = lo;
        }
        for k in (k0..hi).rev() {
            match self.eval(k) {
                Ok(v) if &v.abs() <= t => {}
                _ => return Some(k),
            }
        }
        Some(0)
    }

    /// Limit as `k -> infinity` when it exists and is known in closed form.
    pub fn limit(&self) -> Option<Q> {
        match self {
            IndexLaw::Zero => Some(Q::zero()),
            IndexLaw::Constant { value } => Some(value.clone()),
            IndexLaw::Rational { num, den } => {
                let (dn, dd) = (num.degree(), den.degree()?);
                match dn {
                    None => Some(Q::zero()),
                    Some(a) if a < dd => Some(Q::zero()),
                    Some(a) if a == dd => Some(num.leading()? / den.leading()?),
                    _ => None,
                }
            }
            IndexLaw::Geometric { coeff, ratio } => {
                if coeff.is_zero() || ratio.abs() < Q::one() {
                    Some(Q::zero())
                } else if ratio.is_one() {
                    Some(coeff.clone())
                } else {
                    None
                }
            }
            IndexLaw::Tabulated { .. } => None,
            IndexLaw::Sum { parts } => parts.iter().try_fold(Q::zero(), |acc, p| Some(acc + p.limit()?)),
        }
    }

    /// True when the law is known to converge to zero.
    pub fn tends_to_zero(&self) -> bool {
        self.limit().is_some_and(|l| l.is_zero())
    }
}

/// Cauchy bound `1 + max |c_i / c_n|` on the moduli of the roots.
fn cauchy_bound(p: &UniPoly<Q>) -> Q {
    match p.degree() {
        None | Some(0) => Q::zero(),
        Some(n) => {
            let lead = p.coeff(n).abs();
            let m = (0..n).map(|i| p.coeff(i).abs() / &lead).fold(Q::zero(), |a, b| a.max(b));
            Q::one() + m
        }
    }
}

/// Sup of `|num/den|` over integers `k >= k0`. Past the largest real root of
/// `den` and of `num' den - num den'` the function is monotone, so its modulus
/// is bounded by the value there and the limit.
fn rational_sup(num: &UniPoly<Q>, den: &UniPoly<Q>, k0: usize) -> Option<Q> {
    if num.is_zero() {
        return Some(Q::zero());
    }
    let dd = den.degree()?;
    if num.degree()? > dd {
        return None;
    }
    let w = &(&num.derivative() * den) - &(num * &den.derivative());
    let b = cauchy_bound(&w).max(cauchy_bound(den));
    let b = b.ceil().to_integer().to_usize()?.max(k0);
    if b - k0 > SCAN_CAP {
        return None;
    }
    let law = IndexLaw::Rational {
        num: num.clone(),
        den: den.clone(),
    };
    let mut best = Q::zero();
    for k in k0..=b {
        best = best.max(law.eval(k).ok()?.abs());
    }
    let lim = if num.degree() == Some(dd) {
        num.leading()? / den.leading()?
    } else {
        Q::zero()
    };
    Some(best.max(lim.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn brute_sup(law: &IndexLaw, k0: usize, upto: usize) -> Q {
        (k0..upto).map(|k| law.eval(k).unwrap().abs()).fold(Q::zero(), |a, b| a.max(b))
    }

    #[test]
    fn harmonic_values_and_sup() {
        let l = IndexLaw::harmonic(int(3));
        assert_eq!(l.eval(4).unwrap(), rat(3, 4));
        assert!(l.eval(0).is_err());
        assert_eq!(l.sup_abs_from(2).unwrap(), rat(3, 2));
        assert!(l.tends_to_zero());
    }

    #[test]
    fn thresholds() {
        let l = IndexLaw::harmonic(int(1));
        // |1/k| <= 4 for all k >= 1
        assert_eq!(l.first_tail_within(&int(4), 1), Some(0));
        // |1/k| <= 1/10 for k >= 10; last violation at 9
        assert_eq!(l.first_tail_within(&rat(1, 10), 1), Some(9));
        let g = IndexLaw::dyadic_decay(int(5));
        // 5/2^k <= 1/8 first holds at k = 6
        assert_eq!(g.first_tail_within(&rat(1, 8), 0), Some(5));
        let c = IndexLaw::constant(int(2));
        assert_eq!(c.first_tail_within(&int(1), 0), None);
    }

    #[test]
    fn sum_and_geometric_growth() {
        let s = IndexLaw::constant(int(1)).plus(IndexLaw::harmonic(int(-3)));
        assert_eq!(s.eval(3).unwrap(), int(0));
        assert_eq!(s.limit(), Some(int(1)));
        assert!(s.sup_abs_from(1).unwrap() >= int(2));
        let up = IndexLaw::Geometric {
            coeff: int(1),
            ratio: int(2),
        };
        assert!(up.sup_abs_from(0).is_none());
    }

    #[test]
    fn tabulated_needs_a_tail_bound() {
        let t = IndexLaw::Tabulated {
            start: 2,
            values: vec![int(1), int(-7), int(3)],
            tail_bound: None,
        };
        assert!(t.sup_abs_from(2).is_none());
        assert!(t.eval(5).is_err());
        let t = IndexLaw::Tabulated {
            start: 2,
            values: vec![int(1), int(-7), int(3)],
            tail_bound: Some(int(8)),
        };
        assert_eq!(t.sup_abs_from(2).unwrap(), int(8));
    }

    #[test]
    fn serde_roundtrip() {
        let l = IndexLaw::harmonic(rat(-2, 3)).plus(IndexLaw::dyadic_decay(int(1)));
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"-2/3\""));
        let back: IndexLaw = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }

    proptest! {
        #[test]
        fn rational_sup_dominates_samples(
            a in -20i64..20, b in -20i64..20, c in -20i64..20,
            d0 in 1i64..30, d1 in 0i64..6, k0 in 1usize..6,
        ) {
            // den = d1 k^2 + d0 has no positive roots
            let law = IndexLaw::Rational {
                num: UniPoly::new(vec![int(a), int(b), int(c)]),
                den: UniPoly::new(vec![int(d0), int(0), int(d1)]),
            };
            match law.sup_abs_from(k0) {
                Some(s) => prop_assert!(brute_sup(&law, k0, 400) <= s),
                None => prop_assert!(d1 == 0 && (b != 0 || c != 0)),
            }
        }

        #[test]
        fn threshold_is_exact(c in 1i64..50, tn in 1i64..20, td in 1i64..20, k0 in 1usize..4) {
            let law = IndexLaw::harmonic(int(c)).plus(IndexLaw::dyadic_decay(int(c)));
            let t = rat(tn, td);
            let n = law.first_tail_within(&t, k0).unwrap();
            for k in (n + 1).max(k0)..n + 300 {
                prop_assert!(law.eval(k).unwrap().abs() <= t);
            }
            if n > 0 {
                prop_assert!(n >= k0);
                prop_assert!(law.eval(n).unwrap().abs() > t);
            }
        }
    }
}
