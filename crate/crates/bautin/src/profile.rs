//! `A_0` growth constants and the coefficient recurrence of the linear subclass.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::multipoly::Exponent;
use taydom_core::scalar::{dyadic_bound, pow_q, q_to_f64};
use taydom_core::{serde_q, Error, QMultiPoly, Rational, Result};

use crate::recurrence::ParametricSeries;

pub const NORM_CONVENTION: &str = "max_abs_coefficient";

/// `deg a_k <= K_1 k + K_2` and `||a_k|| <= K_3 K_4^k` on the generated prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A0Profile {
    #[serde(with = "serde_q::one")]
    pub k1: Rational,
    #[serde(with = "serde_q::one")]
    pub k2: Rational,
    #[serde(with = "serde_q::one")]
    pub k3: Rational,
    #[serde(with = "serde_q::one")]
    pub k4: Rational,
    pub norm: String,
    pub horizon: usize,
    /// `deg a_k <= k` for the linear subclass started from degrees `0..d-1`;
    /// `None` when the setup does not apply.
    pub degree_at_most_k: Option<bool>,
}

/// `max_beta |a_{k,beta}|`.
pub fn coefficient_norm(p: &QMultiPoly) -> Rational {
    p.terms().map(|(_, c)| c.abs()).fold(Rational::zero(), |a, b| a.max(b))
}

fn qi(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// `K_1` is the slope of the last edge of the upper hull of `(k, deg a_k)`
/// (clamped at zero) and `K_2` the smallest intercept for it. `K_4` is the
/// largest per-step growth of the norm over the second half of the prefix,
/// and `K_3` the smallest constant for it.
pub fn a0_profile(ps: &ParametricSeries) -> Result<A0Profile> {
    let horizon = ps.horizon();
    if horizon < 4 {
        return Err(Error::TooShort { needed: 5, have: ps.terms.len() });
    }
    let pts: Vec<(usize, u32)> = ps.degrees.iter().enumerate().filter_map(|(k, d)| d.map(|d| (k, d))).collect();
    let (k1, k2) = match pts.last() {
        None => (Rational::zero(), Rational::zero()),
        Some(&(kl, dl)) => {
            let slope = pts
                .iter()
                .filter(|(k, _)| *k < kl)
                .map(|&(k, d)| Rational::new((dl as i64 - d as i64).into(), ((kl - k) as i64).into()))
                .min()
                .unwrap_or_else(Rational::zero)
                .max(Rational::zero());
            let icpt = pts
                .iter()
                .map(|&(k, d)| qi(d as i64) - &slope * qi(k as i64))
                .max()
                .expect("nonempty");
            (slope, icpt.max(Rational::zero()))
        }
    };

    let norms: Vec<Rational> = ps.terms.iter().map(coefficient_norm).collect();
    let nz: Vec<usize> = (0..=horizon).filter(|&k| !norms[k].is_zero()).collect();
    let mut k4 = Rational::zero();
    for w in nz.windows(2) {
        let (j, k) = (w[0], w[1]);
        if k <= horizon / 2 {
            continue;
        }
        let ratio = &norms[k] / &norms[j];
        let step = if k - j == 1 {
            ratio
        } else {
            let f = q_to_f64(&ratio).powf(1.0 / (k - j) as f64);
            dyadic_bound(f, 30, true)?
        };
        k4 = k4.max(step);
    }
    if k4.is_zero() {
        k4 = Rational::one();
    }
    let k3 = (0..=horizon)
        .map(|k| &norms[k] / pow_q(&k4, k as i64))
        .max()
        .expect("horizon >= 4");

    let rec = &ps.provenance.recurrence;
    let prop3 = rec.linear && ps.provenance.init.iter().enumerate().all(|(i, a)| a.degree() == Some(i as u32));
    let degree_at_most_k = prop3.then(|| ps.degrees.iter().enumerate().all(|(k, d)| d.is_none_or(|d| d as usize <= k)));
    Ok(A0Profile {
        k1,
        k2,
        k3,
        k4,
        norm: NORM_CONVENTION.into(),
        horizon,
        degree_at_most_k,
    })
}

impl A0Profile {
    /// Checks both inequalities against `ps` exactly.
    pub fn holds_on(&self, ps: &ParametricSeries) -> bool {
        ps.terms.iter().enumerate().all(|(k, a)| {
            let kq = qi(k as i64);
            let deg_ok = a.degree().is_none_or(|d| qi(d as i64) <= &self.k1 * &kq + &self.k2);
            deg_ok && coefficient_norm(a) <= &self.k3 * pow_q(&self.k4, k as i64)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    /// Number of `(k, beta)` identities compared.
    pub identities: usize,
    pub nonzero_residuals: usize,
    /// First failing `(k, beta)`, if any.
    pub first_failure: Option<(usize, Exponent)>,
    pub max_k: usize,
}

impl CoefficientCheck {
    pub fn exact(&self) -> bool {
        self.nonzero_residuals == 0
    }
}

/// `a_{k,beta} = sum_j sum_i A_{k,j,i} a_{k-j, beta[i]}` for every `k >= d`
/// and every `beta` in the support of either side.
pub fn coefficient_recurrence_check(ps: &ParametricSeries) -> Result<CoefficientCheck> {
    let rec = &ps.provenance.recurrence;
    if !rec.linear {
        return Err(Error::Invalid("the coefficient recurrence needs the linear subclass".into()));
    }
    let n = ps.nvars;
    let d = rec.d;
    let mut report = CoefficientCheck {
        identities: 0,
        nonzero_residuals: 0,
        first_failure: None,
        max_k: ps.horizon(),
    };
    for k in d..=ps.horizon() {
        // A_{k,j,i}
        let mut a_kji = vec![vec![Rational::zero(); n]; d];
        for t in rec.rule(k) {
            let j = t.alpha.iter().position(|&e| e == 1).expect("linear term");
            for (e, c) in t.coeff.terms() {
                let i = e.iter().position(|&v| v == 1).expect("degree one");
                a_kji[j][i] += c;
            }
        }
        let mut support: BTreeSet<Exponent> = ps.terms[k].terms().map(|(e, _)| e.clone()).collect();
        for j in 1..=d {
            for (e, _) in ps.terms[k - j].terms() {
                for i in 0..n {
                    let mut b = e.clone();
                    b[i] += 1;
                    support.insert(b);
                }
            }
        }
        for beta in support {
            let mut rhs = Rational::zero();
            for j in 1..=d {
                for i in 0..n {
                    if beta[i] == 0 || a_kji[j - 1][i].is_zero() {
                        continue;
                    }
                    let mut bi = beta.clone();
                    bi[i] -= 1;
                    rhs += &a_kji[j - 1][i] * ps.terms[k - j].coeff(&bi);
                }
            }
            report.identities += 1;
            if ps.terms[k].coeff(&beta) != rhs {
                report.nonzero_residuals += 1;
                report.first_failure.get_or_insert((k, beta));
            }
        }
    }
    Ok(report)
}
