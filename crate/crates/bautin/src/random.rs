//! Random polynomial recurrences for batteries.
//!
//! Quadratic terms are confined to a short burst of indices after `d`; a
//! quadratic rule at every step doubles the degree each time and no exact
//! check survives to `k = 30`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use taydom_core::{QMultiPoly, Rational};

use crate::recurrence::{ParametricRecurrence, PolyTerm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomConfig {
    pub d: usize,
    pub nvars: usize,
    pub u_degree: u32,
    pub horizon: usize,
    pub linear: bool,
    /// Integer numerators are drawn from `-range..=range`.
    pub range: i64,
    /// Number of indices `k = d, d+1, ..` whose rule may carry quadratic terms.
    pub burst: usize,
}

impl RandomConfig {
    /// `d <= 3`, `n <= 3`, `u`-degree `<= 2`; the linear subclass on request.
    pub fn draw<R: Rng>(rng: &mut R, horizon: usize, linear: bool) -> Self {
        RandomConfig {
            d: rng.gen_range(1..=3),
            nvars: rng.gen_range(1..=3),
            u_degree: if linear { 1 } else { rng.gen_range(1..=2) },
            horizon,
            linear,
            range: 3,
            burst: 2,
        }
    }
}

fn coeff<R: Rng>(rng: &mut R, range: i64) -> Rational {
    let den = if rng.gen_bool(0.2) { 2 } else { 1 };
    Rational::new(rng.gen_range(-range..=range).into(), den.into())
}

fn nonzero_coeff<R: Rng>(rng: &mut R, range: i64) -> Rational {
    loop {
        let c = coeff(rng, range.max(1));
        if c != Rational::from_integer(0.into()) {
            return c;
        }
    }
}

/// Random exponent of total degree exactly `deg`.
fn exponent<R: Rng>(rng: &mut R, nvars: usize, deg: u32) -> Vec<u32> {
    let mut e = vec![0; nvars];
    for _ in 0..deg {
        e[rng.gen_range(0..nvars)] += 1;
    }
    e
}

/// Random polynomial whose degree is exactly `deg` (a few lower terms added).
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, deg: u32, range: i64) -> QMultiPoly {
    let mut terms = vec![(exponent(rng, nvars, deg), nonzero_coeff(rng, range))];
    for _ in 0..rng.gen_range(0..=2) {
        let dd = rng.gen_range(0..=deg);
        if dd < deg {
            terms.push((exponent(rng, nvars, dd), coeff(rng, range)));
        }
    }
    QMultiPoly::from_terms(nvars, terms)
}

fn random_linear_form<R: Rng>(rng: &mut R, nvars: usize, range: i64) -> Vec<Rational> {
    (0..nvars).map(|_| coeff(rng, range)).collect()
}

/// A recurrence from `cfg` with matching initial data. The linear subclass
/// starts from degrees `0, 1, .., d-1`.
pub fn random_case<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> (ParametricRecurrence, Vec<QMultiPoly>) {
    let (d, n) = (cfg.d, cfg.nvars);
    let mut rules = Vec::new();
    for k in d..=cfg.horizon.max(d) {
        let mut rule = Vec::new();
        for j in 1..=d {
            if cfg.linear {
                rule.push(PolyTerm::linear(d, j, &random_linear_form(rng, n, cfg.range)));
            } else if rng.gen_bool(0.8) {
                let mut alpha = vec![0; d];
                alpha[j - 1] = 1;
                let deg = rng.gen_range(0..=1);
                rule.push(PolyTerm::new(alpha, random_poly(rng, n, deg, cfg.range)));
            }
        }
        if cfg.u_degree >= 2 && k < d + cfg.burst {
            for _ in 0..rng.gen_range(1..=2) {
                let mut alpha = vec![0; d];
                alpha[rng.gen_range(0..d)] += 1;
                alpha[rng.gen_range(0..d)] += 1;
                let deg = rng.gen_range(0..=1);
                rule.push(PolyTerm::new(alpha, random_poly(rng, n, deg, cfg.range)));
            }
        }
        rules.push(rule);
    }
    let init = (0..d)
        .map(|i| {
            if cfg.linear {
                random_poly(rng, n, i as u32, cfg.range)
            } else if rng.gen_bool(0.15) {
                QMultiPoly::zero(n)
            } else {
                let deg = rng.gen_range(0..=2);
                random_poly(rng, n, deg, cfg.range)
            }
        })
        .collect();
    let rec = ParametricRecurrence::new(d, n, rules, cfg.linear, None).expect("generated rules are valid");
    (rec, init)
}
