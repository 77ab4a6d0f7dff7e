//! Taylor-domination certificates `(N, R, S(k))` and their verification.
//!
//! A certificate claims `|a_k| R^k <= S(k) max_{i<=N} |a_i| R^i` for every
//! `k > N`. Constructors round every floating quantity to the safe side: radii
//! down, cutoffs and constants up. Both directions keep a valid certificate
//! valid, so the exact rational parameters stored here are sound even though
//! the characteristic roots behind them are only known numerically.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::law::IndexLaw;
use crate::recurrence::{radius_estimate, CoefficientSequence, LipschitzFamilyConfig, RecurrenceSpec};
use crate::scalar::{dyadic_bound, pow_q, q_to_f64, rational_from_f64, Scalar};
use crate::{serde_q, Error, Result};

type Q = BigRational;

/// Bits kept in rounded radii.
const RADIUS_BITS: u32 = 40;

/// Log-domain margin below which verification falls back to exact
/// comparison (exact scalars) or is flagged tight (floats).
pub const TIE_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SRule {
    /// `S(k) = C`.
    Constant {
        #[serde(with = "serde_q::one")]
        c: Q,
    },
    /// `S(k) = [2e(k/d + 1)]^d`.
    Turan { d: usize },
    /// Explicit `S(k)` for `k = start, start+1, ..`.
    Tabulated {
        start: usize,
        #[serde(with = "serde_q::vec")]
        values: Vec<Q>,
    },
    /// `S(k) = R^k |a_k| / (|a_N| R^N)` realised on a given sequence.
    Trivial {
        start: usize,
        #[serde(with = "serde_q::vec")]
        values: Vec<Q>,
    },
}

impl SRule {
    pub fn name(&self) -> &'static str {
        match self {
            SRule::Constant { .. } => "constant",
            SRule::Turan { .. } => "turan",
            SRule::Tabulated { .. } => "tabulated",
            SRule::Trivial { .. } => "trivial",
        }
    }

    /// `ln S(k)`; `None` when the rule is undefined at `k`.
    pub fn ln_at(&self, k: usize) -> Option<f64> {
        match self {
            SRule::Constant { c } => Some(c.ln_modulus()),
            SRule::Turan { d } => {
                let d = *d as f64;
                Some(d * (2.0 * std::f64::consts::E * (k as f64 / d + 1.0)).ln())
            }
            SRule::Tabulated { start, values } | SRule::Trivial { start, values } => {
                k.checked_sub(*start).and_then(|i| values.get(i)).map(|v| v.ln_modulus())
            }
        }
    }

    /// Exact `S(k)` when rational.
    pub fn exact_at(&self, k: usize) -> Option<Q> {
        match self {
            SRule::Constant { c } => Some(c.clone()),
            SRule::Turan { .. } => None,
            SRule::Tabulated { start, values } | SRule::Trivial { start, values } => {
                k.checked_sub(*start).and_then(|i| values.get(i)).cloned()
            }
        }
    }

    /// Rational bracket of `S(k)`; exact rules give equal ends.
    pub fn bracket_at(&self, k: usize) -> Option<(Q, Q)> {
        if let Some(v) = self.exact_at(k) {
            return Some((v.clone(), v));
        }
        match self {
            SRule::Turan { d } => {
                let (e_lo, e_hi) = e_bracket();
                let base = Q::from_integer(BigInt::from(k)) / Q::from_integer(BigInt::from(*d)) + Q::one();
                let two = Q::from_integer(2.into());
                let lo = pow_q(&(&two * e_lo * &base), *d as i64);
                let hi = pow_q(&(&two * e_hi * &base), *d as i64);
                Some((lo, hi))
            }
            _ => None,
        }
    }
}

/// Rationals `e_lo < e < e_hi` one ulp apart.
fn e_bracket() -> (Q, Q) {
    let e = std::f64::consts::E;
    let lo = rational_from_f64(e).expect("finite");
    let hi = rational_from_f64(f64::from_bits(e.to_bits() + 1)).expect("finite");
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Turan,
    Bounded,
    Poincare,
    PoincareDelta,
    Trivial,
    Lipschitz,
    Stieltjes,
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationCertificate {
    pub n: usize,
    #[serde(with = "serde_q::one")]
    pub r: Q,
    pub s_rule: SRule,
    pub method: Method,
    /// Parameters behind the construction, for reports.
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl DominationCertificate {
    pub fn new(n: usize, r: Q, s_rule: SRule) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Invalid("certificate radius must be positive".into()));
        }
        Ok(DominationCertificate {
            n,
            r,
            s_rule,
            method: Method::Manual,
            notes: BTreeMap::new(),
        })
    }

    fn with(mut self, method: Method, notes: &[(&str, String)]) -> Self {
        self.method = method;
        for (k, v) in notes {
            self.notes.insert((*k).to_string(), v.clone());
        }
        self
    }

    /// Constant `C` when the rule is constant.
    pub fn constant(&self) -> Option<&Q> {
        match &self.s_rule {
            SRule::Constant { c } => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub horizon: usize,
    /// `ln(|a_k| R^k / (S(k) M))` for `k = N+1..=horizon`; `None` when `a_k = 0`.
    pub log_ratios: Vec<Option<f64>>,
    pub worst_k: Option<usize>,
    pub worst_log_ratio: Option<f64>,
    pub first_failure: Option<usize>,
    pub pass: bool,
    /// Comparisons were decided exactly.
    pub exact: bool,
    /// Some ratio was within the float tolerance of one.
    pub tight: bool,
    pub diagnostic: Option<String>,
}

impl VerificationReport {
    pub fn worst_ratio(&self) -> f64 {
        self.worst_log_ratio.map_or(0.0, f64::exp)
    }

    pub fn ratio(&self, k: usize) -> Option<f64> {
        let i = k.checked_sub(self.n + 1)?;
        self.log_ratios.get(i).map(|l| l.map_or(0.0, f64::exp))
    }
}

fn abs_rational<T: Scalar>(v: &T) -> Q {
    match v.to_rational() {
        Some(q) => q.abs(),
        None => rational_from_f64(v.modulus()).unwrap_or_else(|_| Q::zero()),
    }
}

/// Checks the certificate on `a_{N+1}..a_horizon`.
pub fn verify<T: Scalar>(values: &[T], cert: &DominationCertificate, horizon: usize) -> Result<VerificationReport> {
    let n = cert.n;
    if values.len() < horizon.max(n) + 1 {
        return Err(Error::TooShort {
            needed: horizon.max(n) + 1,
            have: values.len(),
        });
    }
    let ln_r = cert.r.ln_modulus();
    let term = |i: usize| values[i].ln_modulus() + i as f64 * ln_r;
    let m_ln = (0..=n).map(term).fold(f64::NEG_INFINITY, f64::max);
    let exact = T::EXACT;
    let mut rep = VerificationReport {
        n,
        horizon,
        log_ratios: Vec::with_capacity(horizon.saturating_sub(n)),
        worst_k: None,
        worst_log_ratio: None,
        first_failure: None,
        pass: true,
        exact,
        tight: false,
        diagnostic: None,
    };
    let mut exact_m: Option<Q> = None;
    for k in n + 1..=horizon {
        if values[k].is_zero() {
            rep.log_ratios.push(None);
            continue;
        }
        if m_ln == f64::NEG_INFINITY {
            rep.log_ratios.push(Some(f64::INFINITY));
            rep.pass = false;
            rep.first_failure.get_or_insert(k);
            rep.worst_k.get_or_insert(k);
            rep.worst_log_ratio = Some(f64::INFINITY);
            rep.diagnostic
                .get_or_insert_with(|| format!("a_0..a_{n} all vanish but a_{k} does not"));
            continue;
        }
        let Some(ln_s) = cert.s_rule.ln_at(k) else {
            return Err(Error::Undefined {
                k,
                reason: format!("{} rule has no value", cert.s_rule.name()),
            });
        };
        let lk = term(k);
        let lr = lk - ln_s - m_ln;
        let window = TIE_MARGIN + 1e-12 * (lk.abs() + ln_s.abs() + m_ln.abs());
        let ok = if lr < -window {
            true
        } else if lr > window {
            false
        } else if exact {
            let m = exact_m.get_or_insert_with(|| {
                (0..=n)
                    .map(|i| abs_rational(&values[i]) * pow_q(&cert.r, i as i64))
                    .fold(Q::zero(), |a, b| a.max(b))
            });
            let lhs = abs_rational(&values[k]) * pow_q(&cert.r, k as i64);
            let (s_lo, s_hi) = cert.s_rule.bracket_at(k).expect("rule defined at k");
            if lhs <= &s_lo * &*m {
                true
            } else {
                if lhs <= &s_hi * &*m {
                    rep.diagnostic
                        .get_or_insert_with(|| format!("undecided exact comparison at k = {k}"));
                }
                false
            }
        } else {
            rep.tight = true;
            true
        };
        rep.log_ratios.push(Some(lr));
        if rep.worst_log_ratio.is_none_or(|w| lr > w) {
            rep.worst_log_ratio = Some(lr);
            rep.worst_k = Some(k);
        }
        if !ok {
            rep.pass = false;
            rep.first_failure.get_or_insert(k);
        }
    }
    Ok(rep)
}

/// Constant-coefficient recurrences: `(d-1, min |1/sigma_i|, [2e(k/d+1)]^d)`.
pub fn cert_turan(spec: &RecurrenceSpec) -> Result<DominationCertificate> {
    if !spec.is_constant() {
        return Err(Error::Invalid("turan certificate needs constant coefficients".into()));
    }
    let (_, rho_hi) = spec.rho_bracket()?;
    let d = spec.d();
    let r = dyadic_bound(1.0 / q_to_f64(&rho_hi), RADIUS_BITS, false)?;
    Ok(DominationCertificate::new(d - 1, r, SRule::Turan { d })?.with(
        Method::Turan,
        &[("rho_upper", q_to_f64(&rho_hi).to_string()), ("d", d.to_string())],
    ))
}

/// `(d-1, 1/((2K+2) rho), (2K+2)^{d-1})` for a given admissible pair.
pub fn cert_bounded_pair(d: usize, k: &Q, rho: &Q) -> Result<DominationCertificate> {
    if !rho.is_positive() || k.is_negative() {
        return Err(Error::Invalid("need K >= 0 and rho > 0".into()));
    }
    let two = Q::from_integer(2.into());
    let nu_base = &two * k + &two;
    let r = (&nu_base * rho).recip();
    let c = pow_q(&nu_base, d as i64 - 1);
    Ok(DominationCertificate::new(d - 1, r, SRule::Constant { c })?.with(
        Method::Bounded,
        &[("K", crate::scalar::format_rational(k)), ("rho", crate::scalar::format_rational(rho))],
    ))
}

/// `K(rho) = max_j sup_{k>=d} |c_j(k)| / rho^j`, rounded up to a short dyadic.
pub fn uniform_k(spec: &RecurrenceSpec, rho: &Q) -> Option<Q> {
    let d = spec.d();
    let mut best = Q::zero();
    for j in 1..=d {
        let s = spec.coefficient_law(j).sup_abs_from(d)?;
        best = best.max(s / pow_q(rho, j as i64));
    }
    let short = dyadic_bound(q_to_f64(&best), RADIUS_BITS, true).ok()?;
    Some(if short >= best { short } else { best })
}

/// Bounded-class certificate minimising `(2K+2) rho` over a grid of `rho`
/// built from the characteristic moduli times `2^{-5..5}`, the declared
/// `rho`, and `overrides`.
pub fn cert_bounded(spec: &RecurrenceSpec, overrides: &[Q]) -> Result<DominationCertificate> {
    let d = spec.d();
    let mut grid: Vec<Q> = overrides.iter().filter(|r| r.is_positive()).cloned().collect();
    let mut bases: Vec<f64> = match spec.characteristic_data() {
        Ok((roots, _)) => roots.moduli().into_iter().filter(|m| *m > 0.0).collect(),
        Err(_) => Vec::new(),
    };
    if bases.is_empty() {
        bases.push(1.0);
    }
    for m in bases {
        let m = dyadic_bound(m, RADIUS_BITS, true)?;
        for e in -5i64..=5 {
            grid.push(&m * pow_q(&Q::from_integer(2.into()), e));
        }
    }
    if let Some(b) = &spec.declared_bounds {
        grid.push(b.rho.clone());
    }
    let two = Q::from_integer(2.into());
    let mut best: Option<(Q, Q, Q)> = None;
    for rho in grid {
        let Some(k) = uniform_k(spec, &rho) else { continue };
        let nu = (&two * &k + &two) * &rho;
        if best.as_ref().is_none_or(|b| nu < b.0) {
            best = Some((nu, k, rho));
        }
    }
    if let Some(b) = &spec.declared_bounds {
        // A declared pair counts as admissible when the law cannot refute it.
        let refuted = uniform_k(spec, &b.rho).is_some_and(|k| k > b.k);
        if refuted {
            return Err(Error::Invalid("declared (K, rho) violated by the coefficient law".into()));
        }
        let nu = (&two * &b.k + &two) * &b.rho;
        if best.as_ref().is_none_or(|bb| nu < bb.0) {
            best = Some((nu, b.k.clone(), b.rho.clone()));
        }
    }
    let (_, k, rho) = best.ok_or_else(|| Error::NoCertifiableTail("no uniform bound on c_j(k)".into()))?;
    cert_bounded_pair(d, &k, &rho)
}

/// Poincare-type certificate `(N^ + d, 2^{-(d+3)}/rho, 2^{(d+3)N})` where
/// `N^` is the smallest `n >= 0` with `|psi_j(k)| <= 2^d rho^j` for all
/// `k > n`, `k >= d`.
pub fn cert_poincare(spec: &RecurrenceSpec) -> Result<DominationCertificate> {
    let d = spec.d();
    let (rho_lo, rho_hi) = spec.rho_bracket()?;
    let two_d = pow_q(&Q::from_integer(2.into()), d as i64);
    let mut n_hat = 0;
    for j in 1..=d {
        let t = &two_d * pow_q(&rho_lo, j as i64);
        let nj = spec
            .psi(j)
            .first_tail_within(&t, d)
            .ok_or_else(|| Error::NoCertifiableTail(format!("psi_{j} never settles below 2^d rho^j")))?;
        n_hat = n_hat.max(nj);
    }
    poincare_from_threshold(d, n_hat, &rho_hi, Method::Poincare)
}

/// Variant driven by a declared `delta_k`: `N^` is the smallest `n` with
/// `delta_k <= 2^d` for all `k > n`.
pub fn cert_poincare_delta(spec: &RecurrenceSpec) -> Result<DominationCertificate> {
    let d = spec.d();
    let delta = spec
        .delta
        .as_ref()
        .ok_or_else(|| Error::Invalid("spec declares no delta sequence".into()))?;
    let (_, rho_hi) = spec.rho_bracket()?;
    let two_d = pow_q(&Q::from_integer(2.into()), d as i64);
    let n_hat = delta
        .first_tail_within(&two_d, d)
        .ok_or_else(|| Error::NoCertifiableTail("delta_k never settles below 2^d".into()))?;
    poincare_from_threshold(d, n_hat, &rho_hi, Method::PoincareDelta)
}

fn poincare_from_threshold(d: usize, n_hat: usize, rho_hi: &Q, method: Method) -> Result<DominationCertificate> {
    if !rho_hi.is_positive() {
        return Err(Error::DegenerateSpec);
    }
    let n = n_hat + d;
    let r = dyadic_bound(2f64.powi(-(d as i32 + 3)) / q_to_f64(rho_hi), RADIUS_BITS, false)?;
    let c = pow_q(&Q::from_integer(2.into()), ((d + 3) * n) as i64);
    Ok(DominationCertificate::new(n, r, SRule::Constant { c })?.with(
        method,
        &[
            ("n_hat", n_hat.to_string()),
            ("n_hat_range", "n >= 0, k >= d".to_string()),
            ("rho_upper", q_to_f64(rho_hi).to_string()),
        ],
    ))
}

/// First-nonzero-coefficient certificate on a concrete sequence; `S(k)` is
/// tabulated so the ratio is exactly one wherever `a_k != 0`.
pub fn cert_trivial<T: Scalar>(seq: &CoefficientSequence<T>, r: &Q) -> Result<DominationCertificate> {
    if !r.is_positive() {
        return Err(Error::Invalid("radius must be positive".into()));
    }
    let n = seq.first_nonzero().ok_or(Error::AllZero)?;
    if seq.len() >= 40 {
        if let Ok(est) = radius_estimate(seq, seq.len() / 2, Some(&[])) {
            if !est.eventually_zero && q_to_f64(r) * est.estimate > 1.05 {
                return Err(Error::Invalid(format!(
                    "R = {} exceeds the estimated radius {}",
                    q_to_f64(r),
                    1.0 / est.estimate
                )));
            }
        }
    }
    let an = abs_rational(&seq.values[n]);
    let values = (n + 1..seq.len())
        .map(|k| abs_rational(&seq.values[k]) * pow_q(r, (k - n) as i64) / &an)
        .collect();
    Ok(DominationCertificate::new(n, r.clone(), SRule::Trivial { start: n + 1, values })?
        .with(Method::Trivial, &[("first_nonzero", n.to_string())]))
}

/// Lipschitz families: `(d, 1/C, max(1, C)^d)`.
pub fn cert_lipschitz<T>(cfg: &LipschitzFamilyConfig<T>) -> Result<DominationCertificate> {
    if !cfg.c.is_positive() {
        return Err(Error::Invalid("C must be positive".into()));
    }
    let k = cfg.c.clone().max(Q::one());
    let c = pow_q(&k, cfg.d as i64);
    Ok(DominationCertificate::new(cfg.d, cfg.c.recip(), SRule::Constant { c })?
        .with(Method::Lipschitz, &[("C", crate::scalar::format_rational(&cfg.c))]))
}

/// Lower-bound constant: the smallest `C` making `(n, r, C)` pass on the
/// prefix `values[..=horizon]`, or `None` when `a_0..a_n` vanish but the tail
/// does not.
pub fn minimal_constant<T: Scalar>(values: &[T], n: usize, r: &Q, horizon: usize) -> Option<Q> {
    let m = (0..=n.min(values.len() - 1))
        .map(|i| abs_rational(&values[i]) * pow_q(r, i as i64))
        .fold(Q::zero(), |a, b| a.max(b));
    let mut best = Q::zero();
    for k in n + 1..=horizon.min(values.len() - 1) {
        if values[k].is_zero() {
            continue;
        }
        if m.is_zero() {
            return None;
        }
        best = best.max(abs_rational(&values[k]) * pow_q(r, k as i64) / &m);
    }
    Some(best)
}

/// Law view of a tabulated rule, used by callers that want sup bounds.
pub fn rule_as_law(rule: &SRule) -> Option<IndexLaw> {
    match rule {
        SRule::Constant { c } => Some(IndexLaw::constant(c.clone())),
        SRule::Tabulated { start, values } | SRule::Trivial { start, values } => Some(IndexLaw::Tabulated {
            start: *start,
            values: values.clone(),
            tail_bound: None,
        }),
        SRule::Turan { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;
    use std::sync::Arc;

    const PHI: f64 = 1.618_033_988_749_895;

    fn fib() -> RecurrenceSpec {
        RecurrenceSpec::constant(vec![int(1), int(1)]).unwrap()
    }

    #[test]
    fn verify_examples() {
        let s = fib().generate(&[int(0), int(1)], 200).unwrap();
        let cert = cert_turan(&fib()).unwrap();
        assert!(verify(&s.values, &cert, 200).unwrap().pass);

        let mut v = vec![int(0); 50];
        v[0] = int(1);
        for r in [rat(1, 3), int(1), int(7)] {
            let c = DominationCertificate::new(0, r, SRule::Constant { c: int(1) }).unwrap();
            assert!(verify(&v, &c, 49).unwrap().pass);
        }

        let geo: Vec<Q> = (0..10).map(|k| int(1 << k)).collect();
        let c = DominationCertificate::new(0, int(1), SRule::Constant { c: int(1) }).unwrap();
        let rep = verify(&geo, &c, 9).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_failure, Some(1));
        assert!((rep.ratio(1).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(rep.worst_k, Some(9));
    }

    #[test]
    fn vanishing_prefix_is_a_failure() {
        let v = vec![int(0), int(0), int(3)];
        let c = DominationCertificate::new(1, int(1), SRule::Constant { c: int(100) }).unwrap();
        let rep = verify(&v, &c, 2).unwrap();
        assert!(!rep.pass);
        assert!(rep.diagnostic.is_some());
    }

    #[test]
    fn exact_ties_are_decided_exactly() {
        // a_k = 2^k, R = 1/2, C = 1: every ratio is exactly one.
        let v: Vec<Q> = (0..30).map(|k| int(1 << k)).collect();
        let c = DominationCertificate::new(0, rat(1, 2), SRule::Constant { c: int(1) }).unwrap();
        let rep = verify(&v, &c, 29).unwrap();
        assert!(rep.pass && rep.exact);
        let f: Vec<f64> = (0..30).map(|k| 2f64.powi(k)).collect();
        let rep = verify(&f, &c, 29).unwrap();
        assert!(rep.pass && rep.tight && !rep.exact);
    }

    #[test]
    fn turan_examples() {
        let c = cert_turan(&fib()).unwrap();
        assert_eq!(c.n, 1);
        assert!((q_to_f64(&c.r) - 1.0 / PHI).abs() < 1e-9);
        assert!(c.r < rat(6181, 10000));
        let g = cert_turan(&RecurrenceSpec::constant(vec![int(1)]).unwrap()).unwrap();
        assert_eq!(g.n, 0);
        assert!((q_to_f64(&g.r) - 1.0).abs() < 1e-9);
        assert!((g.s_rule.ln_at(3).unwrap() - (2.0 * std::f64::consts::E * 4.0).ln()).abs() < 1e-12);
        let pm2 = cert_turan(&RecurrenceSpec::constant(vec![int(0), int(4)]).unwrap()).unwrap();
        assert_eq!(pm2.n, 1);
        assert!((q_to_f64(&pm2.r) - 0.5).abs() < 1e-9);
        assert!(cert_turan(&RecurrenceSpec::constant(vec![int(0)]).unwrap()).is_err());
    }

    #[test]
    fn bounded_examples() {
        let one = RecurrenceSpec::constant(vec![int(1)]).unwrap();
        let c = cert_bounded_pair(1, &int(1), &int(1)).unwrap();
        assert_eq!((c.n, c.r.clone(), c.constant().cloned()), (0, rat(1, 4), Some(int(1))));
        let s = one.generate(&[int(5)], 300).unwrap();
        assert!(verify(&s.values, &c, 300).unwrap().pass);
        // declared |c_j(k)| <= 2 * 3^j
        let spec = RecurrenceSpec::constant(vec![int(1), int(2), int(-3)]).unwrap().with_bounds(int(2), int(3));
        let c = cert_bounded_pair(spec.d(), &int(2), &int(3)).unwrap();
        assert_eq!(c.r, rat(1, 18));
        assert_eq!(c.constant(), Some(&int(36)));
        let c = cert_bounded(&fib(), &[]).unwrap();
        let s = fib().generate(&[int(0), int(1)], 200).unwrap();
        assert!(verify(&s.values, &c, 200).unwrap().pass);
        let untabled = RecurrenceSpec::new(
            vec![int(1)],
            vec![IndexLaw::Tabulated {
                start: 1,
                values: vec![int(1); 4],
                tail_bound: None,
            }],
        )
        .unwrap();
        assert!(matches!(cert_bounded(&untabled, &[]), Err(Error::NoCertifiableTail(_))));
    }

    #[test]
    fn poincare_examples() {
        let c = cert_poincare(&fib()).unwrap();
        assert_eq!(c.n, 2);
        assert!((q_to_f64(&c.r) - 1.0 / 32.0 / PHI).abs() < 1e-9);
        assert_eq!(c.constant(), Some(&int(1 << 10)));
        let s = fib().generate(&[int(0), int(1)], 300).unwrap();
        assert!(verify(&s.values, &c, 300).unwrap().pass);

        let h = RecurrenceSpec::new(vec![int(1)], vec![IndexLaw::harmonic(int(1))]).unwrap();
        let c = cert_poincare(&h).unwrap();
        assert_eq!(c.notes["n_hat"], "0");
        assert_eq!(c.n, 1);
        assert!(c.r <= rat(1, 16) && q_to_f64(&c.r) > 0.0624999);
        assert_eq!(c.constant(), Some(&int(1 << 4)));

        let delta = RecurrenceSpec::new(vec![int(1), int(1)], vec![IndexLaw::harmonic(rat(1, 2)), IndexLaw::harmonic(rat(1, 2))])
            .unwrap()
            .with_delta(IndexLaw::harmonic(int(1)));
        let c = cert_poincare_delta(&delta).unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.constant(), Some(&int(1 << 10)));
        let s = delta.generate(&[int(1), int(-1)], 300).unwrap();
        assert!(verify(&s.values, &c, 300).unwrap().pass);
    }

    #[test]
    fn trivial_examples() {
        let s = CoefficientSequence::external(vec![int(0), int(0), int(5), int(1), int(0)], "x");
        assert_eq!(cert_trivial(&s, &int(1)).unwrap().n, 2);
        let ones = CoefficientSequence::external(vec![int(1); 60], "ones");
        let c = cert_trivial(&ones, &rat(1, 2)).unwrap();
        assert_eq!(c.s_rule.exact_at(3), Some(rat(1, 8)));
        let rep = verify(&ones.values, &c, 59).unwrap();
        assert!(rep.pass);
        assert!(rep.log_ratios.iter().all(|l| l.unwrap().abs() < 1e-12));
        let f = fib().generate(&[int(0), int(1)], 200).unwrap();
        let r = dyadic_bound(1.0 / PHI, 40, false).unwrap();
        let c = cert_trivial(&f, &r).unwrap();
        // S(k) = a_k phi^{1-k} stays bounded
        let s100 = q_to_f64(&c.s_rule.exact_at(100).unwrap());
        assert!(s100 < 1.0 && s100 > 0.1);
        assert!(verify(&f.values, &c, 200).unwrap().pass);
        assert_eq!(cert_trivial(&CoefficientSequence::external(vec![int(0); 3], "z"), &int(1)), Err(Error::AllZero));
        assert!(cert_trivial(&ones, &int(2)).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let mk = |d, c: Q| LipschitzFamilyConfig::<Q> {
            d,
            c,
            delta: int(1),
            phi: Arc::new(|_, _| Q::zero()),
        };
        let c = cert_lipschitz(&mk(2, int(1))).unwrap();
        assert_eq!((c.n, c.r.clone(), c.constant().cloned()), (2, int(1), Some(int(1))));
        let c = cert_lipschitz(&mk(3, int(2))).unwrap();
        assert_eq!((c.n, c.r.clone(), c.constant().cloned()), (3, rat(1, 2), Some(int(8))));
        let c = cert_lipschitz(&mk(1, rat(1, 2))).unwrap();
        assert_eq!((c.n, c.r.clone(), c.constant().cloned()), (1, int(2), Some(int(1))));
        assert!(cert_lipschitz(&mk(1, int(0))).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let c = cert_turan(&fib()).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: DominationCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    fn arb_constant_spec() -> impl Strategy<Value = (RecurrenceSpec, Vec<Q>)> {
        (1usize..=5)
            .prop_flat_map(|d| {
                (
                    prop::collection::vec((-5i64..=5, 1i64..4), d),
                    prop::collection::vec((-9i64..=9, 1i64..4), d),
                )
            })
            .prop_filter_map("degenerate", |(c, init)| {
                let c: Vec<Q> = c.into_iter().map(|(n, m)| rat(n, m)).collect();
                let init: Vec<Q> = init.into_iter().map(|(n, m)| rat(n, m)).collect();
                let s = RecurrenceSpec::constant(c).unwrap();
                (!s.is_degenerate()).then_some((s, init))
            })
    }

    fn arb_poincare_spec() -> impl Strategy<Value = (RecurrenceSpec, Vec<Q>)> {
        (arb_constant_spec(), prop::collection::vec((0u8..3, -5i64..=5), 5)).prop_map(|((s, init), p)| {
            let d = s.d();
            let laws = p
                .into_iter()
                .take(d)
                .map(|(kind, v)| match kind {
                    0 => IndexLaw::Zero,
                    1 => IndexLaw::harmonic(int(v)),
                    _ => IndexLaw::dyadic_decay(int(v)),
                })
                .collect();
            (RecurrenceSpec::new(s.constant_part, laws).unwrap(), init)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn turan_is_sound((spec, init) in arb_constant_spec()) {
            let c = cert_turan(&spec).unwrap();
            let s = spec.generate(&init, 300).unwrap();
            let rep = verify(&s.values, &c, 300).unwrap();
            prop_assert!(rep.pass, "{:?}", rep.first_failure);
        }

        #[test]
        fn bounded_is_sound((spec, init) in arb_poincare_spec()) {
            let c = cert_bounded(&spec, &[]).unwrap();
            let s = spec.generate(&init, 300).unwrap();
            prop_assert!(verify(&s.values, &c, 300).unwrap().pass);
        }

        #[test]
        fn poincare_is_sound((spec, init) in arb_poincare_spec()) {
            let c = cert_poincare(&spec).unwrap();
            let s = spec.generate(&init, 300).unwrap();
            prop_assert!(verify(&s.values, &c, 300).unwrap().pass);
        }

        #[test]
        fn shrinking_r_and_growing_n_keep_a_pass((spec, init) in arb_constant_spec(), shrink in 1i64..8, extra in 0usize..3) {
            let c = cert_turan(&spec).unwrap();
            let s = spec.generate(&init, 120).unwrap();
            prop_assert!(verify(&s.values, &c, 120).unwrap().pass);
            let mut smaller = c.clone();
            smaller.r = &c.r * rat(shrink, shrink + 1);
            prop_assert!(verify(&s.values, &smaller, 120).unwrap().pass);
            // Growing N keeps a pass when the prefix max does not shrink; the
            // chain |a_k|R^k <= S M_N <= S M_N' is checked literally.
            let m = |n: usize| (0..=n).map(|i| abs_rational(&s.values[i]) * pow_q(&c.r, i as i64)).fold(Q::zero(), |a, b| a.max(b));
            let n2 = c.n + extra;
            prop_assert!(m(n2) >= m(c.n));
            let mut wider = c.clone();
            wider.n = n2;
            prop_assert!(verify(&s.values, &wider, 120).unwrap().pass);
        }
    }
}
