//! Non-stationary polynomial recurrences `a_k = P_k(a_{k-1}, .., a_{k-d})`
//! with coefficients in `Q[lambda_1, .., lambda_n]`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::{serde_q, Error, QMultiPoly, Rational, Result};

/// Default cap on the number of stored monomials in one polynomial.
pub const MONOMIAL_CAP: usize = 1_000_000;

/// One term `A_{k,alpha}(lambda) u^alpha` of `P_k`; `u_j` stands for `a_{k-j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    #[serde(with = "serde_q::multipoly")]
    pub coeff: QMultiPoly,
}

impl PolyTerm {
    pub fn new(alpha: Vec<u32>, coeff: QMultiPoly) -> Self {
        PolyTerm { alpha, coeff }
    }

    /// `|alpha|`.
    pub fn u_degree(&self) -> u32 {
        self.alpha.iter().sum()
    }

    /// `A(lambda) u_j` with `A = sum_i c_i lambda_i`.
    pub fn linear(d: usize, j: usize, lambda_coeffs: &[Rational]) -> Self {
        let nvars = lambda_coeffs.len();
        let mut alpha = vec![0; d];
        alpha[j - 1] = 1;
        let coeff = QMultiPoly::from_terms(
            nvars,
            lambda_coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; nvars];
                e[i] = 1;
                (e, c.clone())
            }),
        );
        PolyTerm { alpha, coeff }
    }
}

/// Length-`d` recurrence. `rules[i]` is `P_{d+i}`; the last rule repeats for
/// every later `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecurrence")]
pub struct ParametricRecurrence {
    pub d: usize,
    pub nvars: usize,
    pub rules: Vec<Vec<PolyTerm>>,
    /// Linear subclass: every term is `A_{k,j}(lambda) u_j` with `A_{k,j}`
    /// homogeneous of degree one.
    pub linear: bool,
    /// Declared bound on every `|A_{k,alpha,beta}|`.
    #[serde(with = "serde_q::opt", default)]
    pub coefficient_bound: Option<Rational>,
}

#[derive(Deserialize)]
struct RawRecurrence {
    d: usize,
    nvars: usize,
    rules: Vec<Vec<PolyTerm>>,
    #[serde(default)]
    linear: bool,
    #[serde(with = "serde_q::opt", default)]
    coefficient_bound: Option<Rational>,
}

impl TryFrom<RawRecurrence> for ParametricRecurrence {
    type Error = Error;

    fn try_from(r: RawRecurrence) -> Result<Self> {
        ParametricRecurrence::new(r.d, r.nvars, r.rules, r.linear, r.coefficient_bound)
    }
}

impl ParametricRecurrence {
    pub fn new(
        d: usize,
        nvars: usize,
        rules: Vec<Vec<PolyTerm>>,
        linear: bool,
        coefficient_bound: Option<Rational>,
    ) -> Result<Self> {
        let rec = ParametricRecurrence {
            d,
            nvars,
            rules,
            linear,
            coefficient_bound,
        };
        rec.validate()?;
        Ok(rec)
    }

    /// Stationary linear recurrence `a_k = sum_j (sum_i c_{j,i} lambda_i) a_{k-j}`.
    pub fn stationary_linear(c: &[Vec<Rational>]) -> Result<Self> {
        let d = c.len();
        let nvars = c.first().map_or(0, |r| r.len());
        let rule = c.iter().enumerate().map(|(j, row)| PolyTerm::linear(d, j + 1, row)).collect();
        Self::new(d, nvars, vec![rule], true, None)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Invalid("recurrence length must be positive".into()));
        }
        if self.rules.is_empty() {
            return Err(Error::Invalid("at least one rule P_k is required".into()));
        }
        for (i, rule) in self.rules.iter().enumerate() {
            let k = self.d + i;
            for t in rule {
                if t.alpha.len() != self.d {
                    return Err(Error::Invalid(format!("P_{k}: exponent {:?} is not of length {}", t.alpha, self.d)));
                }
                if t.coeff.nvars() != self.nvars {
                    return Err(Error::Invalid(format!("P_{k}: coefficient in {} variables, expected {}", t.coeff.nvars(), self.nvars)));
                }
                if t.u_degree() == 0 && !t.coeff.is_zero() {
                    return Err(Error::Invalid(format!("P_{k} has a u-constant term; ideals are not preserved")));
                }
                if self.linear && !t.coeff.is_zero() {
                    let homogeneous = t.coeff.degree() == Some(1) && t.coeff.min_degree() == Some(1);
                    if t.u_degree() != 1 || !homogeneous {
                        return Err(Error::Invalid(format!("P_{k} leaves the linear subclass")));
                    }
                }
                if let Some(b) = &self.coefficient_bound {
                    if t.coeff.terms().any(|(_, c)| c.abs() > *b) {
                        return Err(Error::Invalid(format!("P_{k} exceeds the declared coefficient bound")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rule(&self, k: usize) -> &[PolyTerm] {
        let i = k.saturating_sub(self.d).min(self.rules.len() - 1);
        &self.rules[i]
    }

    /// Substitutes `lambda = point`, giving a recurrence over `Q` (zero variables).
    pub fn specialize(&self, point: &[Rational]) -> Result<Self> {
        if point.len() != self.nvars {
            return Err(Error::Invalid(format!("point has {} coordinates, expected {}", point.len(), self.nvars)));
        }
        let rules = self
            .rules
            .iter()
            .map(|rule| {
                rule.iter()
                    .map(|t| PolyTerm::new(t.alpha.clone(), QMultiPoly::constant(0, t.coeff.eval(point))))
                    .collect()
            })
            .collect();
        Ok(ParametricRecurrence {
            d: self.d,
            nvars: 0,
            rules,
            linear: false,
            coefficient_bound: None,
        })
    }

    /// Recursive bound `B_k = max_alpha (deg A_{k,alpha} + sum_j alpha_j B_{k-j})`
    /// on `deg a_k`, seeded with the degrees of the initial data. `None` marks
    /// a term that is identically zero.
    pub fn degree_bounds(&self, init: &[Option<u32>], horizon: usize) -> Vec<Option<u32>> {
        let mut b: Vec<Option<u32>> = init.to_vec();
        for k in self.d..=horizon {
            let mut best: Option<u32> = None;
            'terms: for t in self.rule(k) {
                let Some(mut deg) = t.coeff.degree() else { continue };
                for (j, &e) in t.alpha.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match b[k - 1 - j] {
                        Some(bj) => deg += e * bj,
                        None => continue 'terms,
                    }
                }
                best = Some(best.map_or(deg, |v| v.max(deg)));
            }
            b.push(best);
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesProvenance {
    pub recurrence: ParametricRecurrence,
    #[serde(with = "serde_q::multipoly::vec")]
    pub init: Vec<QMultiPoly>,
}

/// `a_0(lambda) .. a_K(lambda)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametricSeries {
    pub nvars: usize,
    #[serde(with = "serde_q::multipoly::vec")]
    pub terms: Vec<QMultiPoly>,
    pub degrees: Vec<Option<u32>>,
    pub provenance: SeriesProvenance,
}

impl ParametricSeries {
    pub fn horizon(&self) -> usize {
        self.terms.len() - 1
    }

    /// `a_k(point)` for every stored `k`.
    pub fn specialize(&self, point: &[Rational]) -> Vec<Rational> {
        self.terms.iter().map(|a| a.eval(point)).collect()
    }

    /// Largest number of monomials in one stored term.
    pub fn max_terms(&self) -> usize {
        self.terms.iter().map(|a| a.len()).max().unwrap_or(0)
    }
}

pub(crate) fn check_init(rec: &ParametricRecurrence, init: &[QMultiPoly]) -> Result<()> {
    if init.len() != rec.d {
        return Err(Error::Invalid(format!("need {} initial terms, got {}", rec.d, init.len())));
    }
    if let Some(p) = init.iter().find(|p| p.nvars() != rec.nvars) {
        return Err(Error::Invalid(format!("initial term in {} variables, expected {}", p.nvars(), rec.nvars)));
    }
    rec.validate()
}

pub(crate) fn cap_check(p: &QMultiPoly, k: usize, cap: usize) -> Result<()> {
    if p.len() > cap {
        return Err(Error::SizeCap(format!("a_{k} has {} monomials (cap {cap})", p.len())));
    }
    Ok(())
}

/// Powers `u_j^e` for the exponents a rule needs.
pub(crate) struct PowerCache<'a> {
    base: &'a [QMultiPoly],
    k: usize,
    cache: Vec<Vec<QMultiPoly>>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(base: &'a [QMultiPoly], k: usize, d: usize) -> Self {
        PowerCache {
            base,
            k,
            cache: vec![Vec::new(); d],
        }
    }

    /// `a_{k-j}^e` for the 1-based lag `j`.
    pub(crate) fn pow(&mut self, j: usize, e: u32) -> &QMultiPoly {
        let u = &self.base[self.k - j];
        let c = &mut self.cache[j - 1];
        if c.is_empty() {
            c.push(QMultiPoly::one(u.nvars()));
        }
        while c.len() <= e as usize {
            let next = c.last().expect("seeded").mul(u);
            c.push(next);
        }
        &c[e as usize]
    }

    /// `u^alpha`, skipping one factor of `u_skip` when given.
    pub(crate) fn monomial(&mut self, alpha: &[u32], skip: Option<usize>) -> QMultiPoly {
        let nvars = self.base[0].nvars();
        let mut acc = QMultiPoly::one(nvars);
        for (idx, &e) in alpha.iter().enumerate() {
            let j = idx + 1;
            let e = if skip == Some(j) { e - 1 } else { e };
            if e > 0 {
                acc = acc.mul(self.pow(j, e));
            }
        }
        acc
    }
}

pub fn generate_parametric(rec: &ParametricRecurrence, init: &[QMultiPoly], horizon: usize) -> Result<ParametricSeries> {
    generate_capped(rec, init, horizon, MONOMIAL_CAP)
}

pub fn generate_capped(rec: &ParametricRecurrence, init: &[QMultiPoly], horizon: usize, cap: usize) -> Result<ParametricSeries> {
    check_init(rec, init)?;
    let mut terms: Vec<QMultiPoly> = init.iter().take(horizon + 1).cloned().collect();
    for k in rec.d..=horizon {
        let mut cache = PowerCache::new(&terms, k, rec.d);
        let mut a = QMultiPoly::zero(rec.nvars);
        for t in rec.rule(k) {
            if t.coeff.is_zero() {
                continue;
            }
            let m = cache.monomial(&t.alpha, None);
            if !m.is_zero() {
                a.add_assign(&t.coeff.mul(&m));
            }
        }
        cap_check(&a, k, cap)?;
        terms.push(a);
    }
    let degrees = terms.iter().map(|a| a.degree()).collect();
    Ok(ParametricSeries {
        nvars: rec.nvars,
        terms,
        degrees,
        provenance: SeriesProvenance {
            recurrence: rec.clone(),
            init: init.to_vec(),
        },
    })
}

/// Scalar evaluation of a zero-variable recurrence, without polynomial arithmetic.
pub fn generate_values(rec: &ParametricRecurrence, init: &[Rational], horizon: usize) -> Result<Vec<Rational>> {
    if rec.nvars != 0 {
        return Err(Error::Invalid("specialize the recurrence before evaluating it".into()));
    }
    if init.len() != rec.d {
        return Err(Error::Invalid(format!("need {} initial values, got {}", rec.d, init.len())));
    }
    let mut a: Vec<Rational> = init.iter().take(horizon + 1).cloned().collect();
    for k in rec.d..=horizon {
        let mut acc = Rational::zero();
        for t in rec.rule(k) {
            let mut v = t.coeff.coeff(&[]);
            for (idx, &e) in t.alpha.iter().enumerate() {
                for _ in 0..e {
                    v *= &a[k - 1 - idx];
                }
            }
            acc += v;
        }
        a.push(acc);
    }
    Ok(a)
}

/// `lambda_1^p` style helper: the monomial with the given exponent and coefficient one.
pub fn lambda_monomial(exp: Vec<u32>) -> QMultiPoly {
    QMultiPoly::monomial(Rational::one(), exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::int;

    fn var(n: usize, i: usize) -> QMultiPoly {
        QMultiPoly::var(n, i)
    }

    #[test]
    fn power_series_of_lambda() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1)]]).unwrap();
        let ps = generate_parametric(&rec, &[QMultiPoly::one(1)], 12).unwrap();
        for (k, a) in ps.terms.iter().enumerate() {
            assert_eq!(*a, lambda_monomial(vec![k as u32]));
        }
    }

    #[test]
    fn two_variable_hand_unroll() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let ps = generate_parametric(&rec, &[var(2, 0), var(2, 1)], 3).unwrap();
        let l1 = var(2, 0);
        let l2 = var(2, 1);
        assert_eq!(ps.terms[2], l1.mul(&l2).scale(&int(2)));
        let a3 = l1.pow(2).mul(&l2).scale(&int(2)).add(&l2.pow(2));
        assert_eq!(ps.terms[3], a3);
    }

    #[test]
    fn zero_init_stays_zero() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1), int(2)], vec![int(3), int(-1)]]).unwrap();
        let ps = generate_parametric(&rec, &[QMultiPoly::zero(2), QMultiPoly::zero(2)], 20).unwrap();
        assert!(ps.terms.iter().all(|a| a.is_zero()));
    }

    #[test]
    fn constant_term_is_rejected() {
        let t = PolyTerm::new(vec![0], QMultiPoly::one(1));
        let err = ParametricRecurrence::new(1, 1, vec![vec![t]], false, None).unwrap_err();
        assert!(matches!(err, Error::Invalid(m) if m.contains("u-constant")));
    }

    #[test]
    fn linear_flag_is_checked() {
        let t = PolyTerm::new(vec![2], var(1, 0));
        assert!(ParametricRecurrence::new(1, 1, vec![vec![t.clone()]], true, None).is_err());
        assert!(ParametricRecurrence::new(1, 1, vec![vec![t]], false, None).is_ok());
        let affine = PolyTerm::new(vec![1], var(1, 0).add(&QMultiPoly::one(1)));
        assert!(ParametricRecurrence::new(1, 1, vec![vec![affine]], true, None).is_err());
    }

    #[test]
    fn coefficient_bound_is_checked() {
        let t = PolyTerm::new(vec![1], var(1, 0).scale(&int(5)));
        assert!(ParametricRecurrence::new(1, 1, vec![vec![t.clone()]], false, Some(int(4))).is_err());
        assert!(ParametricRecurrence::new(1, 1, vec![vec![t]], false, Some(int(5))).is_ok());
    }

    #[test]
    fn cap_aborts_squaring() {
        // a_k = (lambda_1 + lambda_2) a_{k-1}^2 has 2^{k+1} monomials
        let s = var(2, 0).add(&var(2, 1));
        let rec = ParametricRecurrence::new(1, 2, vec![vec![PolyTerm::new(vec![2], s.clone())]], false, None).unwrap();
        assert!(generate_capped(&rec, &[s.clone()], 3, 20).is_ok());
        let err = generate_capped(&rec, &[s], 10, 20).unwrap_err();
        assert!(matches!(err, Error::SizeCap(_)));
    }

    #[test]
    fn serde_round_trip() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"1\""));
        let back: ParametricRecurrence = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
        let bad = s.replace("\"alpha\":[1,0]", "\"alpha\":[0,0]");
        assert!(serde_json::from_str::<ParametricRecurrence>(&bad).is_err());
    }
}
