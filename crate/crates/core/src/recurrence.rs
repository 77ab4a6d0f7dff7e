//! Linear recurrences `a_k = sum_j c_j(k) a_{k-j}` with `c_j(k) = c_j + psi_j(k)`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::law::IndexLaw;
use crate::poly::UniPoly;
use crate::roots::{roots_exact, RootSet};
use crate::scalar::{pow_q, q_to_f64, rational_bound, Scalar};
use crate::{serde_q, Error, Result};

type Q = BigRational;

/// Declared uniform bound `|c_j(k)| <= K rho^j` for all `k >= d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclaredBounds {
    #[serde(with = "serde_q::one")]
    pub k: Q,
    #[serde(with = "serde_q::one")]
    pub rho: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    /// `c_1 .. c_d`.
    #[serde(with = "serde_q::vec")]
    pub constant_part: Vec<Q>,
    /// `psi_1 .. psi_d`; empty means identically zero.
    #[serde(default)]
    pub perturbation: Vec<IndexLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_bounds: Option<DeclaredBounds>,
    /// `delta_k` with `|psi_j(k)| <= delta_k rho^j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<IndexLaw>,
}

impl RecurrenceSpec {
    pub fn new(constant_part: Vec<Q>, perturbation: Vec<IndexLaw>) -> Result<Self> {
        let s = RecurrenceSpec {
            constant_part,
            perturbation,
            declared_bounds: None,
            delta: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Constant-coefficient recurrence.
    pub fn constant(c: Vec<Q>) -> Result<Self> {
        Self::new(c, Vec::new())
    }

    pub fn with_bounds(mut self, k: Q, rho: Q) -> Self {
        self.declared_bounds = Some(DeclaredBounds { k, rho });
        self
    }

    pub fn with_delta(mut self, delta: IndexLaw) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.constant_part.is_empty() {
            return Err(Error::Invalid("recurrence length must be at least 1".into()));
        }
        if !self.perturbation.is_empty() && self.perturbation.len() != self.d() {
            return Err(Error::Invalid(format!(
                "{} perturbation laws for length {}",
                self.perturbation.len(),
                self.d()
            )));
        }
        if let Some(b) = &self.declared_bounds {
            if b.k.is_negative() || !b.rho.is_positive() {
                return Err(Error::Invalid("declared bounds need K >= 0, rho > 0".into()));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.constant_part.len()
    }

    pub fn psi(&self, j: usize) -> &IndexLaw {
        self.perturbation.get(j - 1).unwrap_or(&IndexLaw::Zero)
    }

    /// Full law of `c_j(k)` for `j` in `1..=d`.
    pub fn coefficient_law(&self, j: usize) -> IndexLaw {
        IndexLaw::constant(self.constant_part[j - 1].clone()).plus(self.psi(j).clone())
    }

    pub fn is_constant(&self) -> bool {
        self.perturbation.iter().all(|p| p.is_zero())
    }

    pub fn is_degenerate(&self) -> bool {
        self.constant_part.iter().all(|c| c.is_zero()) && self.is_constant()
    }

    /// `[c_1(k), .., c_d(k)]`.
    pub fn coefficients(&self, k: usize) -> Result<Vec<Q>> {
        (1..=self.d())
            .map(|j| Ok(&self.constant_part[j - 1] + self.psi(j).eval(k)?))
            .collect()
    }

    /// `sigma^d - sum_j c_j sigma^{d-j}` in ascending order.
    pub fn characteristic_poly(&self) -> UniPoly<Q> {
        let d = self.d();
        let mut c = vec![Q::zero(); d + 1];
        for j in 1..=d {
            c[d - j] = -self.constant_part[j - 1].clone();
        }
        c[d] = Q::one();
        UniPoly::with_var(c, "sigma")
    }

    /// Characteristic roots and `rho = max |sigma_i|`.
    pub fn characteristic_data(&self) -> Result<(RootSet, f64)> {
        if self.constant_part.iter().all(|c| c.is_zero()) {
            return Err(Error::DegenerateSpec);
        }
        let roots = roots_exact(&self.characteristic_poly())?;
        let rho = roots.max_modulus();
        Ok((roots, rho))
    }

    /// Rational bracket `rho_lo <= rho <= rho_hi` from the root error radii.
    pub fn rho_bracket(&self) -> Result<(Q, Q)> {
        let (roots, _) = self.characteristic_data()?;
        let lo = rational_bound(roots.max_modulus_lower(), 1e-12, false)?;
        let hi = rational_bound(roots.max_modulus_upper(), 1e-12, true)?;
        Ok((lo.max(Q::zero()), hi))
    }

    /// Runs the recurrence from `init = (a_0..a_{d-1})` up to `a_horizon`.
    pub fn generate<T: Scalar>(&self, init: &[T], horizon: usize) -> Result<CoefficientSequence<T>> {
        let d = self.d();
        if init.len() != d {
            return Err(Error::Invalid(format!("need {d} initial values, got {}", init.len())));
        }
        if horizon < d {
            return Err(Error::TooShort {
                needed: d,
                have: horizon,
            });
        }
        let values = T::run_linear_recurrence(init, horizon, &mut |k| self.coefficients(k))?;
        self.check_declared(horizon)?;
        let init_q: Option<Vec<Q>> = init.iter().map(|v| v.to_rational()).collect();
        let provenance = match init_q {
            Some(init) => Provenance::Recurrence {
                spec: Box::new(self.clone()),
                init,
            },
            None => Provenance::External {
                label: "recurrence with non-real initial data".into(),
            },
        };
        Ok(CoefficientSequence { values, provenance })
    }

    /// Checks declared `(K, rho)` and `delta` bounds for `d <= k <= horizon`.
    pub fn check_declared(&self, horizon: usize) -> Result<()> {
        let d = self.d();
        if let Some(b) = &self.declared_bounds {
            for k in d..=horizon {
                for (j, c) in self.coefficients(k)?.iter().enumerate() {
                    if c.abs() > &b.k * pow_q(&b.rho, j as i64 + 1) {
                        return Err(Error::Invalid(format!("declared bound fails at k = {k}, j = {}", j + 1)));
                    }
                }
            }
        }
        if let Some(delta) = &self.delta {
            let (_, rho_hi) = self.rho_bracket()?;
            for k in d..=horizon {
                let dk = delta.eval(k)?;
                for j in 1..=d {
                    if self.psi(j).eval(k)?.abs() > &dk * pow_q(&rho_hi, j as i64) {
                        return Err(Error::Invalid(format!("delta bound fails at k = {k}, j = {j}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Where a sequence came from, enough to regenerate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Recurrence {
        spec: Box<RecurrenceSpec>,
        #[serde(with = "serde_q::vec")]
        init: Vec<Q>,
    },
    Lipschitz {
        d: usize,
        #[serde(with = "serde_q::one")]
        c: Q,
    },
    External { label: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence<T> {
    pub values: Vec<T>,
    pub provenance: Provenance,
}

impl<T: Scalar> CoefficientSequence<T> {
    pub fn external(values: Vec<T>, label: impl Into<String>) -> Self {
        CoefficientSequence {
            values,
            provenance: Provenance::External { label: label.into() },
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last term.
    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_zero())
    }

    /// Tail `a_m, a_{m+1}, ..` as a sequence of its own.
    pub fn shifted(&self, m: usize) -> Self {
        CoefficientSequence::external(self.values[m.min(self.len())..].to_vec(), format!("shift by {m}"))
    }

    /// Regenerates from provenance; `None` for external data.
    pub fn regenerate(&self) -> Option<Result<CoefficientSequence<T>>> {
        match &self.provenance {
            Provenance::Recurrence { spec, init } => {
                let init: Vec<T> = init.iter().map(T::from_rational).collect();
                Some(spec.generate(&init, self.horizon()))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub window: usize,
    /// Envelope growth rate, the estimate of `limsup |a_k|^{1/k}`.
    pub estimate: f64,
    /// Plain `|a_k|^{1/k}` at the last nonzero index of the window.
    pub kth_root: f64,
    pub eventually_zero: bool,
    pub nearest_modulus: Option<f64>,
    /// `|estimate - nearest| / nearest`.
    pub gap: Option<f64>,
}

/// Estimates `limsup |a_k|^{1/k}` on the trailing `window` terms.
///
/// Block maxima of `ln |a_k|` are fitted by `s k + c ln k + b`, which removes
/// both the polynomial factor `k^c` typical of Poincare-type perturbations and
/// the scale `b` of the initial data; the estimate is `exp(s)`. The result is
/// compared with `reference` moduli when given, otherwise with the
/// characteristic roots of the generating recurrence when known.
pub fn radius_estimate<T: Scalar>(
    seq: &CoefficientSequence<T>,
    window: usize,
    reference: Option<&[f64]>,
) -> Result<RadiusEstimate> {
    let kmax = seq.horizon();
    if window < 2 || seq.len() < window + 1 {
        return Err(Error::TooShort {
            needed: window + 1,
            have: seq.len(),
        });
    }
    let start = kmax + 1 - window;
    let logs: Vec<(usize, f64)> = (start..=kmax).map(|k| (k, seq.values[k].ln_modulus())).collect();
    let owned_ref;
    let reference = match reference {
        Some(r) => Some(r),
        None => match &seq.provenance {
            Provenance::Recurrence { spec, .. } => match spec.characteristic_data() {
                Ok((roots, _)) => {
                    owned_ref = roots.moduli();
                    Some(owned_ref.as_slice())
                }
                Err(_) => None,
            },
            _ => None,
        },
    };
    let last = logs.iter().rev().find(|(_, l)| l.is_finite());
    let Some(&(klast, llast)) = last else {
        return Ok(RadiusEstimate {
            window,
            estimate: 0.0,
            kth_root: 0.0,
            eventually_zero: true,
            nearest_modulus: reference.and_then(|r| nearest(r, 0.0)),
            gap: None,
        });
    };
    let kth_root = (llast / klast.max(1) as f64).exp();
    let block = (window / 25).max(4);
    let pts: Vec<(f64, f64)> = logs
        .chunks(block)
        .filter_map(|ch| {
            ch.iter()
                .filter(|(_, l)| l.is_finite())
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|&(k, l)| (k as f64, l))
        })
        .collect();
    let estimate = fit_growth(&pts).map(f64::exp).unwrap_or(kth_root);
    let nearest_modulus = reference.and_then(|r| nearest(r, estimate));
    let gap = nearest_modulus.map(|m| if m > 0.0 { (estimate - m).abs() / m } else { f64::INFINITY });
    Ok(RadiusEstimate {
        window,
        estimate,
        kth_root,
        eventually_zero: false,
        nearest_modulus,
        gap,
    })
}

fn nearest(r: &[f64], x: f64) -> Option<f64> {
    r.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
}

/// Least-squares slope `s` of `y ~ s k + c ln k + b`, two-parameter when few
/// points are available.
fn fit_growth(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let kc = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let span = pts.iter().map(|p| (p.0 - kc).abs()).fold(0.0, f64::max).max(1.0);
    let lc = pts.iter().map(|p| p.0.ln()).sum::<f64>() / n as f64;
    let lspan = pts.iter().map(|p| (p.0.ln() - lc).abs()).fold(0.0, f64::max).max(1e-300);
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            if n >= 5 {
                vec![(p.0 - kc) / span, (p.0.ln() - lc) / lspan, 1.0]
            } else {
                vec![(p.0 - kc) / span, 1.0]
            }
        })
        .collect();
    let m = rows[0].len();
    let mut ata = vec![vec![0.0; m + 1]; m];
    for (row, p) in rows.iter().zip(pts) {
        for i in 0..m {
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
            ata[i][m] += row[i] * p.1;
        }
    }
    let sol = solve_dense(ata)?;
    Some(sol[0] / span)
}

fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=n {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    let x: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Step-by-step minimum-norm coefficients of a length-`d` recurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedRecurrence<T> {
    pub d: usize,
    /// `coeffs[k - d] = [c_1(k), .., c_d(k)]`.
    pub coeffs: Vec<Vec<T>>,
}

/// Relative threshold below which a float window counts as zero.
pub const FIT_RANK_TOL: f64 = 1e-10;

/// For each `k >= d` the minimum-norm `c(k)` with `a_k = sum_j c_j(k) a_{k-j}`,
/// namely `conj(v) a_k / |v|^2` for `v = (a_{k-1}, .., a_{k-d})`.
pub fn fit_bounded_recurrence<T: Scalar>(seq: &CoefficientSequence<T>, d: usize) -> Result<FittedRecurrence<T>> {
    if d == 0 || seq.len() <= d {
        return Err(Error::TooShort {
            needed: d + 1,
            have: seq.len(),
        });
    }
    let a = &seq.values;
    let mut coeffs = Vec::with_capacity(a.len() - d);
    let mut running = a[..d].iter().map(|v| v.modulus()).fold(0.0, f64::max);
    for k in d..a.len() {
        let v: Vec<T> = (1..=d).map(|j| a[k - j].clone()).collect();
        let norm2 = v.iter().fold(T::zero(), |acc, x| acc + x.conj() * x.clone());
        running = running.max(a[k].modulus());
        let window_zero = if T::EXACT {
            norm2.is_zero()
        } else {
            norm2.modulus().sqrt() <= FIT_RANK_TOL * running
        };
        if window_zero {
            let ak_zero = if T::EXACT {
                a[k].is_zero()
            } else {
                a[k].modulus() <= FIT_RANK_TOL * running
            };
            if !ak_zero {
                return Err(Error::NoFit(k, d));
            }
            coeffs.push(vec![T::zero(); d]);
            continue;
        }
        let f = a[k].clone() / norm2;
        coeffs.push(v.iter().map(|x| x.conj() * f.clone()).collect());
    }
    Ok(FittedRecurrence { d, coeffs })
}

impl<T: Scalar> FittedRecurrence<T> {
    /// `sup_k |c_j(k)| / rho^j` for each `j`.
    pub fn profile(&self, rho: f64) -> Vec<f64> {
        (0..self.d)
            .map(|j| {
                self.coeffs
                    .iter()
                    .map(|c| (c[j].ln_modulus() - (j as f64 + 1.0) * rho.ln()).exp())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Euclidean norm of `c(k)`.
    pub fn norm_at(&self, k: usize) -> f64 {
        self.coeffs[k - self.d].iter().map(|c| c.modulus().powi(2)).sum::<f64>().sqrt()
    }

    /// Tabulated spec with zero constant part; every tail bound is the
    /// observed sup. `None` for non-real coefficients.
    pub fn to_spec(&self) -> Option<RecurrenceSpec> {
        let mut laws = Vec::with_capacity(self.d);
        for j in 0..self.d {
            let values: Vec<Q> = self.coeffs.iter().map(|c| c[j].to_rational()).collect::<Option<_>>()?;
            let tail = values.iter().map(|v| v.abs()).fold(Q::zero(), |a, b| a.max(b));
            laws.push(IndexLaw::Tabulated {
                start: self.d,
                values,
                tail_bound: Some(tail),
            });
        }
        RecurrenceSpec::new(vec![Q::zero(); self.d], laws).ok()
    }
}

/// `a_j = phi_j(w)` for `j > d`, with `a_i = w_i` for `i <= d`.
pub type LipschitzMap<T> = Arc<dyn Fn(usize, &[T]) -> T + Send + Sync>;

#[derive(Clone)]
pub struct LipschitzFamilyConfig<T> {
    pub d: usize,
    pub c: Q,
    pub delta: Q,
    pub phi: LipschitzMap<T>,
}

impl<T> fmt::Debug for LipschitzFamilyConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzFamilyConfig")
            .field("d", &self.d)
            .field("c", &self.c)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

fn max_norm<T: Scalar>(w: &[T]) -> f64 {
    w.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// Generates `a_0..a_K` for the family and asserts `|a_k| <= C^k |w|` for each
/// `k > d`, with `|w|` the max-norm.
pub fn generate_lipschitz<T: Scalar>(cfg: &LipschitzFamilyConfig<T>, w: &[T], horizon: usize) -> Result<CoefficientSequence<T>> {
    if w.len() != cfg.d + 1 {
        return Err(Error::Invalid(format!("need {} initial values, got {}", cfg.d + 1, w.len())));
    }
    if !cfg.c.is_positive() || !cfg.delta.is_positive() {
        return Err(Error::Invalid("C and delta must be positive".into()));
    }
    let wn = max_norm(w);
    let delta = q_to_f64(&cfg.delta);
    if wn > delta * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!("|w| = {wn} exceeds delta = {delta}")));
    }
    let wq: Option<Vec<Q>> = if T::EXACT { w.iter().map(|x| x.to_rational()).collect() } else { None };
    let wnq = wq.as_ref().map(|v| v.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| a.max(b)));
    let mut values: Vec<T> = w.to_vec();
    for k in cfg.d + 1..=horizon {
        let a = (cfg.phi)(k, w);
        let ok = match (&wnq, a.to_rational()) {
            (Some(n), Some(aq)) => aq.abs() <= pow_q(&cfg.c, k as i64) * n,
            _ => {
                let lhs = a.ln_modulus();
                let rhs = k as f64 * q_to_f64(&cfg.c).ln() + wn.ln();
                lhs <= rhs + 1e-12 * rhs.abs().max(1.0)
            }
        };
        if !ok {
            return Err(Error::GrowthViolation(k));
        }
        values.push(a);
    }
    values.truncate(horizon + 1);
    Ok(CoefficientSequence {
        values,
        provenance: Provenance::Lipschitz {
            d: cfg.d,
            c: cfg.c.clone(),
        },
    })
}

/// Runs [`generate_lipschitz`] on each sampled `w`.
pub fn spot_check_lipschitz<T: Scalar>(cfg: &LipschitzFamilyConfig<T>, samples: &[Vec<T>], horizon: usize) -> Result<()> {
    samples.iter().try_for_each(|w| generate_lipschitz(cfg, w, horizon).map(|_| ()))
}
