//! Zero counting on circles and Rouche-type zero bounds from domination
//! certificates.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::domination::{DominationCertificate, SRule};
use crate::scalar::{q_to_f64, Scalar};
use crate::{Error, Result};

pub const DEFAULT_NODES: usize = 1 << 12;
pub const MAX_NODES: usize = 1 << 16;
/// Residual below which node doubling stops.
pub const TARGET_RESIDUAL: f64 = 0.05;
/// Residual at or above which a count is flagged unreliable.
pub const RELIABLE_RESIDUAL: f64 = 0.1;
/// Zeros closer than this fraction of `r` to the contour are rejected.
pub const NEAR_CONTOUR: f64 = 1e-6;
/// Number of grid radii `R 2^{-i/8}` tried by [`zero_bound`].
pub const RSTAR_GRID: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub radius: f64,
    pub count: usize,
    /// Distance of the contour integral to the nearest integer.
    pub residual: f64,
    pub nodes: usize,
    pub reliable: bool,
}

fn unit_phase<T: Scalar>(v: &T) -> Complex64 {
    match v.to_rational() {
        Some(q) if q.is_negative() => Complex64::new(-1.0, 0.0),
        Some(_) => Complex64::new(1.0, 0.0),
        None => {
            let c = v.to_c64();
            c / c.norm()
        }
    }
}

/// `a_k r^k e^{-shift}` as complex floats, computed through logarithms so
/// that huge rationals do not overflow. `shift = None` normalises the largest
/// coefficient to modulus one.
fn scaled_coeffs<T: Scalar>(a: &[T], ln_r: f64, shift: Option<f64>) -> Vec<Complex64> {
    let logs: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(k, v)| v.ln_modulus() + k as f64 * ln_r)
        .collect();
    let shift = shift.unwrap_or_else(|| logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    a.iter()
        .zip(&logs)
        .map(|(v, &l)| {
            if l == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                unit_phase(v) * (l - shift).exp()
            }
        })
        .collect()
}

fn eval_with_derivative(c: &[Complex64], w: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for ck in c.iter().rev() {
        dp = dp * w + p;
        p = p * w + ck;
    }
    (p, dp)
}

/// Number of zeros of the polynomial `sum a_k z^k` in `|z| < r`, by the
/// trapezoidal rule for `(1/2 pi i) \oint f'/f`. Starts at `nodes` (default
/// [`DEFAULT_NODES`]) and doubles up to [`MAX_NODES`].
pub fn count_zeros<T: Scalar>(a: &[T], r: f64, nodes: Option<usize>) -> Result<ZeroCount> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Invalid(format!("radius must be positive, got {r}")));
    }
    if a.iter().all(|v| v.is_zero()) {
        return Err(Error::AllZero);
    }
    let c = scaled_coeffs(a, r.ln(), None);
    let mut n = nodes.unwrap_or(DEFAULT_NODES).max(8);
    loop {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut nearest = f64::INFINITY;
        for j in 0..n {
            let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            let (g, dg) = eval_with_derivative(&c, w);
            if g.norm() == 0.0 {
                return Err(Error::NearContour {
                    radius: r,
                    distance: 0.0,
                });
            }
            if dg.norm() > 0.0 {
                nearest = nearest.min(r * g.norm() / dg.norm());
            }
            sum += w * dg / g;
        }
        if nearest < NEAR_CONTOUR * r {
            return Err(Error::NearContour {
                radius: r,
                distance: nearest,
            });
        }
        let wind = sum / n as f64;
        let rounded = wind.re.round().max(0.0);
        let residual = (wind - Complex64::new(rounded, 0.0)).norm();
        if residual < TARGET_RESIDUAL || n >= MAX_NODES {
            return Ok(ZeroCount {
                radius: r,
                count: rounded as usize,
                residual,
                nodes: n,
                reliable: residual < RELIABLE_RESIDUAL,
            });
        }
        n *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroBoundCertificate {
    pub n: usize,
    pub r_prime: f64,
    pub r: f64,
    /// `M = max_{i<=N} |a_i| R^i`; the two bounds below are divided by it.
    pub prefix_max: f64,
    pub r_star: Option<f64>,
    /// `T(r*) / M` with `T(r*) = M sum_{k>N} S(k) (r*/R)^k`.
    pub tail_bound: Option<f64>,
    /// Lower bound of `min_{|z|=r*} |P_N(z)| / M`.
    pub min_modulus: Option<f64>,
    pub certified: bool,
    /// `Some(N)` when certified.
    pub bound: Option<usize>,
}

/// Upper bound of `sum_{k>n} S(k) q^k`, `+inf` when it cannot be bounded.
fn tail_sum(rule: &SRule, n: usize, q: f64) -> Result<f64> {
    let lq = q.ln();
    match rule {
        SRule::Constant { c } => {
            let lc = crate::scalar::ln_abs_rational(c);
            let l = lc + (n + 1) as f64 * lq - (-q).ln_1p();
            Ok(l.exp() * (1.0 + 1e-12))
        }
        SRule::Turan { d } => {
            let df = *d as f64;
            let ln_term = |k: usize| df * (2.0 * std::f64::consts::E * (k as f64 / df + 1.0)).ln() + k as f64 * lq;
            let mut sum = 0.0;
            let mut k = n + 1;
            for _ in 0..10_000_000 {
                let ratio = ((k + 1 + d) as f64 / (k + d) as f64).powf(df) * q;
                let t = ln_term(k).exp();
                if ratio < 1.0 - 1e-6 {
                    // ratios decrease in k, so the rest is dominated geometrically
                    sum += t / (1.0 - ratio);
                    return Ok(sum * (1.0 + 1e-10));
                }
                sum += t;
                if !sum.is_finite() {
                    return Ok(f64::INFINITY);
                }
                k += 1;
            }
            Ok(f64::INFINITY)
        }
        SRule::Tabulated { .. } | SRule::Trivial { .. } => Err(Error::NotSummable),
    }
}

/// Lower bound of `min_{|w|=1} |sum c_i w^i|` from node samples and the
/// Lipschitz constant `sum i |c_i|`; stops early once it exceeds `target`.
fn circle_min_lower(c: &[Complex64], target: f64) -> f64 {
    let lip: f64 = c.iter().enumerate().map(|(i, v)| i as f64 * v.norm()).sum();
    let mass: f64 = c.iter().map(|v| v.norm()).sum();
    let slack = 1e-12 * mass * c.len() as f64;
    let mut n = 256;
    let mut best = f64::NEG_INFINITY;
    while n <= 1 << 14 {
        let m = (0..n)
            .map(|j| eval_with_derivative(c, Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).0.norm())
            .fold(f64::INFINITY, f64::min);
        best = best.max(m - lip * PI / n as f64 - slack);
        if best > target || m <= target || lip == 0.0 {
            break;
        }
        n *= 2;
    }
    best
}

/// Certifies that the series behind `prefix` has at most `N` zeros in
/// `|z| < R'` by finding `r*` in `(R', R)` with `min |P_N| > T(r*)` on
/// `|z| = r*`. The grid `R 2^{-i/8}` does not depend on `R'`, so a
/// certificate at `R'` persists for every smaller radius.
pub fn zero_bound<T: Scalar>(cert: &DominationCertificate, prefix: &[T], r_prime: f64) -> Result<ZeroBoundCertificate> {
    let n = cert.n;
    if prefix.len() < n + 1 {
        return Err(Error::TooShort {
            needed: n + 1,
            have: prefix.len(),
        });
    }
    let r = q_to_f64(&cert.r);
    if !(r_prime > 0.0 && r_prime < r) {
        return Err(Error::Invalid(format!("need 0 < R' < R, got R' = {r_prime}, R = {r}")));
    }
    let p = &prefix[..=n];
    if p.iter().all(|v| v.is_zero()) {
        return Err(Error::AllZero);
    }
    if matches!(cert.s_rule, SRule::Tabulated { .. } | SRule::Trivial { .. }) {
        return Err(Error::NotSummable);
    }
    let ln_r = cert.r.abs().ln_modulus();
    let ln_m = p
        .iter()
        .enumerate()
        .map(|(i, v)| v.ln_modulus() + i as f64 * ln_r)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = ZeroBoundCertificate {
        n,
        r_prime,
        r,
        prefix_max: ln_m.exp(),
        r_star: None,
        tail_bound: None,
        min_modulus: None,
        certified: false,
        bound: None,
    };
    for i in 1..=RSTAR_GRID {
        let q = 2f64.powf(-(i as f64) / 8.0);
        let r_star = r * q;
        if r_star <= r_prime {
            break;
        }
        let t = tail_sum(&cert.s_rule, n, q)?;
        let c = scaled_coeffs(p, ln_r + q.ln(), Some(ln_m));
        let mass: f64 = c.iter().map(|v| v.norm()).sum();
        if !(t < mass) {
            continue;
        }
        let lo = circle_min_lower(&c, t * (1.0 + 1e-9));
        if lo > t * (1.0 + 1e-9) {
            out.r_star = Some(r_star);
            out.tail_bound = Some(t);
            out.min_modulus = Some(lo);
            out.certified = true;
            out.bound = Some(n);
            return Ok(out);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValencyProbe {
    /// Fitted slope of `ln(|a_k| R^k)` against `ln k`; `None` for polynomials.
    pub slope: Option<f64>,
    pub p: usize,
    /// `2p + 0.5`.
    pub threshold: f64,
    pub pass: bool,
    pub polynomial: bool,
    pub window: (usize, usize),
    pub note: String,
}

/// Log-log regression of `|a_k| R^k` over `k in [K/2, K]`, compared with the
/// `k^{2p}` growth allowed for `p`-valent functions.
pub fn valency_growth_probe<T: Scalar>(seq: &[T], r: f64, p: usize) -> Result<ValencyProbe> {
    if seq.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            have: seq.len(),
        });
    }
    let kmax = seq.len() - 1;
    let lo = (kmax / 2).max(1);
    let threshold = 2.0 * p as f64 + 0.5;
    let last = seq.iter().rposition(|v| !v.is_zero()).ok_or(Error::AllZero)?;
    if last < lo {
        return Ok(ValencyProbe {
            slope: None,
            p,
            threshold,
            pass: true,
            polynomial: true,
            window: (lo, kmax),
            note: format!("polynomial of degree {last}, trivially consistent"),
        });
    }
    let lr = r.ln();
    let pts: Vec<(f64, f64)> = (lo..=kmax)
        .filter(|&k| !seq[k].is_zero())
        .map(|k| ((k as f64).ln(), seq[k].ln_modulus() + k as f64 * lr))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            have: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(ValencyProbe {
        slope: Some(slope),
        p,
        threshold,
        pass: slope <= threshold,
        polynomial: false,
        window: (lo, kmax),
        note: format!("fitted exponent {slope:.4} against 2p = {}", 2 * p),
    })
}
