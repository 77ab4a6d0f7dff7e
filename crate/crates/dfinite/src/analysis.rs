//! Spectral data, vanishing-moment bounds and Stieltjes-transform certificates.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::domination::{cert_trivial, DominationCertificate, Method};
use taydom_core::roots::{roots_exact, square_free, CLUSTER_TOL};
use taydom_core::scalar::{dyadic_bound, format_rational, q_to_f64};
use taydom_core::{serde_q, Error, QPoly, QSequence, Rational, Result, RootSet};

use crate::moments::moment_recurrence;
use crate::operator::{DifferentialOperator, PiecewiseData};

/// Largest integer scanned for roots of the indicial polynomial.
pub const INDICIAL_SCAN_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub re: f64,
    pub im: f64,
    /// Multiplicity as an eigenvalue of `A`.
    pub multiplicity: usize,
    pub singular_point: bool,
    pub jump_point: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorAnalysis {
    pub poincare_ok: bool,
    pub fuchsian: bool,
    pub fuchsian_note: Option<String>,
    pub spectrum: Vec<SpectrumPoint>,
    pub tau: usize,
    pub alpha: i64,
    #[serde(with = "serde_q::poly")]
    pub indicial: QPoly,
    pub lambda: usize,
}

/// `Z_A`: roots of `p_n` (with multiplicity) merged with the jump points
/// (multiplicity `n` each).
pub fn spectrum(op: &DifferentialOperator, pw: &PiecewiseData) -> Result<Vec<SpectrumPoint>> {
    let n = op.order();
    let pn = op.p(n);
    let mut out: Vec<SpectrumPoint> = Vec::new();
    if pn.degree().unwrap_or(0) > 0 {
        for r in roots_exact(pn)?.roots {
            out.push(SpectrumPoint {
                re: r.value.re,
                im: r.value.im,
                multiplicity: r.multiplicity,
                singular_point: true,
                jump_point: false,
            });
        }
    }
    for x in pw.points() {
        let v = q_to_f64(x);
        let near = out.iter_mut().find(|p| {
            let d = (Complex64::new(p.re, p.im) - Complex64::new(v, 0.0)).norm();
            d <= CLUSTER_TOL * (1.0 + v.abs()) && pn.eval(x).is_zero()
        });
        match near {
            Some(p) => {
                p.multiplicity += n;
                p.jump_point = true;
            }
            None => out.push(SpectrumPoint {
                re: v,
                im: 0.0,
                multiplicity: n,
                singular_point: false,
                jump_point: true,
            }),
        }
    }
    Ok(out)
}

/// Regular singular points everywhere: at each root of `p_n` of multiplicity
/// `m`, `p_j` vanishes to order at least `m - (n - j)`; at infinity,
/// `alpha_n >= alpha_j`.
pub fn fuchsian_check(op: &DifferentialOperator) -> (bool, Option<String>) {
    if !op.regular_at_infinity() {
        return (false, Some("irregular singularity at infinity: some alpha_j exceeds alpha_n".into()));
    }
    let n = op.order();
    for (f, m) in square_free(op.p(n)) {
        for j in 0..n {
            let need = m as i64 - (n - j) as i64;
            if need <= 0 || op.p(j).is_zero() {
                continue;
            }
            let fe = f.pow(need as u32);
            let (_, r) = op.p(j).div_rem(&fe).expect("nonzero divisor");
            if !r.is_zero() {
                return (
                    false,
                    Some(format!("irregular singularity at the roots of {f}: p_{j} vanishes to order < {need}")),
                );
            }
        }
    }
    (true, None)
}

/// Largest positive integer root of `q_alpha(k)`, zero if none.
pub fn lambda(op: &DifferentialOperator) -> Result<usize> {
    let rec = moment_recurrence(op);
    let q = rec.leading();
    let Some(deg) = q.degree() else { return Ok(0) };
    if deg == 0 {
        return Ok(0);
    }
    let lc = q.leading().expect("nonzero").abs();
    let bound = q.coeffs()[..deg].iter().map(|c| c.abs() / &lc).fold(Rational::zero(), |a, b| a.max(b));
    let bound = bound.to_integer() + 1u32;
    let cap = num_bigint::BigInt::from(INDICIAL_SCAN_CAP);
    if bound > cap {
        return Err(Error::SizeCap(format!("indicial root bound {bound} exceeds scan cap")));
    }
    let b: u64 = bound.try_into().expect("below cap");
    Ok((1..=b)
        .rev()
        .find(|&k| q.eval(&Rational::from_integer(k.into())).is_zero())
        .map_or(0, |k| k as usize))
}

pub fn analyze_operator(op: &DifferentialOperator, pw: &PiecewiseData) -> Result<OperatorAnalysis> {
    let (fuchsian, note) = fuchsian_check(op);
    Ok(OperatorAnalysis {
        poincare_ok: op.regular_at_infinity(),
        fuchsian,
        fuchsian_note: note,
        spectrum: spectrum(op, pw)?,
        tau: pw.tau(op.order()),
        alpha: op.alpha(),
        indicial: moment_recurrence(op).leading().clone(),
        lambda: lambda(op)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum VanishingCase {
    /// Some discontinuity is a regular point of `Op`: `tau + d_n - n`.
    RegularJump {
        #[serde(with = "serde_q::one")]
        xi: Rational,
    },
    /// Every discontinuity is singular: `Lambda + 1 + d_n - n`.
    Indicial { lambda: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingBound {
    pub bound: usize,
    #[serde(flatten)]
    pub case: VanishingCase,
}

/// Number of leading moments whose joint vanishing forces `g = 0`.
/// `include_endpoints` decides whether `a` and `b` count as discontinuities.
pub fn vanishing_bound(op: &DifferentialOperator, pw: &PiecewiseData, include_endpoints: bool) -> Result<VanishingBound> {
    let (ok, note) = fuchsian_check(op);
    if !ok {
        return Err(Error::Invalid(format!("operator is not Fuchsian: {}", note.unwrap_or_default())));
    }
    let n = op.order() as i64;
    let dn = op.leading_degree() as i64;
    let pts = pw.points();
    let candidates: &[Rational] = if include_endpoints { pts } else { &pts[1..pts.len() - 1] };
    let pn = op.p(op.order());
    let clamp = |v: i64| v.max(0) as usize;
    if let Some(xi) = candidates.iter().find(|x| !pn.eval(x).is_zero()) {
        return Ok(VanishingBound {
            bound: clamp(pw.tau(op.order()) as i64 + dn - n),
            case: VanishingCase::RegularJump { xi: xi.clone() },
        });
    }
    let l = lambda(op)?;
    Ok(VanishingBound {
        bound: clamp(l as i64 + 1 + dn - n),
        case: VanishingCase::Indicial { lambda: l },
    })
}

/// `R* = min 1/|xi|` over nonzero `xi` in `Z_A`, rounded down to a rational.
pub fn r_star(op: &DifferentialOperator, pw: &PiecewiseData) -> Result<Rational> {
    let jump_max = pw.max_abs_point();
    let pn = op.p(op.order());
    let root_max = if pn.degree().unwrap_or(0) > 0 {
        let rs: RootSet = roots_exact(pn)?;
        rs.roots
            .iter()
            .map(|r| r.value.norm() + r.error_radius)
            .filter(|m| *m > 0.0)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let xi = if root_max > 0.0 && root_max > q_to_f64(&jump_max) {
        dyadic_bound(root_max, 40, true)?
    } else {
        jump_max
    };
    if xi.is_zero() {
        return Err(Error::Invalid("Z_A is contained in {0}: no finite R*".into()));
    }
    Ok(xi.recip())
}

/// `N = max(tau - 1, Lambda) + d_n - n`.
pub fn stieltjes_n(op: &DifferentialOperator, pw: &PiecewiseData) -> Result<usize> {
    let n = op.order() as i64;
    let l = lambda(op)? as i64;
    let tau = pw.tau(op.order()) as i64;
    Ok(((tau - 1).max(l) + op.leading_degree() as i64 - n).max(0) as usize)
}

/// `(N, R*, S)` with `S(k) = R^k |m_k| / (|m_{N0}| R^{N0})`, `N0` the first
/// nonzero moment, tabulated from `moments`.
pub fn stieltjes_certificate(
    op: &DifferentialOperator,
    pw: &PiecewiseData,
    moments: &QSequence,
) -> Result<DominationCertificate> {
    let (ok, note) = fuchsian_check(op);
    if !ok {
        return Err(Error::Invalid(format!("operator is not Fuchsian: {}", note.unwrap_or_default())));
    }
    let r = r_star(op, pw)?;
    let n = stieltjes_n(op, pw)?;
    let mut cert = cert_trivial(moments, &r)?;
    let n0 = cert.n;
    if n0 > n {
        return Err(Error::Invalid(format!(
            "first nonzero moment m_{n0} lies beyond N = {n}; g is not annihilated by the operator"
        )));
    }
    cert.n = n;
    cert.method = Method::Stieltjes;
    cert.notes.insert("first_nonzero".into(), n0.to_string());
    cert.notes.insert("r_star".into(), format_rational(&r));
    cert.notes.insert("tau".into(), pw.tau(op.order()).to_string());
    cert.notes.insert("lambda".into(), lambda(op)?.to_string());
    Ok(cert)
}
