//! Built-in piecewise test functions, their moments and boundary data.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::recurrence::Provenance;
use taydom_core::scalar::{int, pow_q, q_to_f64, rat};
use taydom_core::{serde_q, CoefficientSequence, Error, Matrix, QPoly, QSequence, Rational, Result};

use crate::operator::{DifferentialOperator, PiecewiseData};

/// Bits of absolute accuracy used for exponential pieces.
pub const EXP_BITS: u32 = 200;

/// `g` on `[x_s, x_{s+1}]` is `pieces[s](x) * exp(rates[s] x)`; `rates` empty
/// means purely polynomial pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(with = "serde_q::vec")]
    pub breaks: Vec<Rational>,
    #[serde(with = "serde_q::poly_vec")]
    pub pieces: Vec<QPoly>,
    #[serde(default, with = "serde_q::vec")]
    pub rates: Vec<Rational>,
}

impl TestFunction {
    pub fn polynomial(breaks: Vec<Rational>, pieces: Vec<QPoly>) -> Result<Self> {
        Self::new(breaks, pieces, Vec::new())
    }

    pub fn new(breaks: Vec<Rational>, pieces: Vec<QPoly>, rates: Vec<Rational>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::Invalid("need one piece per interval".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("breaks must be strictly increasing".into()));
        }
        if !rates.is_empty() && rates.len() != pieces.len() {
            return Err(Error::Invalid("one rate per piece".into()));
        }
        Ok(TestFunction {
            breaks,
            pieces: pieces.into_iter().map(|p| p.renamed("x")).collect(),
            rates,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.rates.iter().all(|r| r.is_zero())
    }

    fn rate(&self, s: usize) -> Rational {
        self.rates.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    /// `poly_t` with `g^{(t)} = poly_t exp(rate x)` on piece `s`.
    fn derivative_factor(&self, s: usize, t: usize) -> QPoly {
        let lam = self.rate(s);
        let mut p = self.pieces[s].clone();
        for _ in 0..t {
            p = &p.derivative() + &p.scale(&lam);
        }
        p
    }

    /// One-sided values of `g, .., g^{(n-1)}` at the breaks.
    pub fn boundary_data(&self, n: usize) -> Result<PiecewiseData> {
        let pts = self.breaks.clone();
        let last = pts.len() - 1;
        let mut left = vec![vec![Rational::zero(); n]; pts.len()];
        let mut right = vec![vec![Rational::zero(); n]; pts.len()];
        for s in 0..self.pieces.len() {
            for t in 0..n {
                let p = self.derivative_factor(s, t);
                let lam = self.rate(s);
                right[s][t] = p.eval(&pts[s]) * exp_q(&(&lam * &pts[s]));
                left[s + 1][t] = p.eval(&pts[s + 1]) * exp_q(&(&lam * &pts[s + 1]));
            }
        }
        debug_assert!(left[0].iter().chain(&right[last]).all(|v| v.is_zero()));
        PiecewiseData::new(pts, left, right)
    }

    /// `Op g` vanishes on every piece (exactly, for polynomial pieces with
    /// rate zero, or via `e^{-lambda x} Op(p e^{lambda x})` otherwise).
    pub fn annihilated_by(&self, op: &DifferentialOperator) -> bool {
        (0..self.pieces.len()).all(|s| {
            let mut acc = QPoly::zero().renamed("x");
            for (j, pj) in op.coefficients().iter().enumerate() {
                acc = &acc + &(pj * &self.derivative_factor(s, j));
            }
            acc.is_zero()
        })
    }
}

/// `exp(x)` to within `2^{-EXP_BITS}` as a dyadic rational.
pub fn exp_q(x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::one();
    }
    let eps = Rational::new(BigInt::one(), BigInt::one() << EXP_BITS as usize);
    let mut term = Rational::one();
    let mut acc = Rational::one();
    let mut i = 1u64;
    loop {
        term = term * x / int(i as i64);
        acc += &term;
        // remaining terms are dominated geometrically once i + 1 > 2|x|
        if Rational::from_integer((i + 1).into()) > x.abs() * int(2) && term.abs() < eps {
            break;
        }
        i += 1;
    }
    round_dyadic(&acc, EXP_BITS + 8)
}

fn round_dyadic(q: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

/// `int_lo^hi x^m dx`.
fn power_integral(lo: &Rational, hi: &Rational, m: usize) -> Rational {
    (pow_q(hi, m as i64 + 1) - pow_q(lo, m as i64 + 1)) / int(m as i64 + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectMoments {
    pub values: QSequence,
    /// Absolute error bound on every moment; zero for polynomial pieces.
    pub error_bound: Rational,
}

/// `m_k = int x^k g` for `k = 0..=kmax`.
pub fn direct_moments(g: &TestFunction, kmax: usize) -> Result<DirectMoments> {
    let mut values = vec![Rational::zero(); kmax + 1];
    let mut err = Rational::zero();
    for (s, p) in g.pieces.iter().enumerate() {
        let (lo, hi) = (&g.breaks[s], &g.breaks[s + 1]);
        let lam = g.rate(s);
        if lam.is_zero() {
            for (k, v) in values.iter_mut().enumerate() {
                for (i, c) in p.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        *v += c * power_integral(lo, hi, k + i);
                    }
                }
            }
            continue;
        }
        // exp(lam x) = sum_i lam^i x^i / i!, truncated with a geometric tail bound
        let b = lo.abs().max(hi.abs());
        let lb = lam.abs() * &b;
        let width = hi - lo;
        let mass: Rational = p.coeffs().iter().enumerate().map(|(i, c)| c.abs() * pow_q(&b, i as i64)).sum();
        let eps = Rational::new(BigInt::one(), BigInt::one() << EXP_BITS as usize);
        let mut terms = 1usize;
        let mut tail = lb.clone();
        while !(Rational::from_integer((terms + 1).into()) > &lb * int(2) && tail < eps) {
            terms += 1;
            tail = &tail * &lb / int(terms as i64);
        }
        // sum_{i >= terms} lb^i / i! <= 2 lb^terms / terms!
        let bmax = b.clone().max(Rational::one());
        for (k, v) in values.iter_mut().enumerate() {
            let mut coef = Rational::one();
            let mut acc = Rational::zero();
            for i in 0..terms {
                if i > 0 {
                    coef = coef * &lam / int(i as i64);
                }
                for (e, c) in p.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        acc += &coef * c * power_integral(lo, hi, k + i + e);
                    }
                }
            }
            *v += round_dyadic(&acc, EXP_BITS + 8);
            let bound = &width * &mass * pow_q(&bmax, k as i64) * &tail * int(2);
            err = err.max(bound);
        }
    }
    let rounding = Rational::new(BigInt::one(), BigInt::one() << (EXP_BITS + 7) as usize);
    if !g.is_polynomial() {
        err += rounding * int(g.pieces.len() as i64);
    }
    let label = if g.is_polynomial() { "moments" } else { "moments (series quadrature)" };
    Ok(DirectMoments {
        values: CoefficientSequence {
            values,
            provenance: Provenance::External { label: label.into() },
        },
        error_bound: err,
    })
}

/// Named test case: operator, function, and a basis of polynomial solutions
/// of `Op g = 0` used to span the piecewise family.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub name: &'static str,
    pub op: DifferentialOperator,
    pub g: TestFunction,
    pub basis: Vec<QPoly>,
    /// The largest point of `Z_A` is where `g` actually jumps, so the moment
    /// radius equals `1/R*`.
    pub sharp_radius: bool,
}

fn poly(c: &[(i64, i64)]) -> QPoly {
    QPoly::new(c.iter().map(|&(n, d)| rat(n, d)).collect()).renamed("x")
}

fn ip(c: &[i64]) -> QPoly {
    QPoly::new(c.iter().map(|&v| int(v)).collect()).renamed("x")
}

fn op(c: &[&[i64]]) -> DifferentialOperator {
    DifferentialOperator::from_ints(c).expect("valid operator")
}

/// The built-in family; every member has rational moments.
pub fn test_family() -> Vec<TestCase> {
    let tf = |b: Vec<Rational>, p: Vec<QPoly>| TestFunction::polynomial(b, p).expect("valid test function");
    vec![
        TestCase {
            name: "constant",
            op: op(&[&[], &[1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[1])]),
            basis: vec![ip(&[1])],
            sharp_radius: true,
        },
        TestCase {
            name: "identity",
            op: op(&[&[-1], &[0, 1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[0, 1])]),
            basis: vec![ip(&[0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "step",
            op: op(&[&[], &[1]]),
            g: tf(vec![int(0), rat(1, 2), int(1)], vec![ip(&[0]), ip(&[1])]),
            basis: vec![ip(&[1])],
            sharp_radius: true,
        },
        TestCase {
            name: "kinked-linear",
            op: op(&[&[], &[], &[1]]),
            g: tf(vec![int(0), rat(1, 3), int(1)], vec![ip(&[1, 1]), poly(&[(5, 3), (-1, 1)])]),
            basis: vec![ip(&[1]), ip(&[0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "symmetric-jump",
            op: op(&[&[], &[], &[1]]),
            g: tf(vec![int(-1), int(0), int(1)], vec![ip(&[0, 1]), ip(&[3])]),
            basis: vec![ip(&[1]), ip(&[0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "square",
            op: op(&[&[-2], &[0, 1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[0, 0, 1])]),
            basis: vec![ip(&[0, 0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "shifted-singularity",
            op: op(&[&[-1], &[-2, 1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[-2, 1])]),
            basis: vec![ip(&[-2, 1])],
            sharp_radius: false,
        },
        TestCase {
            name: "quadratic-jump",
            op: op(&[&[], &[], &[], &[1]]),
            g: tf(vec![int(0), rat(1, 2), int(1)], vec![ip(&[0, 0, 1]), ip(&[0, -1])]),
            basis: vec![ip(&[1]), ip(&[0, 1]), ip(&[0, 0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "euler-second-order",
            op: op(&[&[2], &[0, -2], &[0, 0, 1]]),
            g: tf(vec![int(0), rat(1, 2), int(1)], vec![ip(&[0, 1]), ip(&[0, 0, 3])]),
            basis: vec![ip(&[0, 1]), ip(&[0, 0, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "negative-singularity",
            op: op(&[&[-1], &[1, 1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[1, 1])]),
            basis: vec![ip(&[1, 1])],
            sharp_radius: true,
        },
        TestCase {
            name: "centered-steps",
            op: op(&[&[], &[1]]),
            g: tf(vec![rat(-1, 2), rat(-1, 4), rat(1, 2)], vec![ip(&[2]), ip(&[-1])]),
            basis: vec![ip(&[1])],
            sharp_radius: true,
        },
        TestCase {
            name: "half-support",
            op: op(&[&[], &[1]]),
            g: tf(vec![int(0), rat(1, 2)], vec![ip(&[1])]),
            basis: vec![ip(&[1])],
            sharp_radius: true,
        },
        TestCase {
            name: "singular-endpoints",
            op: op(&[&[-1, 2], &[0, 1, -1]]),
            g: tf(vec![int(0), int(1)], vec![ip(&[0, 1, -1])]),
            basis: vec![ip(&[0, 1, -1])],
            sharp_radius: true,
        },
    ]
}

/// An exponential member, `e^x` on `[0, 1]`, annihilated by `d/dx - 1`.
pub fn exponential_case() -> (DifferentialOperator, TestFunction) {
    (
        op(&[&[-1], &[1]]),
        TestFunction::new(vec![int(0), int(1)], vec![ip(&[1])], vec![int(1)]).expect("valid"),
    )
}

/// Rank of the map from the piecewise solution family (one copy of `basis`
/// per piece of `breaks`) to its first `count` moments, with the family
/// dimension.
pub fn moment_map_rank(breaks: &[Rational], basis: &[QPoly], count: usize) -> (usize, usize) {
    let pieces = breaks.len() - 1;
    let dim = pieces * basis.len();
    let mut rows = vec![vec![Rational::zero(); dim]; count];
    for s in 0..pieces {
        for (b, phi) in basis.iter().enumerate() {
            for (k, row) in rows.iter_mut().enumerate() {
                row[s * basis.len() + b] = phi
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| c * power_integral(&breaks[s], &breaks[s + 1], k + i))
                    .sum();
            }
        }
    }
    if count == 0 {
        return (0, dim);
    }
    (Matrix::from_rows(rows).rank(), dim)
}

/// Max-norm of `w(k)` as `ln`, for the radius law.
pub fn ln_state_norm(w: &[Rational]) -> f64 {
    use taydom_core::Scalar;
    w.iter().map(|v| v.ln_modulus()).fold(f64::NEG_INFINITY, f64::max)
}

/// `f64` view, convenient for reports.
pub fn approx(v: &[Rational]) -> Vec<f64> {
    v.iter().map(q_to_f64).collect()
}
