//! Abel equation `y' = p(x) y^2 + q(x) y^3` on `[a, b]`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use taydom_core::{serde_q, Error, QPoly, Rational, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEquation")]
pub struct AbelEquation {
    #[serde(with = "serde_q::poly")]
    pub p: QPoly,
    #[serde(with = "serde_q::poly")]
    pub q: QPoly,
    #[serde(with = "serde_q::one")]
    pub a: Rational,
    #[serde(with = "serde_q::one")]
    pub b: Rational,
}

#[derive(Deserialize)]
struct RawEquation {
    #[serde(with = "serde_q::poly")]
    p: QPoly,
    #[serde(with = "serde_q::poly")]
    q: QPoly,
    #[serde(with = "serde_q::one")]
    a: Rational,
    #[serde(with = "serde_q::one")]
    b: Rational,
}

impl TryFrom<RawEquation> for AbelEquation {
    type Error = Error;

    fn try_from(r: RawEquation) -> Result<Self> {
        AbelEquation::new(r.p, r.q, r.a, r.b)
    }
}

impl AbelEquation {
    pub fn new(p: QPoly, q: QPoly, a: Rational, b: Rational) -> Result<Self> {
        if b <= a {
            return Err(Error::Invalid(format!("interval needs b > a, got [{a}, {b}]")));
        }
        Ok(AbelEquation {
            p: p.renamed("x"),
            q: q.renamed("x"),
            a,
            b,
        })
    }

    pub fn from_ints(p: &[i64], q: &[i64], a: i64, b: i64) -> Result<Self> {
        let conv = |v: &[i64]| QPoly::new(v.iter().map(|&c| Rational::from_integer(c.into())).collect());
        Self::new(conv(p), conv(q), Rational::from_integer(a.into()), Rational::from_integer(b.into()))
    }

    /// `b - a`.
    pub fn length(&self) -> Rational {
        &self.b - &self.a
    }

    /// The same equation in `t = x - a`, on `[0, b - a]`.
    pub fn normalized(&self) -> AbelEquation {
        if self.a.is_zero() {
            return self.clone();
        }
        AbelEquation {
            p: self.p.shift(&self.a).renamed("x"),
            q: self.q.shift(&self.a).renamed("x"),
            a: Rational::zero(),
            b: self.length(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.p.degree().unwrap_or(0).max(self.q.degree().unwrap_or(0))
    }
}
