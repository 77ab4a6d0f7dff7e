//! Differential operators with polynomial coefficients and piecewise boundary data.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::{serde_q, Error, QPoly, Rational, Result};

/// `Op = sum_{j=0}^n p_j(x) (d/dx)^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct DifferentialOperator {
    coeffs: Vec<QPoly>,
}

#[derive(Serialize, Deserialize)]
struct RawOperator {
    /// `p_0 .. p_n`, each as ascending coefficients.
    #[serde(with = "serde_q::poly_vec")]
    coefficients: Vec<QPoly>,
}

impl TryFrom<RawOperator> for DifferentialOperator {
    type Error = Error;
    fn try_from(r: RawOperator) -> Result<Self> {
        DifferentialOperator::new(r.coefficients)
    }
}

impl From<DifferentialOperator> for RawOperator {
    fn from(op: DifferentialOperator) -> Self {
        RawOperator { coefficients: op.coeffs }
    }
}

impl DifferentialOperator {
    pub fn new(coeffs: Vec<QPoly>) -> Result<Self> {
        match coeffs.last() {
            Some(p) if !p.is_zero() => {}
            _ => return Err(Error::Invalid("leading coefficient p_n must be nonzero".into())),
        }
        let coeffs = coeffs.into_iter().map(|p| p.renamed("x")).collect();
        Ok(DifferentialOperator { coeffs })
    }

    /// Builds from integer coefficient lists, lowest order first.
    pub fn from_ints(c: &[&[i64]]) -> Result<Self> {
        Self::new(
            c.iter()
                .map(|p| QPoly::new(p.iter().map(|&v| Rational::from_integer(v.into())).collect()))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn p(&self, j: usize) -> &QPoly {
        &self.coeffs[j]
    }

    pub fn coefficients(&self) -> &[QPoly] {
        &self.coeffs
    }

    /// `a_{i,j}`, the coefficient of `x^i` in `p_j`.
    pub fn a(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(j).map_or_else(Rational::zero, |p| p.coeff(i))
    }

    pub fn degree(&self, j: usize) -> Option<usize> {
        self.coeffs[j].degree()
    }

    /// `alpha_j = d_j - j`, absent when `p_j = 0`.
    pub fn alpha_j(&self, j: usize) -> Option<i64> {
        self.degree(j).map(|d| d as i64 - j as i64)
    }

    /// `alpha = max_j alpha_j` over the nonzero `p_j`.
    pub fn alpha(&self) -> i64 {
        (0..=self.order()).filter_map(|j| self.alpha_j(j)).max().expect("p_n is nonzero")
    }

    /// `d_n`.
    pub fn leading_degree(&self) -> usize {
        self.degree(self.order()).expect("p_n is nonzero")
    }

    /// `alpha_n >= alpha_j` for every nonzero `p_j`.
    pub fn regular_at_infinity(&self) -> bool {
        self.alpha_j(self.order()) == Some(self.alpha())
    }

    /// `Op g` for a polynomial `g`.
    pub fn apply(&self, g: &QPoly) -> QPoly {
        let mut acc = QPoly::zero().renamed("x");
        let mut dg = g.clone();
        for p in &self.coeffs {
            acc = &acc + &(p * &dg);
            dg = dg.derivative();
        }
        acc
    }
}

/// Jump points `a = x_0 < .. < x_{p+1} = b` with one-sided values of
/// `g, g', .., g^{(n-1)}`; `g` vanishes outside `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseData {
    points: Vec<Rational>,
    left: Vec<Vec<Rational>>,
    right: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawPiecewise {
    #[serde(with = "serde_q::vec")]
    points: Vec<Rational>,
    /// `left[s][t] = g^{(t)}(x_s^-)`.
    #[serde(with = "serde_q::vec_vec")]
    left: Vec<Vec<Rational>>,
    /// `right[s][t] = g^{(t)}(x_s^+)`.
    #[serde(with = "serde_q::vec_vec")]
    right: Vec<Vec<Rational>>,
}

impl TryFrom<RawPiecewise> for PiecewiseData {
    type Error = Error;
    fn try_from(r: RawPiecewise) -> Result<Self> {
        PiecewiseData::new(r.points, r.left, r.right)
    }
}

impl From<PiecewiseData> for RawPiecewise {
    fn from(p: PiecewiseData) -> Self {
        RawPiecewise {
            points: p.points,
            left: p.left,
            right: p.right,
        }
    }
}

impl PiecewiseData {
    pub fn new(points: Vec<Rational>, left: Vec<Vec<Rational>>, right: Vec<Vec<Rational>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Invalid("need at least the endpoints a < b".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("jump points must be strictly increasing".into()));
        }
        if left.len() != points.len() || right.len() != points.len() {
            return Err(Error::Invalid("one-sided data needed at every jump point".into()));
        }
        let n = left[0].len();
        if left.iter().chain(&right).any(|v| v.len() != n) {
            return Err(Error::Invalid("one-sided data must list the same number of derivatives".into()));
        }
        if left[0].iter().chain(&right[points.len() - 1]).any(|v| !v.is_zero()) {
            return Err(Error::Invalid("g vanishes outside [a, b]".into()));
        }
        Ok(PiecewiseData { points, left, right })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn a(&self) -> &Rational {
        &self.points[0]
    }

    pub fn b(&self) -> &Rational {
        self.points.last().expect("two points")
    }

    /// Number of interior discontinuities.
    pub fn p(&self) -> usize {
        self.points.len() - 2
    }

    /// Number of derivatives recorded.
    pub fn derivatives(&self) -> usize {
        self.left[0].len()
    }

    /// `tau = n (p + 2)`.
    pub fn tau(&self, n: usize) -> usize {
        n * (self.p() + 2)
    }

    /// `J_s^{(t)} = g^{(t)}(x_s^-) - g^{(t)}(x_s^+)`.
    pub fn jump(&self, s: usize, t: usize) -> Rational {
        &self.left[s][t] - &self.right[s][t]
    }

    pub fn max_abs_point(&self) -> Rational {
        self.points.iter().map(|x| x.abs()).max().expect("two points")
    }
}
