//! Dense univariate polynomials with ascending coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// `c_0 + c_1 x + ... + c_n x^n` over a [`Scalar`].
///
/// Trailing zeros are trimmed on construction, so the last stored
/// coefficient is the leading one and `degree() == len - 1`. The zero
/// polynomial stores no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
    var: String,
}

impl<T: Scalar> UniPoly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self::with_var(coeffs, "x")
    }

    pub fn with_var(mut coeffs: Vec<T>, var: impl Into<String>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly {
            coeffs,
            var: var.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c x^n`
    pub fn monomial(c: T, n: usize) -> Self {
        let mut v = vec![T::zero(); n + 1];
        v[n] = c;
        Self::new(v)
    }

    /// The identity polynomial `x`.
    pub fn identity() -> Self {
        Self::monomial(T::one(), 1)
    }

    /// `x - r`
    pub fn linear_root(r: T) -> Self {
        Self::new(vec![-r, T::one()])
    }

    pub fn renamed(mut self, var: impl Into<String>) -> Self {
        self.var = var.into();
        self
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    /// Evaluation in another scalar type after coefficient conversion.
    pub fn eval_in<U: Scalar>(&self, z: &U, conv: impl Fn(&T) -> U) -> U {
        self.coeffs
            .iter()
            .rev()
            .fold(U::zero(), |acc, c| acc * z.clone() + conv(c))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> UniPoly<U> {
        UniPoly::with_var(self.coeffs.iter().map(f).collect(), self.var.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone()).renamed(self.var.clone())
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * T::from_i64(i as i64))
            .collect();
        Self::with_var(v, self.var.clone())
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(T::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            v.push(c.clone() / T::from_i64(i as i64 + 1));
        }
        Self::with_var(v, self.var.clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one().renamed(self.var.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `p(x + a)` by Horner composition.
    pub fn shift(&self, a: &T) -> Self {
        let lin = UniPoly::with_var(vec![a.clone(), T::one()], self.var.clone());
        let mut acc = UniPoly::with_var(Vec::new(), self.var.clone());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(c.clone());
        }
        acc.renamed(self.var.clone())
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((
                Self::with_var(Vec::new(), self.var.clone()),
                self.clone(),
            ));
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Some((
            Self::with_var(quot, self.var.clone()),
            Self::with_var(rem, self.var.clone()),
        ))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Largest `m` with `x^m | p`.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl<T: Scalar> Add for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn add(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        UniPoly::with_var(v, self.var.clone())
    }
}

impl<T: Scalar> Sub for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn sub(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        UniPoly::with_var(v, self.var.clone())
    }
}

impl<T: Scalar> Mul for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn mul(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::with_var(Vec::new(), self.var.clone());
        }
        let mut v = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::with_var(v, self.var.clone())
    }
}

impl<T: Scalar> Neg for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn neg(self) -> UniPoly<T> {
        self.map(|c| -c.clone()).renamed(self.var.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for UniPoly<T> {
            type Output = UniPoly<T>;
            fn $m(self, rhs: UniPoly<T>) -> UniPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for UniPoly<T> {
    type Output = UniPoly<T>;
    fn neg(self) -> UniPoly<T> {
        -&self
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c}){}", self.var)?,
                _ => write!(f, "({c}){}^{i}", self.var)?,
            }
        }
        Ok(())
    }
}

/// `m (m-1) ... (m-j+1)` for a concrete value; the empty product is one.
pub fn falling_factorial<T: Scalar>(m: &T, j: usize) -> T {
    (0..j).fold(T::one(), |acc, t| acc * (m.clone() - T::from_i64(t as i64)))
}

/// `(k + shift)(k + shift - 1) ... (k + shift - j + 1)` as a polynomial in `k`.
pub fn falling_factorial_poly<T: Scalar>(shift: &T, j: usize) -> UniPoly<T> {
    let mut acc = UniPoly::with_var(vec![T::one()], "k");
    for t in 0..j {
        let lin = UniPoly::with_var(vec![shift.clone() - T::from_i64(t as i64), T::one()], "k");
        acc = &acc * &lin;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::{int, rat};
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn qpoly(c: &[(i64, i64)]) -> UniPoly<Q> {
        UniPoly::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn eval_examples() {
        let p = qpoly(&[(1, 1), (1, 1)]);
        assert_eq!(p.eval(&int(0)), int(1));
        // sigma^2 - sigma - 1 at 2
        let fib = qpoly(&[(-1, 1), (-1, 1), (1, 1)]);
        assert_eq!(fib.eval(&int(2)), int(1));
        let cube = UniPoly::monomial(int(1), 3);
        assert_eq!(cube.eval(&rat(3, 7)), rat(27, 343));
    }

    #[test]
    fn falling_factorial_examples() {
        let p = falling_factorial_poly(&int(2), 2);
        assert_eq!(p.coeffs(), &[int(2), int(3), int(1)]);
        assert_eq!(falling_factorial(&int(5), 0), int(1));
        let p = falling_factorial_poly(&int(0), 3);
        assert_eq!(p.coeffs(), &[int(0), int(2), int(-3), int(1)]);
        assert_eq!(falling_factorial(&int(5), 3), int(60));
        assert_eq!(falling_factorial(&int(2), 3), int(0));
    }

    #[test]
    fn trims_and_degree() {
        let p = qpoly(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(UniPoly::<Q>::new(vec![int(0)]).is_zero());
        assert_eq!(UniPoly::<Q>::zero().degree(), None);
    }

    #[test]
    fn calculus_roundtrip() {
        let p = qpoly(&[(3, 1), (-2, 5), (7, 3), (1, 2)]);
        assert_eq!(p.antiderivative().derivative(), p);
        assert!(p.antiderivative().eval(&int(0)).is_zero());
    }

    #[test]
    fn shift_matches_evaluation() {
        let p = qpoly(&[(1, 1), (-3, 1), (0, 1), (2, 1)]);
        let s = p.shift(&rat(1, 3));
        for x in [int(0), rat(5, 2), int(-4)] {
            assert_eq!(s.eval(&x), p.eval(&(x.clone() + rat(1, 3))));
        }
    }

    #[test]
    fn division() {
        let a = qpoly(&[(-1, 1), (0, 1), (0, 1), (1, 1)]);
        let b = qpoly(&[(-1, 1), (1, 1)]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, qpoly(&[(1, 1), (1, 1), (1, 1)]));
        assert!(a.div_rem(&UniPoly::zero()).is_none());
    }

    fn arb_qpoly() -> impl Strategy<Value = UniPoly<Q>> {
        prop::collection::vec((-20i64..20, 1i64..9), 0..6)
            .prop_map(|v| UniPoly::new(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn ring_laws_hold_exactly(a in arb_qpoly(), b in arb_qpoly(), c in arb_qpoly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn evaluation_is_a_ring_map(a in arb_qpoly(), b in arb_qpoly(), n in -9i64..9, d in 1i64..9) {
            let z = rat(n, d);
            prop_assert_eq!((&a * &b).eval(&z), a.eval(&z) * b.eval(&z));
            prop_assert_eq!((&a + &b).eval(&z), a.eval(&z) + b.eval(&z));
        }
    }
}
