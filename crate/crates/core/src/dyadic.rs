//! Binary floating point with an arbitrary-size mantissa.
//!
//! A value is `m * 2^e`. Every operation rounds the mantissa to nearest at
//! the working precision of the current thread, set with
//! [`Dyadic::with_precision`]. No gcd is ever taken, so long Taylor runs at a
//! few hundred bits stay cheap compared with reduced rationals.

use std::cell::Cell;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::scalar::{ln_abs_bigint, Scalar};

/// Working precision used when none was set.
pub const DEFAULT_PRECISION: u32 = 256;

thread_local! {
    static PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

fn precision() -> u32 {
    PRECISION.with(|p| p.get())
}

/// Canonical form: zero is `(0, 0)`, otherwise the mantissa is odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    /// Runs `f` with `bits` significant bits, restoring the old setting after.
    pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
        let old = PRECISION.with(|p| p.replace(bits.max(8)));
        struct Restore(u32);
        impl Drop for Restore {
            fn drop(&mut self) {
                PRECISION.with(|p| p.set(self.0));
            }
        }
        let _guard = Restore(old);
        f()
    }

    pub fn current_precision() -> u32 {
        precision()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    fn norm(m: BigInt, e: i64) -> Dyadic {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let prec = precision() as u64;
        let bits = m.bits();
        let (mut m, mut e) = (m, e);
        if bits > prec {
            let shift = bits - prec;
            let neg = m.is_negative();
            let mut a = m.abs();
            let half_bit = a.bit(shift - 1);
            a >>= shift;
            if half_bit {
                a += 1u32;
            }
            m = if neg { -a } else { a };
            e += shift as i64;
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        Dyadic { m, e }
    }

    /// Exponent of the leading bit plus one.
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic { m: BigInt::one(), e: 0 }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        // operands far below the working precision only affect rounding
        let guard = precision() as i64 + 2;
        if self.top() - rhs.top() > guard {
            return self;
        }
        if rhs.top() - self.top() > guard {
            return rhs;
        }
        let (hi, lo) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let m = (hi.m << ((hi.e - lo.e) as u64)) + lo.m;
        Dyadic::norm(m, lo.e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { m: -self.m, e: self.e }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::norm(self.m * rhs.m, self.e + rhs.e)
    }
}

impl Div for Dyadic {
    type Output = Dyadic;

    fn div(self, rhs: Dyadic) -> Dyadic {
        assert!(!rhs.is_zero(), "division by zero");
        if self.is_zero() {
            return self;
        }
        let want = precision() as i64 + 2;
        let s = (want + rhs.m.bits() as i64 - self.m.bits() as i64).max(0);
        let m = (self.m << (s as u64)) / rhs.m;
        Dyadic::norm(m, self.e - rhs.e - s)
    }
}

impl Rem for Dyadic {
    type Output = Dyadic;

    fn rem(self, rhs: Dyadic) -> Dyadic {
        let a = self.to_rational().expect("finite");
        let b = rhs.to_rational().expect("finite");
        Dyadic::from_rational(&(a % b))
    }
}

impl Num for Dyadic {
    type FromStrRadixErr = <BigRational as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(|q| Dyadic::from_rational(&q))
    }
}

fn pow2(e: i64) -> BigInt {
    BigInt::one() << (e as u64)
}

impl Scalar for Dyadic {
    const EXACT: bool = false;
    const PRECISION: Option<u32> = None;

    fn from_rational(q: &BigRational) -> Self {
        let n = Dyadic::norm(q.numer().clone(), 0);
        let d = q.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            let mut n = n;
            if !n.is_zero() {
                n.e -= tz as i64;
            }
            return n;
        }
        n / Dyadic::norm(d.clone(), 0)
    }

    fn from_i64(n: i64) -> Self {
        Dyadic::norm(BigInt::from(n), 0)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(if self.e >= 0 {
            BigRational::from_integer(&self.m * pow2(self.e))
        } else {
            BigRational::new(self.m.clone(), pow2(-self.e))
        })
    }

    fn to_c64(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = self.ln_modulus().exp();
        let sign = if self.m.sign() == Sign::Minus { -1.0 } else { 1.0 };
        Complex64::new(sign * mag, 0.0)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn ln_modulus(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_abs_bigint(&self.m) + self.e as f64 * std::f64::consts::LN_2
    }
}
