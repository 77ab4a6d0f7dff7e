//! Scalar types shared by every kernel.
//!
//! A [`Scalar`] is either an exact rational ([`BigRational`], always kept in
//! lowest terms with a positive denominator) or a real/complex binary float.
//! Everything above this module is generic over the trait, so the same
//! recurrence or polynomial code runs bit-exactly on rationals and quickly on
//! floats.

use std::f64::consts::LN_2;
use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Field element usable by the polynomial, recurrence and certificate kernels.
pub trait Scalar: Num + Clone + Debug + Neg<Output = Self> + Send + Sync + 'static {
    /// True when arithmetic carries no rounding error.
    const EXACT: bool;
    /// Significand bits for floating types, `None` for exact ones.
    const PRECISION: Option<u32>;

    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational value, when the element is real and finite.
    fn to_rational(&self) -> Option<BigRational>;

    fn to_c64(&self) -> Complex64;

    fn conj(&self) -> Self;

    /// `ln |x|`, `-inf` for zero. Never overflows for huge rationals.
    fn ln_modulus(&self) -> f64;

    fn modulus(&self) -> f64 {
        self.ln_modulus().exp()
    }

    /// Runs `a_k = sum_j c_j(k) a_{k-j}` for `k = d..=horizon`, where
    /// `coeffs(k)` returns `[c_1(k), .., c_d(k)]` and `d = init.len()`.
    fn run_linear_recurrence(
        init: &[Self],
        horizon: usize,
        coeffs: &mut dyn FnMut(usize) -> Result<Vec<BigRational>>,
    ) -> Result<Vec<Self>> {
        let d = init.len();
        let mut out: Vec<Self> = init.to_vec();
        for k in d..=horizon {
            let c = coeffs(k)?;
            let mut acc = Self::zero();
            for (j, cj) in c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                acc = acc + Self::from_rational(cj) * out[k - 1 - j].clone();
            }
            out.push(acc);
        }
        out.truncate(horizon + 1);
        Ok(out)
    }
}

/// `ln |n|` for an arbitrarily large integer.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(|v| v.abs().ln()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * LN_2
}

/// `ln |q|` for an arbitrarily large rational.
pub fn ln_abs_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

/// Exact rational from a finite float.
pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::NonFinite(v.to_string()))
}

/// Rational approximation `r >= v` (when `up`) or `r <= v`, with `r` a short
/// dyadic. Used to turn floating radii into exact certificate parameters.
pub fn rational_bound(v: f64, rel_slack: f64, up: bool) -> Result<BigRational> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v.to_string()));
    }
    let widened = if up {
        v + v.abs() * rel_slack + f64::MIN_POSITIVE
    } else {
        v - v.abs() * rel_slack
    };
    rational_from_f64(widened)
}

/// Dyadic `m / 2^s` with a `bits`-bit numerator, `<= v` (or `>= v` when
/// `up`). Keeps certificate radii short while staying on the safe side.
pub fn dyadic_bound(v: f64, bits: u32, up: bool) -> Result<BigRational> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v.to_string()));
    }
    if v == 0.0 {
        return Ok(BigRational::zero());
    }
    let e = v.abs().log2().floor() as i32 - bits as i32 + 1;
    let scaled = v / 2f64.powi(e);
    let m = if up { scaled.ceil() } else { scaled.floor() };
    let m = BigRational::from_integer(BigInt::from(m as i64));
    let q = if e >= 0 {
        m * BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        m / BigRational::from_integer(BigInt::one() << (-e) as usize)
    };
    // guard against the division by 2^e having rounded the wrong way
    let back = q.to_f64().unwrap_or(f64::NAN);
    if (up && back < v) || (!up && back > v) {
        return rational_bound(v, 1e-15, up);
    }
    Ok(q)
}

/// Reduces `n / d` (with `d > 0`) to lowest terms. Faster than the generic
/// constructor when `d` is mostly a power of two, which is the common shape of
/// denominators produced by geometric perturbations.
pub(crate) fn reduce_fraction(mut n: BigInt, mut d: BigInt) -> BigRational {
    debug_assert!(d.is_positive());
    if n.is_zero() {
        return BigRational::zero();
    }
    let tz = n.trailing_zeros().unwrap_or(0).min(d.trailing_zeros().unwrap_or(0));
    if tz > 0 {
        n >>= tz;
        d >>= tz;
    }
    let dz = d.trailing_zeros().unwrap_or(0);
    let d_odd = &d >> dz;
    if !d_odd.is_one() {
        let r = n.mod_floor(&d_odd);
        let g = if r.is_zero() { d_odd.clone() } else { d_odd.gcd(&r) };
        if !g.is_one() {
            n /= &g;
            d /= &g;
        }
    }
    BigRational::new_raw(n, d)
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const PRECISION: Option<u32> = None;

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn ln_modulus(&self) -> f64 {
        ln_abs_rational(self)
    }

    /// Fraction-free evaluation: every term is carried as an integer over a
    /// shared, growing denominator so the inner loop never takes a gcd. Each
    /// emitted term is reduced once.
    fn run_linear_recurrence(
        init: &[Self],
        horizon: usize,
        coeffs: &mut dyn FnMut(usize) -> Result<Vec<BigRational>>,
    ) -> Result<Vec<Self>> {
        let d = init.len();
        let mut out: Vec<BigRational> = init.to_vec();
        if d == 0 || horizon < d {
            out.truncate(horizon + 1);
            return Ok(out);
        }
        let base = init.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        // numer[i] / denom_chain[i] == a_i, denominators grow by step[i].
        let mut numer: Vec<BigInt> = init
            .iter()
            .map(|v| v.numer() * (&base / v.denom()))
            .collect();
        let mut step: Vec<BigInt> = vec![BigInt::one(); d];
        let mut denom = base;
        for k in d..=horizon {
            let c = coeffs(k)?;
            let l_k = c.iter().fold(BigInt::one(), |acc, cj| acc.lcm(cj.denom()));
            let mut acc = BigInt::zero();
            // ratio = D_{k-1} / D_{k-j}
            let mut ratio = BigInt::one();
            for (j, cj) in c.iter().enumerate() {
                if j > 0 {
                    ratio *= &step[k - j];
                }
                if cj.is_zero() {
                    continue;
                }
                let scale = cj.numer() * (&l_k / cj.denom());
                acc += &numer[k - 1 - j] * &scale * &ratio;
            }
            denom *= &l_k;
            out.push(reduce_fraction(acc.clone(), denom.clone()));
            numer.push(acc);
            step.push(l_k);
        }
        Ok(out)
    }
}

macro_rules! real_float_scalar {
    ($t:ty, $bits:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const PRECISION: Option<u32> = Some($bits);

            fn from_rational(q: &BigRational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn from_i64(n: i64) -> Self {
                n as $t
            }

            fn to_rational(&self) -> Option<BigRational> {
                BigRational::from_float(*self as f64)
            }

            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }

            fn conj(&self) -> Self {
                *self
            }

            fn ln_modulus(&self) -> f64 {
                (*self as f64).abs().ln()
            }
        }
    };
}

real_float_scalar!(f32, 24);
real_float_scalar!(f64, 53);

macro_rules! complex_float_scalar {
    ($t:ty, $bits:expr) => {
        impl Scalar for Complex<$t> {
            const EXACT: bool = false;
            const PRECISION: Option<u32> = Some($bits);

            fn from_rational(q: &BigRational) -> Self {
                Complex::new(q.to_f64().unwrap_or(f64::NAN) as $t, 0.0)
            }

            fn from_i64(n: i64) -> Self {
                Complex::new(n as $t, 0.0)
            }

            fn to_rational(&self) -> Option<BigRational> {
                if self.im == 0.0 {
                    BigRational::from_float(self.re as f64)
                } else {
                    None
                }
            }

            fn to_c64(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }

            fn conj(&self) -> Self {
                Complex::conj(self)
            }

            fn ln_modulus(&self) -> f64 {
                (self.norm() as f64).ln()
            }
        }
    };
}

complex_float_scalar!(f32, 24);
complex_float_scalar!(f64, 53);

/// Shorthand for building small rationals in code and tests.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `|q|` for an exact rational.
pub fn abs_q(q: &BigRational) -> BigRational {
    q.abs()
}

/// `q^e` for a signed exponent; `0^0 = 1`.
pub fn pow_q(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal literal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = BigRational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Parse(s.to_string()))?;
    Ok(BigRational::from_integer(n))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest dyadic with about `bits` significant bits.
pub fn round_bits(q: &BigRational, bits: u32) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let s = bits as i64 - e;
    let scale = BigRational::from_integer(BigInt::one() << s.unsigned_abs() as usize);
    if s >= 0 {
        (q * &scale).round() / scale
    } else {
        (q / &scale).round() * scale
    }
}

/// Lossy conversion used only for reporting.
pub fn q_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let l = ln_abs_rational(q);
        if q.is_negative() {
            -l.exp()
        } else {
            l.exp()
        }
    })
}

/// Integer ceiling of a non-negative rational as `usize`.
pub fn ceil_usize(q: &BigRational) -> Option<usize> {
    q.ceil().to_integer().to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_bits_is_relative() {
        let third = rat(1, 3);
        let r = round_bits(&third, 60);
        assert!(abs_q(&(&r - &third)) <= &third / BigRational::from_integer(BigInt::one() << 58usize));
        assert_eq!(r.denom().bits() - 1, r.denom().trailing_zeros().unwrap());
        let tiny = rat(1, 3) / BigRational::from_integer(BigInt::from(10).pow(80));
        let rt = round_bits(&tiny, 60);
        assert!(abs_q(&(&rt - &tiny)) <= &tiny / BigRational::from_integer(BigInt::one() << 58usize));
        assert_eq!(round_bits(&int(12345), 60), int(12345));
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
    }

    #[test]
    fn reduce_fraction_matches_generic_constructor() {
        let cases = [(12i64, 8i64), (-9, 6), (5, 7), (0, 3), (1 << 20, 3 << 18), (45, 1 << 10)];
        for (n, d) in cases {
            let fast = reduce_fraction(BigInt::from(n), BigInt::from(d));
            assert_eq!(fast, rat(n, d));
            assert!(fast.denom().is_positive());
        }
    }

    #[test]
    fn ln_modulus_survives_huge_values() {
        let big = BigRational::from_integer(BigInt::one() << 5000usize);
        let l = big.ln_modulus();
        assert!((l - 5000.0 * LN_2).abs() < 1e-9);
        let tiny = big.recip();
        assert!((tiny.ln_modulus() + 5000.0 * LN_2).abs() < 1e-9);
        assert_eq!(BigRational::zero().ln_modulus(), f64::NEG_INFINITY);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn fraction_free_kernel_agrees_with_naive_loop() {
        let init = vec![rat(1, 3), rat(-2, 5), rat(7, 2)];
        let mut law = |k: usize| -> Result<Vec<BigRational>> {
            Ok(vec![
                rat(1, 2) + rat(1, 1 << (k.min(40) as i64).min(40)),
                rat(-3, 7) + rat(1, k as i64),
                rat(2, 1),
            ])
        };
        let fast = BigRational::run_linear_recurrence(&init, 60, &mut law).unwrap();
        let mut slow = init.clone();
        for k in 3..=60 {
            let c = law(k).unwrap();
            let v = &c[0] * &slow[k - 1] + &c[1] * &slow[k - 2] + &c[2] * &slow[k - 3];
            slow.push(v);
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn dyadic_bounds_are_short_and_one_sided() {
        for v in [std::f64::consts::PI, 0.618_033_988_749_894_9, 1e-7, 12345.678, -2.5] {
            let lo = dyadic_bound(v, 30, false).unwrap();
            let hi = dyadic_bound(v, 30, true).unwrap();
            assert!(q_to_f64(&lo) <= v && q_to_f64(&hi) >= v);
            assert!(lo.denom().bits() <= 64);
            assert!((q_to_f64(&hi) - q_to_f64(&lo)).abs() <= v.abs() * 1e-8);
        }
    }

    #[test]
    fn rational_bounds_bracket_the_float() {
        let v = std::f64::consts::PI;
        let lo = rational_bound(v, 1e-12, false).unwrap();
        let hi = rational_bound(v, 1e-12, true).unwrap();
        assert!(lo < hi);
        assert!(q_to_f64(&lo) <= v && q_to_f64(&hi) >= v);
    }
}
