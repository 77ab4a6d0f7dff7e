//! Polynomial roots with multiplicities and a posteriori error radii.
//!
//! Exact inputs are split into square-free parts over the rationals first, so
//! every numeric solve sees simple roots and multiplicities are exact. Float
//! inputs are solved directly and clustered.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::UniPoly;
use crate::scalar::{q_to_f64, Scalar};
use crate::{Error, Result};

/// Relative distance under which two float roots are merged.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// A root of the source polynomial lies within this distance of `value`.
    pub error_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    /// Sum of multiplicities.
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max)
    }

    /// Upper bound on the largest modulus, error radii included.
    pub fn max_modulus_upper(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.value.norm() + r.error_radius)
            .fold(0.0, f64::max)
    }

    /// Lower bound on the largest modulus.
    pub fn max_modulus_lower(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| (r.value.norm() - r.error_radius).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Smallest modulus among roots that are not exactly zero.
    pub fn min_nonzero_modulus(&self) -> Option<f64> {
        self.roots
            .iter()
            .map(|r| r.value.norm())
            .filter(|m| *m > 0.0)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value.norm()).collect()
    }

    /// The root modulus closest to `m`.
    pub fn nearest_modulus(&self, m: f64) -> Option<f64> {
        self.moduli()
            .into_iter()
            .min_by(|a, b| (a - m).abs().total_cmp(&(b - m).abs()))
    }

    /// Every root repeated by multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }

    /// Coefficients of `prod (z - z_i)`, ascending.
    pub fn monic_reconstruction(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::one()];
        for z in self.expanded() {
            let mut next = vec![Complex64::zero(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * z;
            }
            c = next;
        }
        c
    }

    /// Multiplicity attached to a root within `tol` of `z`.
    pub fn multiplicity_near(&self, z: Complex64, tol: f64) -> usize {
        self.roots
            .iter()
            .filter(|r| (r.value - z).norm() <= tol + r.error_radius)
            .map(|r| r.multiplicity)
            .sum()
    }

    fn sort(&mut self) {
        self.roots.sort_by(|a, b| {
            b.value
                .norm()
                .total_cmp(&a.value.norm())
                .then(a.value.arg().total_cmp(&b.value.arg()))
        });
    }
}

/// All complex roots of `p` with multiplicities.
pub fn poly_roots<T: Scalar>(p: &UniPoly<T>) -> Result<RootSet> {
    if T::EXACT {
        let q: Option<Vec<BigRational>> = p.coeffs().iter().map(|c| c.to_rational()).collect();
        if let Some(q) = q {
            return roots_exact(&UniPoly::new(q));
        }
    }
    roots_float(&p.coeffs().iter().map(|c| c.to_c64()).collect::<Vec<_>>())
}

/// Roots of an exact rational polynomial via square-free decomposition.
pub fn roots_exact(p: &UniPoly<BigRational>) -> Result<RootSet> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    let mut set = RootSet::default();
    let z = p.zero_root_multiplicity();
    if z > 0 {
        set.roots.push(Root {
            value: Complex64::zero(),
            multiplicity: z,
            error_radius: 0.0,
        });
    }
    let rest = UniPoly::new(p.coeffs()[z..].to_vec());
    if rest.degree().unwrap_or(0) > 0 {
        for (factor, mult) in square_free(&rest) {
            let c: Vec<Complex64> = factor.monic().coeffs().iter().map(|x| Complex64::new(q_to_f64(x), 0.0)).collect();
            for (value, error_radius) in simple_roots(&c)? {
                set.roots.push(Root {
                    value,
                    multiplicity: mult,
                    error_radius,
                });
            }
        }
    }
    set.sort();
    Ok(set)
}

/// Roots of a float polynomial; near-coincident roots are merged.
pub fn roots_float(coeffs: &[Complex64]) -> Result<RootSet> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if c.len() == 1 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficient".into()));
    }
    let mut set = RootSet::default();
    let z = c.iter().take_while(|x| x.norm() == 0.0).count();
    if z > 0 {
        set.roots.push(Root {
            value: Complex64::zero(),
            multiplicity: z,
            error_radius: 0.0,
        });
    }
    let c = &c[z..];
    if c.len() > 1 {
        let raw = simple_roots(c)?;
        // Union nearby roots; repeated roots of a float input only converge to
        // about eps^(1/m), which the error radii reflect.
        let mut used = vec![false; raw.len()];
        for i in 0..raw.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut members = vec![i];
            let mut grew = true;
            while grew {
                grew = false;
                for j in 0..raw.len() {
                    if used[j] {
                        continue;
                    }
                    let close = members.iter().any(|&m| {
                        let (a, ra) = raw[m];
                        let (b, rb) = raw[j];
                        let d = (a - b).norm();
                        d <= CLUSTER_TOL * a.norm().max(b.norm()).max(1.0) || d <= ra + rb
                    });
                    if close {
                        used[j] = true;
                        members.push(j);
                        grew = true;
                    }
                }
            }
            let n = members.len() as f64;
            let centre = members.iter().map(|&m| raw[m].0).sum::<Complex64>() / n;
            let spread = members
                .iter()
                .map(|&m| (raw[m].0 - centre).norm() + raw[m].1)
                .fold(0.0, f64::max);
            set.roots.push(Root {
                value: centre,
                multiplicity: members.len(),
                error_radius: spread,
            });
        }
    }
    set.sort();
    Ok(set)
}

/// Square-free decomposition `p = c * prod f_i^i` (Yun), returned as
/// `(f_i, i)` for non-constant `f_i`.
pub fn square_free(p: &UniPoly<BigRational>) -> Vec<(UniPoly<BigRational>, usize)> {
    let mut out = Vec::new();
    let dp = p.derivative();
    let a0 = gcd(p, &dp);
    let mut b = exact_div(p, &a0);
    let c = exact_div(&dp, &a0);
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = gcd(&b, &d);
        let nb = exact_div(&b, &a);
        let nc = exact_div(&d, &a);
        d = &nc - &nb.derivative();
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        b = nb;
        i += 1;
    }
    out
}

/// Monic gcd over the rationals; `gcd(0, 0) = 0`.
pub fn gcd(a: &UniPoly<BigRational>, b: &UniPoly<BigRational>) -> UniPoly<BigRational> {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y).expect("nonzero divisor");
        x = y;
        y = r.monic();
    }
    x.monic()
}

fn exact_div(a: &UniPoly<BigRational>, b: &UniPoly<BigRational>) -> UniPoly<BigRational> {
    let (q, r) = a.div_rem(b).expect("nonzero divisor");
    debug_assert!(r.is_zero());
    q
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    let mut mag = 0.0;
    let az = z.norm();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        mag = mag * az + a.norm();
    }
    (p, dp, mag)
}

/// Aberth-Ehrlich iteration followed by Newton polishing. Returns each root
/// with an inclusion radius `n (|p| + rounding) / |p'|`.
fn simple_roots(c: &[Complex64]) -> Result<Vec<(Complex64, f64)>> {
    let n = c.len() - 1;
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|a| a / lead).collect();
    if n == 1 {
        return Ok(vec![(-c[0], 0.0_f64.max(f64::EPSILON * c[0].norm()))]);
    }
    // Fujiwara bound for the starting circle.
    let radius = (0..n)
        .map(|i| (c[i].norm()).powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..800 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp, _) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    let mut out = Vec::with_capacity(n);
    for mut zi in z {
        for _ in 0..3 {
            let (p, dp, _) = horner(&c, zi);
            if dp.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            zi -= step;
        }
        let (p, dp, mag) = horner(&c, zi);
        let rounding = 4.0 * (n as f64 + 1.0) * f64::EPSILON * mag;
        if !(zi.re.is_finite() && zi.im.is_finite()) || p.norm() > 1e-6 * mag.max(1.0) {
            return Err(Error::RootsNotConverged(p.norm()));
        }
        let r = if dp.norm() > 0.0 {
            n as f64 * (p.norm() + rounding) / dp.norm()
        } else {
            f64::INFINITY
        };
        out.push((zi, r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn qp(c: &[i64]) -> UniPoly<BigRational> {
        UniPoly::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn golden_ratio_roots() {
        let rs = roots_exact(&qp(&[-1, -1, 1])).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(rs.degree(), 2);
        assert!((rs.roots[0].value.re - phi).abs() < 1e-14);
        assert!((rs.roots[1].value.re - (1.0 - phi)).abs() < 1e-14);
    }

    #[test]
    fn symmetric_and_repeated() {
        let rs = roots_exact(&qp(&[-1, 0, 1])).unwrap();
        let mut v: Vec<f64> = rs.roots.iter().map(|r| r.value.re).collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let sq = roots_exact(&qp(&[4, -4, 1])).unwrap();
        assert_eq!(sq.roots.len(), 1);
        assert_eq!(sq.roots[0].multiplicity, 2);
        assert!((sq.roots[0].value - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        let fl = poly_roots(&UniPoly::new(vec![4.0f64, -4.0, 1.0])).unwrap();
        assert_eq!(fl.roots.len(), 1);
        assert_eq!(fl.roots[0].multiplicity, 2);
    }

    #[test]
    fn zero_roots_and_unity() {
        let rs = roots_exact(&qp(&[0, 0, -1, 0, 0, 1])).unwrap();
        assert_eq!(rs.degree(), 5);
        assert_eq!(rs.multiplicity_near(Complex64::zero(), 0.0), 2);
        for r in rs.roots.iter().filter(|r| r.value.norm() > 0.0) {
            assert!((r.value.norm() - 1.0).abs() < 1e-14);
        }
        assert!(roots_exact(&UniPoly::zero()).is_err());
    }

    #[test]
    fn square_free_parts() {
        // (x-1)^3 (x+2)
        let p = &qp(&[-1, 1]).pow(3) * &qp(&[2, 1]);
        let sf = square_free(&p);
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], (qp(&[2, 1]), 1));
        assert_eq!(sf[1], (qp(&[-1, 1]), 3));
    }

    proptest! {
        #[test]
        fn reconstruction_reproduces_monic_input(mut pts in prop::collection::vec((-40i64..40, -40i64..40), 1..9)) {
            // Distinct Gaussian rationals spaced at least 1/8 apart.
            pts.sort();
            pts.dedup();
            let mut p = UniPoly::<BigRational>::one();
            for &(a, b) in &pts {
                // real factor for conjugate pairs keeps coefficients rational
                if b == 0 {
                    p = &p * &UniPoly::new(vec![rat(-a, 8), int(1)]);
                } else {
                    let re = rat(a, 8);
                    let n2 = &re * &re + rat(b * b, 64);
                    p = &p * &UniPoly::new(vec![n2, -(re * int(2)), int(1)]);
                }
            }
            let deg = p.degree().unwrap();
            prop_assume!(deg <= 8);
            let rs = roots_exact(&p).unwrap();
            prop_assert_eq!(rs.degree(), deg);
            let rec = rs.monic_reconstruction();
            // coefficients of prod (z - z_i) are bounded by prod (1 + |z_i|)
            let scale: f64 = rs.expanded().iter().map(|z| 1.0 + z.norm()).product();
            for (i, c) in p.coeffs().iter().enumerate() {
                let want = q_to_f64(c);
                prop_assert!((rec[i].re - want).abs() <= 1e-12 * scale);
                prop_assert!(rec[i].im.abs() <= 1e-12 * scale);
            }
            // every exact root lies in the inclusion disk of some computed root
            for &(a, b) in &pts {
                for sb in [b, -b] {
                    let t = Complex64::new(a as f64 / 8.0, sb as f64 / 8.0);
                    prop_assert!(rs.roots.iter().any(|r| (r.value - t).norm() <= r.error_radius && r.error_radius < 1e-6));
                }
            }
        }
    }
}
