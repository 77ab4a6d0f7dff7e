//! Random recurrence specs and piecewise D-finite cases for the batteries.

use rand::Rng;
use taydom_core::domination::uniform_k;
use taydom_core::scalar::{dyadic_bound, int, pow_q, q_to_f64, rat};
use taydom_core::{IndexLaw, QPoly, Rational, RecurrenceSpec};
use taydom_dfinite::{DifferentialOperator, TestFunction};

/// `p/q` with `1 <= q <= max_den` and `|p/q| <= bound`.
pub fn rational_in<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(-bound * q..=bound * q);
    rat(p, q)
}

/// Nonzero variant of [`rational_in`].
pub fn nonzero_in<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    loop {
        let v = rational_in(rng, bound, max_den);
        if v != int(0) {
            return v;
        }
    }
}

/// Initial data, not all zero.
pub fn random_init<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..d).map(|_| rational_in(rng, 5, 4)).collect();
        if v.iter().any(|x| *x != int(0)) {
            return v;
        }
    }
}

fn constant_part<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    loop {
        let c: Vec<Rational> = (0..d).map(|_| rational_in(rng, 5, 4)).collect();
        if c.iter().any(|x| *x != int(0)) {
            return c;
        }
    }
}

/// Nondegenerate constant-coefficient spec, `1 <= d <= max_d`, coefficients
/// in `[-5, 5]`.
pub fn constant_spec<R: Rng>(rng: &mut R, max_d: usize) -> RecurrenceSpec {
    let d = rng.gen_range(1..=max_d);
    RecurrenceSpec::constant(constant_part(rng, d)).expect("valid length")
}

/// `0`, `c/k` or `c 2^{-k}` with `c` in `[-5, 5]`.
pub fn perturbation<R: Rng>(rng: &mut R, allow_zero: bool) -> IndexLaw {
    let kind = if allow_zero { rng.gen_range(0..3) } else { rng.gen_range(1..3) };
    match kind {
        0 => IndexLaw::Zero,
        1 => IndexLaw::harmonic(nonzero_in(rng, 5, 4)),
        _ => IndexLaw::dyadic_decay(nonzero_in(rng, 5, 4)),
    }
}

/// Poincare-type spec with closed-form perturbations.
pub fn poincare_spec<R: Rng>(rng: &mut R, max_d: usize, allow_zero: bool) -> RecurrenceSpec {
    let d = rng.gen_range(1..=max_d);
    let c = constant_part(rng, d);
    let laws = (0..d).map(|_| perturbation(rng, allow_zero)).collect();
    RecurrenceSpec::new(c, laws).expect("valid length")
}

/// Spec of the bounded class with a declared `(K, rho)`: `rho` is drawn from
/// the characteristic modulus times `2^{-1..2}` and `K` is the sup of the
/// coefficient law against it.
pub fn bounded_spec<R: Rng>(rng: &mut R, max_d: usize) -> RecurrenceSpec {
    let spec = poincare_spec(rng, max_d, true);
    let m = spec.characteristic_data().map(|(_, rho)| rho).unwrap_or(1.0).max(1.0 / 16.0);
    let m = dyadic_bound(m, 12, true).expect("finite modulus");
    let rho = &m * pow_q(&int(2), rng.gen_range(-1..=2));
    let k = uniform_k(&spec, &rho).expect("closed-form laws are bounded");
    spec.with_bounds(k, rho)
}

/// Spec of the class `|psi_j(k)| <= delta_k rho^j` with `delta_k = 1/k`.
pub fn delta_spec<R: Rng>(rng: &mut R, max_d: usize) -> RecurrenceSpec {
    let d = rng.gen_range(1..=max_d);
    let base = RecurrenceSpec::constant(constant_part(rng, d)).expect("valid length");
    let (lo, _) = base.rho_bracket().expect("nondegenerate");
    let laws = (1..=d)
        .map(|j| {
            // |s_j| <= rho_lo^j, rounded down to a short dyadic
            let cap = q_to_f64(&pow_q(&lo, j as i64));
            let cap = dyadic_bound(cap, 16, false).unwrap_or_else(|_| int(0));
            let cap = if cap > pow_q(&lo, j as i64) { int(0) } else { cap };
            let u = rat(rng.gen_range(-8..=8), 8);
            IndexLaw::harmonic(u * cap)
        })
        .collect();
    RecurrenceSpec::new(base.constant_part, laws)
        .expect("valid length")
        .with_delta(IndexLaw::harmonic(int(1)))
}

fn small_poly<R: Rng>(rng: &mut R, max_deg: usize) -> QPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let c: Vec<Rational> = (0..=deg).map(|_| rational_in(rng, 3, 2)).collect();
        let p = QPoly::new(c).renamed("x");
        if !p.is_zero() {
            return p;
        }
    }
}

/// Piecewise polynomial `g` with up to two interior jumps, annihilated by
/// `s(x) (d/dx)^m` where `s` is `1` or `x - c`.
pub fn dfinite_case<R: Rng>(rng: &mut R) -> (DifferentialOperator, TestFunction) {
    let m = rng.gen_range(1..=3usize);
    let pieces_n = rng.gen_range(1..=3usize);
    let a = rat(rng.gen_range(-2..=0), 2);
    let mut breaks = vec![a];
    for _ in 0..pieces_n {
        let last = breaks.last().expect("nonempty").clone();
        breaks.push(last + rat(rng.gen_range(1..=4), 4));
    }
    let pieces = (0..pieces_n).map(|_| small_poly(rng, m - 1)).collect();
    let lead = if rng.gen_bool(0.5) {
        QPoly::one().renamed("x")
    } else {
        QPoly::new(vec![-rational_in(rng, 2, 2), int(1)]).renamed("x")
    };
    let mut coeffs = vec![QPoly::zero().renamed("x"); m];
    coeffs.push(lead);
    let op = DifferentialOperator::new(coeffs).expect("nonzero leading coefficient");
    let g = TestFunction::polynomial(breaks, pieces).expect("increasing breaks");
    (op, g)
}
