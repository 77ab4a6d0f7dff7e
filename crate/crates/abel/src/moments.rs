//! Moment-like quantities `m_k = int_a^b P(x)^k q(x) dx` with `P' = p`, `P(a) = 0`.

use taydom_core::{CoefficientSequence, QPoly, QSequence};

use crate::equation::AbelEquation;

pub fn moment_like(eq: &AbelEquation, horizon: usize) -> QSequence {
    let n = eq.normalized();
    let big_p = n.p.antiderivative();
    let len = n.b.clone();
    let mut pk = QPoly::one().renamed("x");
    let mut values = Vec::with_capacity(horizon + 1);
    for _ in 0..=horizon {
        let integrand = &pk * &n.q;
        values.push(integrand.antiderivative().eval(&len));
        pk = &pk * &big_p;
    }
    CoefficientSequence::external(values, "abel moment_like")
}

/// `P = int_a^x p` in the original variable.
pub fn primitive(eq: &AbelEquation) -> QPoly {
    let n = eq.normalized();
    n.p.antiderivative().shift(&-eq.a.clone()).renamed("x")
}
