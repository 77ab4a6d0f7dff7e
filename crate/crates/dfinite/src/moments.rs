//! Moment recurrence `sum_{l=-n}^{alpha} q_l(k) m_{k+l} = eps_k`.
//!
//! Integrating `x^{k+i} g^{(j)}` by parts on every piece gives
//!
//! ```text
//! int x^m g^{(j)} = sum_{t<j} (-1)^t sum_s (m)_t x_s^{m-t} J_s^{(j-1-t)} + (-1)^j (m)_j m_{m-j}
//! ```
//!
//! with `J_s = g(x_s^-) - g(x_s^+)` and `g = 0` outside `[a, b]`. Summing against `a_{i,j}` and using `Op g = 0` per piece
//! yields the recurrence below. Moments at negative indices only ever meet a
//! vanishing falling factorial, so they are taken as zero.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use taydom_core::poly::{falling_factorial, falling_factorial_poly};
use taydom_core::scalar::pow_q;
use taydom_core::{serde_q, QPoly, Rational};

use crate::operator::{DifferentialOperator, PiecewiseData};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRecurrence {
    pub n: usize,
    pub alpha: i64,
    /// `q_l(k)` for `l = -n ..= alpha`, in the variable `k`.
    #[serde(with = "serde_q::poly_vec")]
    pub q: Vec<QPoly>,
}

impl MomentRecurrence {
    pub fn q_l(&self, l: i64) -> &QPoly {
        &self.q[(l + self.n as i64) as usize]
    }

    /// `q_alpha`, the indicial polynomial at infinity.
    pub fn leading(&self) -> &QPoly {
        self.q.last().expect("alpha >= -n")
    }

    /// `sum_l q_l(k) m_{k+l}`; `None` when `m` is too short.
    pub fn lhs(&self, m: &[Rational], k: usize) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (idx, q) in self.q.iter().enumerate() {
            let at = k as i64 + idx as i64 - self.n as i64;
            if at < 0 {
                continue;
            }
            let mv = m.get(at as usize)?;
            if !mv.is_zero() {
                acc += q.eval(&kq(k)) * mv;
            }
        }
        Some(acc)
    }
}

fn kq(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

/// `q_l(k) = sum_{i - j = l} a_{i,j} (-1)^j (k+i)_j`.
pub fn moment_recurrence(op: &DifferentialOperator) -> MomentRecurrence {
    let n = op.order();
    let alpha = op.alpha();
    let q = (-(n as i64)..=alpha)
        .map(|l| {
            let mut acc = QPoly::zero().renamed("k");
            for j in 0..=n {
                let i = l + j as i64;
                if i < 0 {
                    continue;
                }
                let a = op.a(i as usize, j);
                if a.is_zero() {
                    continue;
                }
                let sign = if j % 2 == 0 { a } else { -a };
                let ff = falling_factorial_poly(&kq(i as usize), j);
                acc = &acc + &ff.scale(&sign);
            }
            acc.renamed("k")
        })
        .collect();
    MomentRecurrence { n, alpha, q }
}

/// `eps_k = sum_{x_s != 0} x_s^k c_s(k) + origin[k]`, where `origin` holds the
/// finitely many contributions of a jump point at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRule {
    #[serde(with = "serde_q::vec")]
    pub points: Vec<Rational>,
    #[serde(with = "serde_q::poly_vec")]
    pub weights: Vec<QPoly>,
    #[serde(with = "serde_q::vec")]
    pub origin: Vec<Rational>,
}

impl EpsilonRule {
    pub fn eval(&self, k: usize) -> Rational {
        let mut acc = self.origin.get(k).cloned().unwrap_or_else(Rational::zero);
        for (x, c) in self.points.iter().zip(&self.weights) {
            let w = c.eval(&kq(k));
            if !w.is_zero() {
                acc += w * pow_q(x, k as i64);
            }
        }
        acc
    }
}

/// Direct evaluation of `eps_k` from the boundary terms.
pub fn epsilon_direct(op: &DifferentialOperator, pw: &PiecewiseData, k: usize) -> Rational {
    let n = op.order();
    let mut acc = Rational::zero();
    for j in 1..=n {
        for (i, a) in op.p(j).coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let m = k + i;
            for t in 0..j {
                if t > m {
                    break;
                }
                let ff = falling_factorial(&kq(m), t);
                for (s, x) in pw.points().iter().enumerate() {
                    let jump = pw.jump(s, j - 1 - t);
                    if jump.is_zero() {
                        continue;
                    }
                    let term = a * &ff * pow_q(x, (m - t) as i64) * jump;
                    if t % 2 == 0 {
                        acc -= term;
                    } else {
                        acc += term;
                    }
                }
            }
        }
    }
    acc
}

/// Closed form of `eps_k` as an exponential polynomial in `k`.
pub fn epsilon_rule(op: &DifferentialOperator, pw: &PiecewiseData) -> EpsilonRule {
    let n = op.order();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut origin = vec![Rational::zero(); n];
    for (s, x) in pw.points().iter().enumerate() {
        let mut c = QPoly::zero().renamed("k");
        for j in 1..=n {
            for (i, a) in op.p(j).coeffs().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for t in 0..j {
                    let jump = pw.jump(s, j - 1 - t);
                    if jump.is_zero() {
                        continue;
                    }
                    let sign = if t % 2 == 0 { -Rational::one() } else { Rational::one() };
                    if x.is_zero() {
                        // only x^0 survives: k + i = t
                        if t >= i {
                            let f = falling_factorial(&kq(t), t);
                            origin[t - i] += sign * a * f * jump;
                        }
                    } else {
                        let coeff = sign * a * pow_q(x, i as i64 - t as i64) * jump;
                        let ff = falling_factorial_poly(&kq(i), t);
                        c = &c + &ff.scale(&coeff);
                    }
                }
            }
        }
        if !x.is_zero() {
            points.push(x.clone());
            weights.push(c.renamed("k"));
        }
    }
    while origin.last().is_some_and(|v| v.is_zero()) {
        origin.pop();
    }
    EpsilonRule { points, weights, origin }
}

/// `sum_l q_l(k) m_{k+l} - eps_k` for `k = 0..=kmax`.
pub fn recurrence_residuals(rec: &MomentRecurrence, eps: &EpsilonRule, m: &[Rational], kmax: usize) -> Vec<Rational> {
    (0..=kmax)
        .map_while(|k| rec.lhs(m, k).map(|l| l - eps.eval(k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::{int, rat};

    fn unit_interval(n: usize, inside: &[i64]) -> PiecewiseData {
        let z = vec![int(0); n];
        let v: Vec<Rational> = inside.iter().map(|&c| int(c)).collect();
        PiecewiseData::new(vec![int(0), int(1)], vec![z.clone(), v.clone()], vec![v, z]).unwrap()
    }

    #[test]
    fn derivative_operator() {
        let op = DifferentialOperator::from_ints(&[&[], &[1]]).unwrap();
        let rec = moment_recurrence(&op);
        assert_eq!(rec.q.len(), 1);
        assert_eq!(rec.q_l(-1).coeffs(), &[int(0), int(-1)]);
        let pw = unit_interval(1, &[1]);
        let eps = epsilon_rule(&op, &pw);
        let m: Vec<Rational> = (0..60).map(|k| rat(1, k + 1)).collect();
        for k in 0..50 {
            assert_eq!(eps.eval(k), epsilon_direct(&op, &pw, k));
        }
        assert!(recurrence_residuals(&rec, &eps, &m, 50).iter().all(|r| r.is_zero()));
        // k m_{k-1} = 1 up to the sign convention
        assert_eq!(eps.eval(3), int(-1));
    }

    #[test]
    fn euler_operator() {
        // x g' - g = 0 on [0, 1] with g = x
        let op = DifferentialOperator::from_ints(&[&[-1], &[0, 1]]).unwrap();
        let rec = moment_recurrence(&op);
        let pw = unit_interval(1, &[1]);
        let eps = epsilon_rule(&op, &pw);
        let m: Vec<Rational> = (0..60).map(|k| rat(1, k + 2)).collect();
        assert!(recurrence_residuals(&rec, &eps, &m, 55).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn step_function() {
        let op = DifferentialOperator::from_ints(&[&[], &[1]]).unwrap();
        let half = rat(1, 2);
        let pw = PiecewiseData::new(
            vec![int(0), half.clone(), int(1)],
            vec![vec![int(0)], vec![int(0)], vec![int(1)]],
            vec![vec![int(0)], vec![int(1)], vec![int(0)]],
        )
        .unwrap();
        let m: Vec<Rational> = (0..60i64)
            .map(|k| (int(1) - pow_q(&half, k + 1)) / int(k + 1))
            .collect();
        let eps = epsilon_rule(&op, &pw);
        assert!(recurrence_residuals(&rec_of(&op), &eps, &m, 55).iter().all(|r| r.is_zero()));
        assert_eq!(eps.points.len(), 2);
    }

    fn rec_of(op: &DifferentialOperator) -> MomentRecurrence {
        moment_recurrence(op)
    }
}
