//! Companion matrix system for `w(k) = (m_{k-n}, .., m_{k+alpha-1}, eps_k, .., eps_{k+tau-1})`.
//!
//! The step is kept in the division-free form `D(k) w(k+1) = M(k) w(k)`, where
//! `D(k)` is the identity except for `q_alpha(k)` on the row producing
//! `m_{k+alpha}`. The eps block advances by the companion of
//! `prod_s (E - x_s)^n`, which annihilates the exponential polynomial `eps_k`.

use num_traits::{One, Zero};
use taydom_core::roots::roots_exact;
use taydom_core::{Matrix, QMatrix, QPoly, Rational, Result, RootSet};

use crate::moments::{epsilon_rule, moment_recurrence, EpsilonRule, MomentRecurrence};
use crate::operator::{DifferentialOperator, PiecewiseData};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSystem {
    pub rec: MomentRecurrence,
    pub eps: EpsilonRule,
    pub tau: usize,
    /// `e_0 .. e_{tau-1}` of the monic annihilator `E^tau + sum e_i E^i`.
    pub annihilator: Vec<Rational>,
    /// Limit matrix; entries whose limit does not exist are set to zero.
    pub a: QMatrix,
    pub poincare: bool,
    points: Vec<Rational>,
}

/// `prod_s (x - x_s)^n` in the variable `x`.
pub fn jump_annihilator(points: &[Rational], n: usize) -> QPoly {
    let mut acc = QPoly::one();
    for x in points {
        let lin = QPoly::new(vec![-x.clone(), Rational::one()]);
        for _ in 0..n {
            acc = &acc * &lin;
        }
    }
    acc.renamed("x")
}

fn kq(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

pub fn companion_system(op: &DifferentialOperator, pw: &PiecewiseData) -> MomentSystem {
    let rec = moment_recurrence(op);
    let eps = epsilon_rule(op, pw);
    let n = op.order();
    let tau = pw.tau(n);
    let ann = jump_annihilator(pw.points(), n);
    let annihilator = ann.coeffs()[..tau].to_vec();
    let poincare = op.regular_at_infinity();
    let mut sys = MomentSystem {
        rec,
        eps,
        tau,
        annihilator,
        a: Matrix::zeros(0, 0),
        poincare,
        points: pw.points().to_vec(),
    };
    sys.a = sys.limit_matrix();
    sys
}

impl MomentSystem {
    /// Size of the moment block, `alpha + n`.
    pub fn moment_block(&self) -> usize {
        (self.rec.alpha + self.rec.n as i64) as usize
    }

    pub fn dim(&self) -> usize {
        self.moment_block() + self.tau
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    fn fill_eps_block(&self, m: &mut QMatrix) {
        let s = self.moment_block();
        for r in 0..self.tau.saturating_sub(1) {
            m.set(s + r, s + r + 1, Rational::one());
        }
        if self.tau > 0 {
            for (i, e) in self.annihilator.iter().enumerate() {
                m.set(s + self.tau - 1, s + i, -e.clone());
            }
        }
    }

    /// `(diag D(k), M(k))`.
    pub fn step(&self, k: usize) -> (Vec<Rational>, QMatrix) {
        let s = self.moment_block();
        let dim = self.dim();
        let mut d = vec![Rational::one(); dim];
        let mut m = Matrix::zeros(dim, dim);
        for r in 0..s.saturating_sub(1) {
            m.set(r, r + 1, Rational::one());
        }
        if s > 0 {
            let kk = kq(k);
            d[s - 1] = self.rec.leading().eval(&kk);
            for (idx, q) in self.rec.q.iter().take(s).enumerate() {
                m.set(s - 1, idx, -q.eval(&kk));
            }
            m.set(s - 1, s, Rational::one());
        }
        self.fill_eps_block(&mut m);
        (d, m)
    }

    /// `A + B(k) = D(k)^{-1} M(k)`; `None` when `q_alpha(k) = 0`.
    pub fn transition(&self, k: usize) -> Option<QMatrix> {
        let (d, mut m) = self.step(k);
        let s = self.moment_block();
        if s > 0 {
            let lead = &d[s - 1];
            if lead.is_zero() {
                return None;
            }
            for c in 0..m.cols() {
                let v = m.get(s - 1, c) / lead;
                m.set(s - 1, c, v);
            }
        }
        Some(m)
    }

    fn limit_matrix(&self) -> QMatrix {
        let s = self.moment_block();
        let dim = self.dim();
        let mut a = Matrix::zeros(dim, dim);
        for r in 0..s.saturating_sub(1) {
            a.set(r, r + 1, Rational::one());
        }
        if s > 0 {
            let lead = self.rec.leading();
            let ld = lead.degree().unwrap_or(0);
            let lc = lead.leading().cloned().unwrap_or_else(Rational::one);
            for (idx, q) in self.rec.q.iter().take(s).enumerate() {
                if q.degree() == Some(ld) {
                    a.set(s - 1, idx, -(q.leading().expect("nonzero") / &lc));
                }
            }
            if ld == 0 {
                a.set(s - 1, s, lc.recip());
            }
        }
        self.fill_eps_block(&mut a);
        a
    }

    /// `B(k) = D(k)^{-1} M(k) - A`.
    pub fn b(&self, k: usize) -> Option<QMatrix> {
        self.transition(k).map(|t| t.sub(&self.a))
    }

    pub fn b_norm(&self, k: usize) -> Option<f64> {
        self.b(k).map(|b| b.norm_f64())
    }

    /// `w(k)` from moments `m_0, m_1, ..` (negative indices are zero).
    pub fn state(&self, k: usize, m: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.rec.n as i64;
        let mut w = Vec::with_capacity(self.dim());
        for l in -n..self.rec.alpha {
            let at = k as i64 + l;
            w.push(if at < 0 { Rational::zero() } else { m.get(at as usize)?.clone() });
        }
        for t in 0..self.tau {
            w.push(self.eps.eval(k + t));
        }
        Some(w)
    }

    /// `D(k) w(k+1) - M(k) w(k)`.
    pub fn step_residual(&self, k: usize, m: &[Rational]) -> Option<Vec<Rational>> {
        let w0 = self.state(k, m)?;
        let w1 = self.state(k + 1, m)?;
        let (d, mm) = self.step(k);
        let rhs = mm.mul_vec(&w0);
        Some(d.iter().zip(&w1).zip(rhs).map(|((di, wi), r)| di * wi - r).collect())
    }

    /// Characteristic polynomial of `A`.
    pub fn charpoly(&self) -> QPoly {
        self.a.charpoly().renamed("x")
    }

    /// `p_n / lc(p_n) * prod_s (x - x_s)^n`, the expected `det(x - A)`.
    pub fn expected_charpoly(&self, op: &DifferentialOperator) -> QPoly {
        let pn = op.p(op.order()).monic().renamed("x");
        &pn * &jump_annihilator(&self.points, op.order())
    }

    pub fn eigenvalues(&self) -> Result<RootSet> {
        roots_exact(&self.charpoly())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use taydom_core::scalar::{int, rat};

    fn unit(n: usize, v: &[i64]) -> PiecewiseData {
        let z = vec![int(0); n];
        let v: Vec<Rational> = v.iter().map(|&c| int(c)).collect();
        PiecewiseData::new(vec![int(0), int(1)], vec![z.clone(), v.clone()], vec![v, z]).unwrap()
    }

    #[test]
    fn derivative_system_is_exact() {
        let op = DifferentialOperator::from_ints(&[&[], &[1]]).unwrap();
        let sys = companion_system(&op, &unit(1, &[1]));
        assert_eq!((sys.moment_block(), sys.dim()), (0, 2));
        let m: Vec<Rational> = (0..80).map(|k| rat(1, k + 1)).collect();
        for k in 0..60 {
            assert!(sys.step_residual(k, &m).unwrap().iter().all(|r| r.is_zero()));
        }
        assert_eq!(sys.charpoly(), sys.expected_charpoly(&op));
    }

    #[test]
    fn euler_system_spectrum() {
        let op = DifferentialOperator::from_ints(&[&[-1], &[0, 1]]).unwrap();
        let sys = companion_system(&op, &unit(1, &[1]));
        assert_eq!(sys.dim(), 3);
        // x * x (x - 1): eigenvalue 0 twice, 1 once
        assert_eq!(sys.charpoly(), sys.expected_charpoly(&op));
        let ev = sys.eigenvalues().unwrap();
        assert_eq!(ev.degree(), 3);
        let m: Vec<Rational> = (0..80).map(|k| rat(1, k + 2)).collect();
        for k in 0..60 {
            assert!(sys.step_residual(k, &m).unwrap().iter().all(|r| r.is_zero()));
        }
    }

    #[test]
    fn b_decays_for_fuchsian() {
        let op = DifferentialOperator::from_ints(&[&[-1], &[0, 1]]).unwrap();
        let sys = companion_system(&op, &unit(1, &[1]));
        let b: Vec<f64> = [10, 100, 1000].iter().map(|&k| sys.b_norm(k).unwrap()).collect();
        assert!(b[0] > b[1] && b[1] > b[2] && b[2] < 1e-2);
    }
}
