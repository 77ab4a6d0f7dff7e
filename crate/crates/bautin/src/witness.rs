//! Ideal membership `a_k = sum_{i<d} psi_i^k a_i`, unrolled from the recurrence.
//!
//! Every term of `P_k` has some `u_j` with `alpha_j > 0`; splitting that factor
//! off gives `A_alpha u^alpha = (A_alpha u^{alpha - e_j}) a_{k-j}`, and the
//! cofactors of `a_{k-j}` are already known.

use serde::{Deserialize, Serialize};
use taydom_core::{serde_q, Error, QMultiPoly, Result};

use crate::recurrence::{cap_check, check_init, ParametricRecurrence, PowerCache, MONOMIAL_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealWitness {
    pub d: usize,
    #[serde(with = "serde_q::multipoly::vec")]
    pub generators: Vec<QMultiPoly>,
    /// `cofactors[k][i] = psi_i^k`; unit vectors for `k < d`.
    #[serde(with = "serde_q::multipoly::vec_vec")]
    pub cofactors: Vec<Vec<QMultiPoly>>,
    /// `I = I_{d-1}`: an upper bound on the Bautin index.
    pub index_bound: usize,
}

impl IdealWitness {
    pub fn horizon(&self) -> usize {
        self.cofactors.len() - 1
    }

    /// `sum_i psi_i^k a_i`.
    pub fn combination(&self, k: usize) -> QMultiPoly {
        let nvars = self.generators[0].nvars();
        let mut acc = QMultiPoly::zero(nvars);
        for (psi, g) in self.cofactors[k].iter().zip(&self.generators) {
            if !psi.is_zero() && !g.is_zero() {
                acc.add_assign(&psi.mul(g));
            }
        }
        acc
    }

    /// Asserts `a_k - sum_i psi_i^k a_i = 0` for every `k` covered by both.
    pub fn check(&self, terms: &[QMultiPoly]) -> Result<()> {
        for (k, a) in terms.iter().enumerate().take(self.cofactors.len()) {
            if self.combination(k) != *a {
                return Err(Error::Invalid(format!("witness identity fails at k = {k}")));
            }
        }
        Ok(())
    }

    /// Largest number of monomials in one cofactor.
    pub fn max_terms(&self) -> usize {
        self.cofactors.iter().flatten().map(|p| p.len()).max().unwrap_or(0)
    }
}

pub fn ideal_witness(rec: &ParametricRecurrence, init: &[QMultiPoly], horizon: usize) -> Result<IdealWitness> {
    ideal_witness_capped(rec, init, horizon, MONOMIAL_CAP)
}

pub fn ideal_witness_capped(
    rec: &ParametricRecurrence,
    init: &[QMultiPoly],
    horizon: usize,
    cap: usize,
) -> Result<IdealWitness> {
    check_init(rec, init)?;
    let d = rec.d;
    let nvars = rec.nvars;
    let mut terms: Vec<QMultiPoly> = init.to_vec();
    let mut cof: Vec<Vec<QMultiPoly>> = (0..d.min(horizon + 1))
        .map(|k| {
            (0..d)
                .map(|i| if i == k { QMultiPoly::one(nvars) } else { QMultiPoly::zero(nvars) })
                .collect()
        })
        .collect();
    for k in d..=horizon {
        let mut cache = PowerCache::new(&terms, k, d);
        let mut a = QMultiPoly::zero(nvars);
        let mut psi = vec![QMultiPoly::zero(nvars); d];
        for t in rec.rule(k) {
            if t.coeff.is_zero() {
                continue;
            }
            let j = 1 + t.alpha.iter().position(|&e| e > 0).expect("validated: |alpha| >= 1");
            let rest = t.coeff.mul(&cache.monomial(&t.alpha, Some(j)));
            if rest.is_zero() {
                continue;
            }
            a.add_assign(&rest.mul(&terms[k - j]));
            for (p, c) in psi.iter_mut().zip(&cof[k - j]) {
                if !c.is_zero() {
                    p.add_assign(&rest.mul(c));
                }
            }
        }
        cap_check(&a, k, cap)?;
        for p in &psi {
            if p.len() > cap {
                return Err(Error::SizeCap(format!("cofactor of a_{k} has {} monomials (cap {cap})", p.len())));
            }
        }
        terms.push(a);
        cof.push(psi);
    }
    let w = IdealWitness {
        d,
        generators: init.to_vec(),
        cofactors: cof,
        index_bound: d - 1,
    };
    w.check(&terms)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{generate_parametric, PolyTerm};
    use taydom_core::scalar::int;

    #[test]
    fn linear_example() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let init = [QMultiPoly::var(2, 0), QMultiPoly::var(2, 1)];
        let w = ideal_witness(&rec, &init, 10).unwrap();
        let ps = generate_parametric(&rec, &init, 10).unwrap();
        w.check(&ps.terms).unwrap();
        // a_2 = 2 lambda_1 lambda_2 = (2 lambda_2) a_0 is another witness
        let alt = QMultiPoly::var(2, 1).scale(&int(2)).mul(&init[0]);
        assert_eq!(alt, ps.terms[2]);
        assert_eq!(w.index_bound, 1);
    }

    #[test]
    fn unit_generator_gives_whole_ring() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1)]]).unwrap();
        let init = [QMultiPoly::one(1)];
        let w = ideal_witness(&rec, &init, 8).unwrap();
        let ps = generate_parametric(&rec, &init, 8).unwrap();
        for k in 0..=8 {
            assert_eq!(w.cofactors[k][0], ps.terms[k]);
        }
    }

    #[test]
    fn quadratic_terms_reduce() {
        // a_k = lambda_1 a_{k-1}^2 + lambda_2 a_{k-1} a_{k-2}
        let rec = ParametricRecurrence::new(
            2,
            2,
            vec![vec![
                PolyTerm::new(vec![2, 0], QMultiPoly::var(2, 0)),
                PolyTerm::new(vec![1, 1], QMultiPoly::var(2, 1)),
            ]],
            false,
            None,
        )
        .unwrap();
        let init = [QMultiPoly::var(2, 0).add(&QMultiPoly::one(2)), QMultiPoly::var(2, 1)];
        let w = ideal_witness(&rec, &init, 6).unwrap();
        let ps = generate_parametric(&rec, &init, 6).unwrap();
        w.check(&ps.terms).unwrap();
        assert!(w.check(&[init[1].clone()]).is_err());
    }
}
