//! Empirical uniform `(d-1, R, C)` domination over parameter samples.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use taydom_core::domination::minimal_constant;
use taydom_core::{serde_q, Error, Rational, Result};

use crate::recurrence::ParametricSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusRow {
    #[serde(with = "serde_q::one")]
    pub r: Rational,
    /// Sup over the admitted samples of the smallest passing `C`; a lower
    /// bound on the true uniform constant.
    #[serde(with = "serde_q::one")]
    pub sup_c: Rational,
    pub worst_sample: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformReport {
    /// Domination index `d - 1`.
    pub n: usize,
    pub horizon: usize,
    pub samples: usize,
    pub rows: Vec<RadiusRow>,
    /// Samples where `a_0 .. a_{d-1}` all vanish; excluded.
    pub zero_locus: Vec<usize>,
    /// Excluded samples whose tail does not vanish (impossible for a series
    /// produced by a polynomial recurrence).
    pub tail_alive: Vec<usize>,
}

pub fn specialize_and_certify(
    ps: &ParametricSeries,
    samples: &[Vec<Rational>],
    radii: &[Rational],
    horizon: usize,
) -> Result<UniformReport> {
    let d = ps.provenance.recurrence.d;
    let n = d - 1;
    let horizon = horizon.min(ps.horizon());
    if radii.iter().any(|r| *r <= Rational::zero()) {
        return Err(Error::Invalid("radii must be positive".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.len() != ps.nvars) {
        return Err(Error::Invalid(format!("sample has {} coordinates, expected {}", s.len(), ps.nvars)));
    }
    let values: Vec<Vec<Rational>> = samples
        .par_iter()
        .map(|s| ps.terms[..=horizon].iter().map(|a| a.eval(s)).collect())
        .collect();
    let mut zero_locus = Vec::new();
    let mut tail_alive = Vec::new();
    let mut admitted = Vec::new();
    for (idx, v) in values.iter().enumerate() {
        if v.iter().take(d).all(|x| x.is_zero()) {
            zero_locus.push(idx);
            if v.iter().any(|x| !x.is_zero()) {
                tail_alive.push(idx);
            }
        } else {
            admitted.push(idx);
        }
    }
    let rows = radii
        .iter()
        .map(|r| {
            let per: Vec<(usize, Rational)> = admitted
                .par_iter()
                .map(|&i| (i, minimal_constant(&values[i], n, r, horizon).expect("generators do not all vanish")))
                .collect();
            let mut row = RadiusRow {
                r: r.clone(),
                sup_c: Rational::zero(),
                worst_sample: None,
            };
            for (i, c) in per {
                if row.worst_sample.is_none() || c > row.sup_c {
                    row.sup_c = c;
                    row.worst_sample = Some(i);
                }
            }
            row
        })
        .collect();
    Ok(UniformReport {
        n,
        horizon,
        samples: samples.len(),
        rows,
        zero_locus,
        tail_alive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{generate_parametric, ParametricRecurrence};
    use taydom_core::scalar::{int, rat};
    use taydom_core::QMultiPoly;

    #[test]
    fn geometric_family_needs_c_one() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1)]]).unwrap();
        let ps = generate_parametric(&rec, &[QMultiPoly::one(1)], 40).unwrap();
        let samples: Vec<Vec<Rational>> = (-8..=8).map(|i| vec![rat(i, 8)]).collect();
        let rep = specialize_and_certify(&ps, &samples, &[rat(1, 2)], 40).unwrap();
        assert_eq!(rep.n, 0);
        assert!(rep.zero_locus.is_empty());
        // |lambda|^k 2^{-k} <= 1 = |a_0| with equality only at k = 0
        assert!(rep.rows[0].sup_c <= int(1));
        assert!(rep.rows[0].sup_c >= rat(1, 2));
    }

    #[test]
    fn zero_locus_is_excluded_and_counted() {
        let rec = ParametricRecurrence::stationary_linear(&[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let ps = generate_parametric(&rec, &[QMultiPoly::var(2, 0), QMultiPoly::var(2, 1)], 20).unwrap();
        let samples = vec![vec![int(0), int(0)], vec![rat(1, 2), rat(1, 3)], vec![int(0), rat(1, 2)]];
        let rep = specialize_and_certify(&ps, &samples, &[rat(1, 2)], 20).unwrap();
        assert_eq!(rep.zero_locus, vec![0]);
        assert!(rep.tail_alive.is_empty());
        assert!(rep.rows[0].worst_sample.is_some());
    }
}
