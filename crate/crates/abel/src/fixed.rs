//! Zeros of the truncated displacement `G(y) - y` in a disk.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use taydom_core::zeros::{count_zeros, ZeroCount};
use taydom_core::{Rational, Result};

use crate::poincare::{displacement_coefficients, PoincareExpansion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub order: usize,
    /// `None` in the center case.
    pub count: Option<ZeroCount>,
    /// Multiplicity of the fixed point `y = 0`: first `k >= 2` with `v_k != 0`.
    pub leading_index: Option<usize>,
    pub identically_zero: bool,
    pub note: String,
}

pub fn fixed_point_count(exp: &PoincareExpansion, x: &Rational, r: f64) -> Result<FixedPointReport> {
    let c = displacement_coefficients(exp, x);
    if c.iter().all(|v| v.is_zero()) {
        return Ok(FixedPointReport {
            order: exp.order,
            count: None,
            leading_index: None,
            identically_zero: true,
            note: format!("G(y) - y vanishes identically through order {}: center case", exp.order),
        });
    }
    let count = count_zeros(&c, r, None)?;
    Ok(FixedPointReport {
        order: exp.order,
        leading_index: exp.leading_index(x),
        note: format!("zeros of the order-{} truncation in |y| < {r}", exp.order),
        count: Some(count),
        identically_zero: false,
    })
}
