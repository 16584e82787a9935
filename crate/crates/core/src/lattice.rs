//! Scaled-integer form of the cube patterns, used on the hot path of parent
//! lookups.
//!
//! With `D = 2p(p−1)(n+1)` every cube endpoint and center is
//! `η₀ + S / (D·p^k)` for an integer `S = D·g + off_c + u`, where `u` is one
//! of `D/p` (low end), `D/2` (center) or `D − D/p` (high end). Comparing
//! positions at levels `j < k` reduces to comparing `p^{k−j}·S_j` with `S_k`.
//! All arithmetic is checked; overflow is reported, never wrapped.

use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    p: i128,
    d: i128,
    lo: i128,
    hi: i128,
    mid: i128,
    offsets: Vec<i128>,
}

fn overflow() -> Error {
    Error::Overflow("lattice arithmetic exceeds 128 bits".into())
}

impl Lattice {
    pub(crate) fn new(params: &Params) -> Self {
        let p = i128::from(params.p());
        let n1 = params.colors() as i128;
        let d = 2 * p * (p - 1) * n1;
        let lo = 2 * (p - 1) * n1;
        // D·(c/(n+1) − 1/(p−1))
        let offsets = (0..n1).map(|c| 2 * p * (p - 1) * c - 2 * p * n1).collect();
        Lattice {
            p,
            d,
            lo,
            hi: d - lo,
            mid: d / 2,
            offsets,
        }
    }

    pub(crate) fn p_pow(&self, m: u32) -> Result<i128> {
        self.p.checked_pow(m).ok_or_else(overflow)
    }

    fn scaled(&self, c: usize, g: i128, u: i128) -> Result<i128> {
        self.d
            .checked_mul(g)
            .and_then(|v| v.checked_add(self.offsets[c]))
            .and_then(|v| v.checked_add(u))
            .ok_or_else(overflow)
    }

    /// Index of the level-`(k − m)` cell holding the center of the level-`k`
    /// cube with index `g` (one axis).
    pub(crate) fn cell_below(&self, c: usize, g: i128, pm: i128) -> Result<i128> {
        let center = self.scaled(c, g, self.mid)?;
        let shift = pm.checked_mul(self.offsets[c]).ok_or_else(overflow)?;
        let num = center.checked_sub(shift).ok_or_else(overflow)?;
        let den = pm.checked_mul(self.d).ok_or_else(overflow)?;
        Ok(num.div_euclid(den))
    }

    /// Whether the level-`k` interval `inner` lies inside the
    /// level-`(k − m)` interval `outer` (one axis), with `pm = p^m`.
    pub(crate) fn contains(&self, c: usize, outer: i128, inner: i128, pm: i128) -> Result<bool> {
        let outer_lo = pm.checked_mul(self.scaled(c, outer, self.lo)?).ok_or_else(overflow)?;
        let outer_hi = pm.checked_mul(self.scaled(c, outer, self.hi)?).ok_or_else(overflow)?;
        Ok(outer_lo <= self.scaled(c, inner, self.lo)? && self.scaled(c, inner, self.hi)? <= outer_hi)
    }
}
