//! Axis-aligned boxes with exact rational corners.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalBox {
    lo: Vec<BigRational>,
    hi: Vec<BigRational>,
}

impl RationalBox {
    /// Builds a box from its corners. Panics if the corners have different
    /// lengths or some `lo[i] > hi[i]`.
    pub fn new(lo: Vec<BigRational>, hi: Vec<BigRational>) -> Self {
        assert_eq!(lo.len(), hi.len(), "corner dimensions differ");
        assert!(
            lo.iter().zip(&hi).all(|(l, h)| l <= h),
            "box corners out of order"
        );
        RationalBox { lo, hi }
    }

    pub fn lo(&self) -> &[BigRational] {
        &self.lo
    }

    pub fn hi(&self) -> &[BigRational] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<BigRational> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (l + h) / BigRational::from_integer(2.into()))
            .collect()
    }

    /// Closed-box membership.
    pub fn contains_point(&self, x: &[BigRational]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(xi, (l, h))| l <= xi && xi <= h)
    }

    /// `other ⊆ self`, closed boxes.
    pub fn contains_box(&self, other: &RationalBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        self.lo.iter().map(to_f64).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        self.hi.iter().map(to_f64).collect()
    }
}

impl fmt::Display for RationalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if i > 0 {
                f.write_str("×")?;
            }
            write!(f, "[{l}, {h}]")?;
        }
        Ok(())
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_same_dim(b1: &RationalBox, b2: &RationalBox) -> Result<()> {
    if b1.dim() == b2.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: b1.dim(),
            found: b2.dim(),
        })
    }
}

/// Exact squared Euclidean distance between two closed boxes; zero iff
/// they intersect.
pub fn box_gap_sq(b1: &RationalBox, b2: &RationalBox) -> Result<BigRational> {
    check_same_dim(b1, b2)?;
    let mut total = BigRational::zero();
    for i in 0..b1.dim() {
        let gap = if b2.lo[i] > b1.hi[i] {
            &b2.lo[i] - &b1.hi[i]
        } else if b1.lo[i] > b2.hi[i] {
            &b1.lo[i] - &b2.hi[i]
        } else {
            continue;
        };
        total += &gap * &gap;
    }
    Ok(total)
}

/// Distance from `inner` to the boundary of `outer`, or `None` when `inner`
/// is not contained in `outer`.
pub fn boundary_margin(outer: &RationalBox, inner: &RationalBox) -> Result<Option<BigRational>> {
    check_same_dim(outer, inner)?;
    if !outer.contains_box(inner) {
        return Ok(None);
    }
    let margin = (0..outer.dim())
        .flat_map(|i| [&inner.lo[i] - &outer.lo[i], &outer.hi[i] - &inner.hi[i]])
        .min()
        .unwrap_or_else(BigRational::zero);
    debug_assert!(!margin.is_negative());
    Ok(Some(margin))
}
