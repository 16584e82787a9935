//! Rescaled hyperbolic space `H_p^{n+1}` in horospherical coordinates.
//!
//! Points are pairs `(t, x)` with `t ∈ R` and `x ∈ R^n`, carrying the warped
//! product metric `dt² + e^{2σt}|dx|²` with `σ = ln p`. The horosphere
//! `{t} × R^n` is a Euclidean space scaled by `p^t`, and shifting `t` by one
//! contracts horospherical lengths by exactly `1/p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

/// Largest `ln q` for which `q` is formed directly in double precision.
const DIRECT_LOG_LIMIT: f64 = 600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoroPoint {
    pub t: f64,
    pub x: Vec<f64>,
}

impl HoroPoint {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        HoroPoint { t, x }
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

fn check_point(params: &Params, z: &HoroPoint) -> Result<()> {
    params.check_dim(z.x.len())?;
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Overflow(format!("non-finite coordinate in {z:?}")))
    }
}

fn euclid_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `ln sinh(u)` for `u > 0`, without overflow for large `u`.
fn ln_sinh(u: f64) -> f64 {
    if u > 20.0 {
        u + (-(-2.0 * u).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        u.sinh().ln()
    }
}

/// Hyperbolic distance in `H_p^{n+1}`.
///
/// Uses `cosh(σd) = cosh(σΔt) + (σ²/2)·e^{σ(t+t')}·|Δx|²`, which follows from
/// the upper half-space model after substituting `y = e^{-σt}`. The
/// increment `q = cosh(σd) − 1` is assembled as
/// `2 sinh²(σΔt/2) + (σ²/2)e^{σ(t+t')}|Δx|²` so nearby points keep full
/// relative precision, and in log space when `q` would overflow.
pub fn hyp_distance(params: &Params, z: &HoroPoint, w: &HoroPoint) -> Result<f64> {
    check_point(params, z)?;
    check_point(params, w)?;
    let sigma = params.sigma();
    let half = 0.5 * sigma * (z.t - w.t).abs();
    let dx2 = euclid_sq(&z.x, &w.x);

    let ln_vertical = if half > 0.0 {
        std::f64::consts::LN_2 + 2.0 * ln_sinh(half)
    } else {
        f64::NEG_INFINITY
    };
    let ln_horizontal = if dx2 > 0.0 {
        (0.5 * sigma * sigma).ln() + sigma * (z.t + w.t) + dx2.ln()
    } else {
        f64::NEG_INFINITY
    };
    let ln_max = ln_vertical.max(ln_horizontal);
    if ln_max == f64::NEG_INFINITY {
        return Ok(0.0);
    }

    let acosh_1p = if ln_max < DIRECT_LOG_LIMIT {
        let q = ln_vertical.exp() + ln_horizontal.exp();
        (q + (q * (q + 2.0)).sqrt()).ln_1p()
    } else {
        // acosh(1 + q) = ln q + ln 2 + O(1/q)
        let ln_min = ln_vertical.min(ln_horizontal);
        let ln_q = ln_max + (ln_min - ln_max).exp().ln_1p();
        ln_q + std::f64::consts::LN_2
    };
    let d = acosh_1p / sigma;
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Overflow(format!(
            "distance between {z:?} and {w:?} is not representable"
        )))
    }
}

/// Intrinsic distance on the horosphere `{k} × R^n`: `p^k·|x − x'|`.
pub fn horo_distance(params: &Params, k: i64, x: &[f64], y: &[f64]) -> Result<f64> {
    params.check_dim(x.len())?;
    params.check_dim(y.len())?;
    let scale = f64::from(params.p()).powi(clamp_exponent(k));
    Ok(scale * euclid_sq(x, y).sqrt())
}

fn clamp_exponent(k: i64) -> i32 {
    k.clamp(i64::from(i32::MIN), i64::from(i32::MAX)) as i32
}

/// Moves `z` along its vertical geodesic to the horosphere at level `level`.
pub fn project(z: &HoroPoint, level: i64) -> HoroPoint {
    HoroPoint {
        t: level as f64,
        x: z.x.clone(),
    }
}
