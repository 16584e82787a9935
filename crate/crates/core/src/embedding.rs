//! The map `f = (f_c)` from `H_p^{n+1}` into the product of the colored
//! trees, and the product metric on the target.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cubes::{nearest_in_level, CubeId};
use crate::error::{Error, Result};
use crate::hyperbolic::HoroPoint;
use crate::params::Params;
use crate::tree::tree_distance;

/// How the level of the image cube is chosen from the height `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LevelRule {
    /// `k = ⌊t + 1/2⌋`, the level nearest to `t` with halves rounded up.
    #[default]
    Rounded,
    /// Every point goes to the same level. Not a quasi-isometric embedding;
    /// used as a negative control.
    Fixed(i64),
}

impl LevelRule {
    pub fn level(self, t: f64) -> Result<i64> {
        match self {
            LevelRule::Fixed(k) => Ok(k),
            LevelRule::Rounded => {
                let k = (t + 0.5).floor();
                if k.is_finite() && k.abs() < 1e15 {
                    Ok(k as i64)
                } else {
                    Err(Error::Overflow(format!("height {t} has no representable level")))
                }
            }
        }
    }
}

/// Image of a point under `f`: one cube per color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    #[serde(flatten)]
    pub source: HoroPoint,
    pub images: Vec<CubeId>,
}

/// `f_c(z)`: the cube of color `c` at the level nearest to `z.t` that is
/// nearest to `z.x`.
pub fn embed_color(params: &Params, z: &HoroPoint, c: usize) -> Result<CubeId> {
    embed_color_with(params, z, c, LevelRule::Rounded)
}

pub fn embed_color_with(params: &Params, z: &HoroPoint, c: usize, rule: LevelRule) -> Result<CubeId> {
    if c >= params.colors() {
        return Err(Error::ColorMismatch {
            left: c,
            right: params.colors() - 1,
        });
    }
    nearest_in_level(params, c, rule.level(z.t)?, &z.x)
}

pub fn embed(params: &Params, z: &HoroPoint) -> Result<EmbeddedPoint> {
    embed_with(params, z, LevelRule::Rounded)
}

pub fn embed_with(params: &Params, z: &HoroPoint, rule: LevelRule) -> Result<EmbeddedPoint> {
    let images = (0..params.colors())
        .map(|c| embed_color_with(params, z, c, rule))
        .collect::<Result<_>>()?;
    Ok(EmbeddedPoint {
        source: z.clone(),
        images,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    L2,
    Linf,
}

impl Norm {
    /// Combines per-color tree distances.
    pub fn combine(self, per_color: &[u64]) -> f64 {
        match self {
            Norm::L1 => per_color.iter().sum::<u64>() as f64,
            Norm::L2 => per_color
                .iter()
                .map(|&d| (d as f64) * (d as f64))
                .sum::<f64>()
                .sqrt(),
            Norm::Linf => per_color.iter().copied().max().unwrap_or(0) as f64,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(format!("unknown norm {other:?} (expected l1, l2 or linf)")),
        }
    }
}

/// Tree distance between the images in each color.
pub fn color_distances(
    params: &Params,
    e: &EmbeddedPoint,
    f: &EmbeddedPoint,
    scan_cap: u32,
) -> Result<Vec<u64>> {
    e.images
        .iter()
        .zip(&f.images)
        .map(|(u, v)| tree_distance(params, u, v, scan_cap))
        .collect()
}

pub fn product_distance(
    params: &Params,
    e: &EmbeddedPoint,
    f: &EmbeddedPoint,
    norm: Norm,
    scan_cap: u32,
) -> Result<f64> {
    Ok(norm.combine(&color_distances(params, e, f, scan_cap)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::to_f64;
    use crate::cubes::{locate, realize};
    use crate::hyperbolic::hyp_distance;
    use crate::params::validate_params;
    use crate::tree::DEFAULT_SCAN_CAP;
    use num_rational::BigRational;

    fn z(t: f64, x: &[f64]) -> HoroPoint {
        HoroPoint::new(t, x.to_vec())
    }

    fn id(c: usize, k: i64, g: i128) -> CubeId {
        CubeId::new(c, k, vec![g])
    }

    /// Exact-distance brute force over a range of indices.
    fn brute_nearest(params: &Params, c: usize, k: i64, x: f64, range: std::ops::RangeInclusive<i128>) -> CubeId {
        let xr = BigRational::from_float(x).unwrap();
        range
            .map(|g| {
                let b = realize(params, &id(c, k, g));
                let d = if xr < b.lo()[0] {
                    &b.lo()[0] - &xr
                } else if xr > b.hi()[0] {
                    &xr - &b.hi()[0]
                } else {
                    BigRational::from_integer(0.into())
                };
                (d, g)
            })
            .min()
            .map(|(_, g)| id(c, k, g))
            .unwrap()
    }

    #[test]
    fn color_examples() {
        let params = validate_params(1, 5).unwrap();
        assert_eq!(embed_color(&params, &z(0.0, &[0.5]), 0).unwrap(), id(0, 0, 0));
        assert_eq!(embed_color(&params, &z(0.4, &[0.5]), 0).unwrap(), id(0, 0, 0));
        let up = embed_color(&params, &z(0.6, &[0.5]), 0).unwrap();
        assert_eq!(up, id(0, 1, 1));
        assert_eq!(up, brute_nearest(&params, 0, 1, 0.5, 0..=4));
        let b = realize(&params, &up);
        assert_eq!(b.lo()[0], BigRational::new(11.into(), 25.into()));
        assert_eq!(b.hi()[0], BigRational::new(14.into(), 25.into()));
    }

    #[test]
    fn half_heights_round_up() {
        let params = validate_params(1, 5).unwrap();
        assert_eq!(embed_color(&params, &z(0.5, &[0.5]), 0).unwrap().k, 1);
        assert_eq!(embed_color(&params, &z(-0.5, &[0.5]), 0).unwrap().k, 0);
        assert_eq!(embed_color(&params, &z(-1.5, &[0.5]), 0).unwrap().k, -1);
    }

    #[test]
    fn embed_planar_example() {
        // Color 1 at level 0 has cubes [−3/10, 3/10] (γ = −1) and
        // [7/10, 13/10] (γ = 0); x = 1/2 is 1/5 from both and the tie goes to
        // the smaller index.
        let params = validate_params(1, 5).unwrap();
        let e = embed(&params, &z(0.0, &[0.5])).unwrap();
        assert_eq!(e.images, vec![id(0, 0, 0), id(1, 0, -1)]);
        assert_eq!(e.images[1], brute_nearest(&params, 1, 0, 0.5, -2..=2));
        assert_eq!(e, embed(&params, &z(0.0, &[0.5])).unwrap());
    }

    #[test]
    fn fixed_point_column_is_a_containment_chain() {
        let params = validate_params(1, 5).unwrap();
        let eta0 = params.eta0().to_vec();
        let x = to_f64(&eta0[0]);
        for c in 0..2 {
            let images: Vec<CubeId> = (0..=6)
                .map(|t| embed_color(&params, &z(t as f64, &[x]), c).unwrap())
                .collect();
            for (t, img) in images.iter().enumerate() {
                assert_eq!(Some(img.clone()), locate(&params, c, t as i64, &eta0).unwrap());
            }
            for w in images.windows(2) {
                assert!(realize(&params, &w[0]).contains_box(&realize(&params, &w[1])));
                assert_eq!(tree_distance(&params, &w[0], &w[1], DEFAULT_SCAN_CAP).unwrap(), 1);
            }
        }
    }

    #[test]
    fn norm_arithmetic() {
        assert_eq!(Norm::L1.combine(&[3, 4]), 7.0);
        assert_eq!(Norm::L2.combine(&[3, 4]), 5.0);
        assert_eq!(Norm::Linf.combine(&[3, 4]), 4.0);
        assert_eq!("LINF".parse::<Norm>().unwrap(), Norm::Linf);
        assert!("l3".parse::<Norm>().is_err());
    }

    #[test]
    fn product_distance_and_norm_order() {
        let params = validate_params(1, 5).unwrap();
        let pts = [z(0.0, &[0.5]), z(2.3, &[-7.1]), z(-1.2, &[40.0]), z(3.0, &[0.26])];
        for a in &pts {
            let ea = embed(&params, a).unwrap();
            assert_eq!(product_distance(&params, &ea, &ea, Norm::L1, 64).unwrap(), 0.0);
            for b in &pts {
                let eb = embed(&params, b).unwrap();
                let d = |norm| product_distance(&params, &ea, &eb, norm, 64).unwrap();
                let (l1, l2, linf) = (d(Norm::L1), d(Norm::L2), d(Norm::Linf));
                assert!(linf <= l2 + 1e-12 && l2 <= l1 + 1e-12);
                assert!(l1 <= params.colors() as f64 * linf);
            }
        }
    }

    #[test]
    fn displacement_bound() {
        for (n, p) in [(1, 5), (2, 7)] {
            let params = validate_params(n, p).unwrap();
            let bound = 0.5 + (n as f64).sqrt() / 2.0 + 0.1;
            for i in 0..400 {
                let t = -3.0 + (i as f64) * 0.0173;
                let x: Vec<f64> = (0..n).map(|a| ((i * 37 + a * 11) % 101) as f64 / 13.0 - 3.0).collect();
                let point = z(t, &x);
                for c in 0..params.colors() {
                    let cube = embed_color(&params, &point, c).unwrap();
                    assert_eq!(cube.k, (t + 0.5).floor() as i64);
                    let center: Vec<f64> = realize(&params, &cube).center().iter().map(to_f64).collect();
                    let d = hyp_distance(&params, &point, &z(cube.k as f64, &center)).unwrap();
                    assert!(d <= bound, "z={point:?} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let params = validate_params(1, 5).unwrap();
        let e = embed(&params, &z(0.0, &[0.5])).unwrap();
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(v["t"], 0.0);
        assert_eq!(v["x"][0], 0.5);
        assert_eq!(v["images"][1]["c"], 1);
        assert_eq!(v["images"][1]["gamma"][0], -1);
        let back: EmbeddedPoint = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }
}
