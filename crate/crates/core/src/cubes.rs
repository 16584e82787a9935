//! Colored nested cube patterns.
//!
//! The level-0 pattern of color `c` is `Z^n + cν + A` with the template
//! `A = [1/p, 1 − 1/p]^n`. Level `k` is the image of level 0 under `H^{-k}`,
//! where `H(x) = p(x − η)` expands about its fixed point `η₀ = θ/(p−1)`.
//! Since `H^{-k}(x) = p^{-k}(x − η₀) + η₀`, the cube with lattice index `γ`
//! at level `k` is
//!
//! ```text
//! p^{-k}·(γ + cν + A − η₀) + η₀
//! ```
//!
//! so a cube is named by `(c, k, γ)` alone.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{box_gap_sq, boundary_margin, RationalBox};
use crate::error::{Error, Result};
use crate::params::Params;

/// Default budget for [`verify_covering_level0`].
pub const DEFAULT_CELL_BUDGET: u128 = 1_000_000;

const MAX_WITNESSES: usize = 16;

/// A vertex of the colored tree `T_c`: the cube of color `c`, level `k` and
/// lattice index `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeId {
    pub c: usize,
    pub k: i64,
    pub gamma: Vec<i128>,
}

impl CubeId {
    pub fn new(c: usize, k: i64, gamma: Vec<i128>) -> Self {
        CubeId { c, k, gamma }
    }

    /// Identifier safe for graph formats: `c_k_g1_g2…`.
    pub fn node_name(&self) -> String {
        let mut s = format!("{}_{}", self.c, self.k);
        for g in &self.gamma {
            s.push('_');
            s.push_str(&g.to_string());
        }
        s
    }

    pub(crate) fn check(&self, params: &Params) -> Result<()> {
        params.check_dim(self.gamma.len())?;
        if self.c >= params.colors() {
            return Err(Error::ColorMismatch {
                left: self.c,
                right: params.colors() - 1,
            });
        }
        Ok(())
    }
}

/// `c,k,g1[,g2,…]`
impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.c, self.k)?;
        for g in &self.gamma {
            write!(f, ",{g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseCubeIdError(String);

impl fmt::Display for ParseCubeIdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected `c,k,g1[,g2,...]`: {}", self.0)
    }
}

impl std::error::Error for ParseCubeIdError {}

impl FromStr for CubeId {
    type Err = ParseCubeIdError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() < 3 {
            return Err(ParseCubeIdError(format!("too few fields in {s:?}")));
        }
        let bad = |what: &str, v: &str| ParseCubeIdError(format!("bad {what} {v:?}"));
        let c = parts[0].parse().map_err(|_| bad("color", parts[0]))?;
        let k = parts[1].parse().map_err(|_| bad("level", parts[1]))?;
        let gamma = parts[2..]
            .iter()
            .map(|g| g.parse().map_err(|_| bad("lattice coordinate", g)))
            .collect::<std::result::Result<_, _>>()?;
        Ok(CubeId { c, k, gamma })
    }
}

/// Exact box of a cube.
pub fn realize(params: &Params, id: &CubeId) -> RationalBox {
    let scale = params.lambda_pow(id.k);
    let shift = params.color_shift(id.c);
    let eta0 = &params.eta0()[0];
    let lo_t = params.lambda();
    let hi_t = BigRational::one() - params.lambda();
    let axis = |g: i128, t: &BigRational| {
        let base = BigRational::from_integer(BigInt::from(g)) + &shift + t - eta0;
        &scale * base + eta0
    };
    let lo = id.gamma.iter().map(|&g| axis(g, lo_t)).collect();
    let hi = id.gamma.iter().map(|&g| axis(g, &hi_t)).collect();
    RationalBox::new(lo, hi)
}

/// Level-0 frame coordinate of `x` for color `c` at level `k`, i.e. the
/// point `y` with `x = p^{-k}(y + cν − η₀) + η₀`.
pub(crate) fn pattern_coordinate(params: &Params, c: usize, k: i64, x: &BigRational) -> BigRational {
    let eta0 = &params.eta0()[0];
    params.p_pow(k) * (x - eta0) + eta0 - params.color_shift(c)
}

fn to_lattice(v: BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::Overflow(format!("lattice coordinate {v} exceeds 128 bits")))
}

/// The cube of color `c`, level `k` containing `x`, or `None` when `x` lies
/// in the gap between cubes. Cubes are closed.
pub fn locate(params: &Params, c: usize, k: i64, x: &[BigRational]) -> Result<Option<CubeId>> {
    params.check_dim(x.len())?;
    let lo_t = params.lambda();
    let hi_t = BigRational::one() - params.lambda();
    let mut gamma = Vec::with_capacity(x.len());
    for xi in x {
        let y = pattern_coordinate(params, c, k, xi);
        let g = y.floor();
        let frac = &y - &g;
        if frac < *lo_t || frac > hi_t {
            return Ok(None);
        }
        gamma.push(to_lattice(g.to_integer())?);
    }
    Ok(Some(CubeId::new(c, k, gamma)))
}

/// The cube of color `c`, level `k` nearest to `x` in Euclidean distance,
/// ties broken towards the lexicographically smallest `γ`.
///
/// The pattern is a product of identical one-dimensional patterns, so each
/// axis is solved on its own. In the level-0 frame the cube `g` covers
/// `[g + 1/p, g + 1 − 1/p]`, the gap midpoints sit on the integers, and the
/// nearest index is `⌈y⌉ − 1` (an integer `y` is equidistant from `y − 1`
/// and `y`, and the smaller index wins).
pub fn nearest_in_level(params: &Params, c: usize, k: i64, x: &[f64]) -> Result<CubeId> {
    params.check_dim(x.len())?;
    let mut gamma = Vec::with_capacity(x.len());
    for &xi in x {
        let exact = BigRational::from_float(xi)
            .ok_or_else(|| Error::Overflow(format!("non-finite coordinate {xi}")))?;
        let y = pattern_coordinate(params, c, k, &exact);
        gamma.push(to_lattice(y.ceil().to_integer() - 1)?);
    }
    Ok(CubeId::new(c, k, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationKind {
    DisjointFar,
    NestedDeep,
    Violation,
}

/// Outcome of checking one pair of cubes against the separation property.
///
/// `witness` is the squared gap when the boxes are disjoint and the boundary
/// margin when the higher cube sits inside the lower one; a partial overlap
/// is a violation with witness zero. `threshold` is `λ^{k+1}` for the higher
/// level `k` (a gap is compared through its square).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationVerdict {
    pub kind: SeparationKind,
    pub witness: BigRational,
    pub threshold: BigRational,
}

pub fn separation_verdict(params: &Params, low: &CubeId, high: &CubeId) -> Result<SeparationVerdict> {
    low.check(params)?;
    high.check(params)?;
    if low.c != high.c {
        return Err(Error::ColorMismatch {
            left: low.c,
            right: high.c,
        });
    }
    if low.k >= high.k {
        return Err(Error::LevelOrder {
            low: low.k,
            high: high.k,
        });
    }
    let threshold = params.lambda_pow(high.k + 1);
    let outer = realize(params, low);
    let inner = realize(params, high);
    let gap_sq = box_gap_sq(&outer, &inner)?;
    let (kind, witness) = if !gap_sq.is_zero() {
        if gap_sq >= &threshold * &threshold {
            (SeparationKind::DisjointFar, gap_sq)
        } else {
            (SeparationKind::Violation, gap_sq)
        }
    } else {
        match boundary_margin(&outer, &inner)? {
            Some(m) if m >= threshold => (SeparationKind::NestedDeep, m),
            Some(m) => (SeparationKind::Violation, m),
            None => (SeparationKind::Violation, BigRational::zero()),
        }
    };
    Ok(SeparationVerdict {
        kind,
        witness,
        threshold,
    })
}

/// One failing pair found by [`separation_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    pub low: CubeId,
    pub high: CubeId,
    /// Squared gap or nesting margin, as a fraction.
    pub witness: String,
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationCheck {
    pub checked: usize,
    pub disjoint_far: usize,
    pub nested_deep: usize,
    pub violations: usize,
    /// The first few violating pairs.
    pub witnesses: Vec<SeparationWitness>,
}

/// Exact verdicts on `count` random same-color pairs with levels in
/// `[k_min, k_max]`. The higher cube is the one nearest to a random point
/// within one side length of the lower cube, so nested and barely disjoint
/// pairs are both common.
pub fn separation_check(params: &Params, count: usize, seed: u64, k_min: i64, k_max: i64) -> Result<SeparationCheck> {
    if k_min >= k_max {
        return Err(Error::LevelOrder { low: k_min, high: k_max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let c = rng.random_range(0..params.colors());
        let k_low = rng.random_range(k_min..k_max);
        let k_high = rng.random_range(k_low + 1..=k_max);
        let gamma = (0..params.n()).map(|_| rng.random_range(-3..=3)).collect();
        let low = CubeId::new(c, k_low, gamma);
        let b = realize(params, &low);
        let x: Vec<f64> = b
            .lo_f64()
            .iter()
            .zip(b.hi_f64())
            .map(|(lo, hi)| lo + (hi - lo) * rng.random_range(-1.0..2.0))
            .collect();
        let high = nearest_in_level(params, c, k_high, &x)?;
        pairs.push((low, high));
    }
    let verdicts = pairs
        .par_iter()
        .map(|(low, high)| separation_verdict(params, low, high))
        .collect::<Result<Vec<_>>>()?;
    let mut check = SeparationCheck {
        checked: count,
        disjoint_far: 0,
        nested_deep: 0,
        violations: 0,
        witnesses: Vec::new(),
    };
    for ((low, high), v) in pairs.into_iter().zip(verdicts) {
        match v.kind {
            SeparationKind::DisjointFar => check.disjoint_far += 1,
            SeparationKind::NestedDeep => check.nested_deep += 1,
            SeparationKind::Violation => {
                check.violations += 1;
                if check.witnesses.len() < MAX_WITNESSES {
                    check.witnesses.push(SeparationWitness {
                        low,
                        high,
                        witness: v.witness.to_string(),
                        threshold: v.threshold.to_string(),
                    });
                }
            }
        }
    }
    Ok(check)
}

/// Result of the exact level-0 covering check on the unit torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub n: usize,
    pub p: u32,
    /// Exact grid step `1/lcm(p, n+1)`.
    pub grid_step: String,
    pub cells_total: u64,
    pub cells_uncovered: u64,
    /// Centers of (at most 16) uncovered cells, exact rationals as strings.
    pub witnesses: Vec<Vec<String>>,
    pub covered: bool,
}

/// Checks that the level-0 patterns of all colors cover `R^n`.
pub fn verify_covering_level0(params: &Params) -> Result<CoveringReport> {
    let colors: Vec<usize> = (0..params.colors()).collect();
    verify_covering_level0_with(params, &colors, DEFAULT_CELL_BUDGET)
}

/// Covering check restricted to `colors`.
///
/// Every level-0 cube boundary lies on the grid of step `1/lcm(p, n+1)`, so
/// each grid cell of the torus is either inside or outside each shifted
/// pattern and testing its center decides it exactly. Covering at level 0
/// carries over to every level because level `k` is the image of level 0
/// under `H^{-k}` for all colors at once.
pub fn verify_covering_level0_with(
    params: &Params,
    colors: &[usize],
    cell_budget: u128,
) -> Result<CoveringReport> {
    let n = params.n();
    let steps = (params.p() as u64).lcm(&(n as u64 + 1));
    let total = (steps as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= cell_budget)
        .ok_or(Error::ResourceLimit {
            what: "covering grid cells",
            requested: (steps as u128).saturating_pow(n as u32),
            budget: cell_budget,
        })?;
    for &c in colors {
        if c >= params.colors() {
            return Err(Error::ColorMismatch {
                left: c,
                right: params.colors() - 1,
            });
        }
    }

    let denom = BigInt::from(2 * steps);
    let center = |index: u64| -> Vec<BigRational> {
        let mut rest = index;
        (0..n)
            .map(|_| {
                let i = rest % steps;
                rest /= steps;
                BigRational::new(BigInt::from(2 * i + 1), denom.clone())
            })
            .collect()
    };
    let uncovered: Vec<u64> = (0..total as u64)
        .into_par_iter()
        .map(|cell| {
            let x = center(cell);
            for &c in colors {
                if locate(params, c, 0, &x)?.is_some() {
                    return Ok(None);
                }
            }
            Ok(Some(cell))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let witnesses = uncovered
        .iter()
        .take(MAX_WITNESSES)
        .map(|&cell| center(cell).iter().map(|v| v.to_string()).collect())
        .collect();
    Ok(CoveringReport {
        n,
        p: params.p(),
        grid_step: format!("1/{steps}"),
        cells_total: total as u64,
        cells_uncovered: uncovered.len() as u64,
        witnesses,
        covered: uncovered.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_params;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn iv(lo: BigRational, hi: BigRational) -> RationalBox {
        RationalBox::new(vec![lo], vec![hi])
    }

    fn id(c: usize, k: i64, g: i128) -> CubeId {
        CubeId::new(c, k, vec![g])
    }

    /// Brute-force nearest cube: scan a window of indices with exact
    /// distances.
    fn brute_nearest(params: &Params, c: usize, k: i64, x: &BigRational, around: i128) -> i128 {
        let mut best: Option<(BigRational, i128)> = None;
        for g in around - 3..=around + 3 {
            let b = realize(params, &id(c, k, g));
            let d = if x < &b.lo()[0] {
                &b.lo()[0] - x
            } else if x > &b.hi()[0] {
                x - &b.hi()[0]
            } else {
                BigRational::zero()
            };
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, g));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn realize_examples() {
        let params = validate_params(1, 5).unwrap();
        assert_eq!(realize(&params, &id(0, 0, 0)), iv(r(1, 5), r(4, 5)));
        assert_eq!(realize(&params, &id(0, 1, 0)), iv(r(6, 25), r(9, 25)));
        assert_eq!(realize(&params, &id(0, -1, 0)), iv(r(0, 1), r(3, 1)));
        assert_eq!(realize(&params, &id(0, 1, 3)), iv(r(21, 25), r(24, 25)));
        assert_eq!(realize(&params, &id(1, 0, 0)), iv(r(7, 10), r(13, 10)));
    }

    #[test]
    fn level_one_box_is_one_of_the_five_subcells() {
        // The five level-1 boxes lying in [0, 1]: each sits in its own
        // subinterval [i/5, (i+1)/5] at relative offset 1/25.
        let params = validate_params(1, 5).unwrap();
        let boxes: Vec<_> = (-1..=3).map(|g| realize(&params, &id(0, 1, g))).collect();
        for (i, b) in boxes.iter().enumerate() {
            assert_eq!(b.lo()[0], r(i as i64, 5) + r(1, 25));
            assert_eq!(b.hi()[0], r(i as i64 + 1, 5) - r(1, 25));
        }
    }

    #[test]
    fn realize_side_length() {
        let params = validate_params(2, 7).unwrap();
        for k in -3..=3 {
            let b = realize(&params, &CubeId::new(2, k, vec![4, -9]));
            for i in 0..2 {
                assert_eq!(&b.hi()[i] - &b.lo()[i], params.a() * params.lambda_pow(k));
            }
        }
    }

    #[test]
    fn realize_self_similar_under_expansion() {
        let params = validate_params(2, 7).unwrap();
        for (c, k, g) in [(0, 1, vec![3, -2]), (1, 0, vec![0, 5]), (2, -2, vec![-1, 1])] {
            let fine = realize(&params, &CubeId::new(c, k, g.clone()));
            let coarse = realize(&params, &CubeId::new(c, k - 1, g));
            assert_eq!(params.expand(fine.lo()), coarse.lo());
            assert_eq!(params.expand(fine.hi()), coarse.hi());
        }
    }

    #[test]
    fn locate_examples() {
        let params = validate_params(1, 5).unwrap();
        assert_eq!(locate(&params, 0, 0, &[r(1, 2)]).unwrap(), Some(id(0, 0, 0)));
        assert_eq!(locate(&params, 0, 0, &[r(9, 10)]).unwrap(), None);
        assert_eq!(locate(&params, 1, 0, &[r(9, 10)]).unwrap(), Some(id(1, 0, 0)));
        // closed boundaries
        assert_eq!(locate(&params, 0, 0, &[r(4, 5)]).unwrap(), Some(id(0, 0, 0)));
        assert_eq!(locate(&params, 0, 0, &[r(6, 5)]).unwrap(), Some(id(0, 0, 1)));
        assert!(locate(&params, 0, 0, &[r(1, 2), r(1, 2)]).is_err());
    }

    #[test]
    fn nearest_examples() {
        let params = validate_params(1, 5).unwrap();
        assert_eq!(nearest_in_level(&params, 0, 0, &[0.5]).unwrap(), id(0, 0, 0));
        // 0.99 − 0.8 = 0.19 < 1.2 − 0.99 = 0.21
        assert_eq!(nearest_in_level(&params, 0, 0, &[0.99]).unwrap(), id(0, 0, 0));
        assert_eq!(brute_nearest(&params, 0, 0, &r(99, 100), 0), 0);
        // exact tie at the gap midpoint goes to the smaller index
        assert_eq!(nearest_in_level(&params, 0, 0, &[1.0]).unwrap(), id(0, 0, 0));
        assert_eq!(nearest_in_level(&params, 0, 0, &[-1.0]).unwrap(), id(0, 0, -2));
    }

    #[test]
    fn nearest_agrees_with_brute_force() {
        for (n, p) in [(1, 5), (1, 7), (1, 6)] {
            let params = validate_params(n, p).unwrap();
            for c in 0..params.colors() {
                for k in -2..=3 {
                    for num in -300..300 {
                        let x = num as f64 / 97.0;
                        let got = nearest_in_level(&params, c, k, &[x]).unwrap();
                        let exact = BigRational::from_float(x).unwrap();
                        let y = pattern_coordinate(&params, c, k, &exact);
                        let around = y.floor().to_integer().to_i128().unwrap();
                        assert_eq!(got.gamma[0], brute_nearest(&params, c, k, &exact, around));
                    }
                }
            }
        }
    }

    #[test]
    fn locate_inverts_realize() {
        let params = validate_params(2, 7).unwrap();
        for c in 0..3 {
            for k in -2..=4 {
                for g in [[0, 0], [5, -3], [-40, 17]] {
                    let cube = CubeId::new(c, k, g.to_vec());
                    let center = realize(&params, &cube).center();
                    assert_eq!(locate(&params, c, k, &center).unwrap(), Some(cube));
                }
            }
        }
    }

    #[test]
    fn same_level_cubes_are_separated() {
        let params = validate_params(1, 5).unwrap();
        for k in -2..=3 {
            let min_gap = (BigRational::one() - params.a()) * params.lambda_pow(k);
            assert_eq!(min_gap, r(2, 1) * params.lambda_pow(k + 1));
            for g in -4..4 {
                let gap = box_gap_sq(&realize(&params, &id(0, k, g)), &realize(&params, &id(0, k, g + 1)))
                    .unwrap();
                assert_eq!(gap, &min_gap * &min_gap);
            }
        }
    }

    #[test]
    fn separation_examples() {
        let params = validate_params(1, 5).unwrap();
        let v = separation_verdict(&params, &id(0, 0, 0), &id(0, 1, 0)).unwrap();
        assert_eq!((v.kind, v.witness.clone()), (SeparationKind::NestedDeep, r(1, 25)));
        let v = separation_verdict(&params, &id(0, -1, 0), &id(0, 0, 0)).unwrap();
        assert_eq!((v.kind, v.witness.clone()), (SeparationKind::NestedDeep, r(1, 5)));
        let v = separation_verdict(&params, &id(0, 0, 0), &id(0, 1, 3)).unwrap();
        assert_eq!(v.kind, SeparationKind::DisjointFar);
        assert_eq!(v.witness, r(1, 625));
    }

    #[test]
    fn separation_errors() {
        let params = validate_params(1, 5).unwrap();
        assert!(matches!(
            separation_verdict(&params, &id(0, 0, 0), &id(1, 1, 0)),
            Err(Error::ColorMismatch { .. })
        ));
        assert!(matches!(
            separation_verdict(&params, &id(0, 1, 0), &id(0, 1, 0)),
            Err(Error::LevelOrder { low: 1, high: 1 })
        ));
    }

    #[test]
    fn separation_fails_off_the_self_similar_parameters() {
        // (n, p) = (2, 8): the color-1 level-1 cube with γ = (0, 0) straddles
        // the boundary of the level-0 cube that contains its lower corner.
        let params = validate_params(2, 8).unwrap();
        assert!(!params.colors_self_similar());
        let high = CubeId::new(1, 1, vec![0, 0]);
        let low = locate(&params, 1, 0, realize(&params, &high).lo())
            .unwrap()
            .expect("lower corner is covered");
        let v = separation_verdict(&params, &low, &high).unwrap();
        assert_eq!(v.kind, SeparationKind::Violation);
        // color 0 is unaffected
        let v = separation_verdict(&params, &CubeId::new(0, 0, vec![0, 0]), &CubeId::new(0, 1, vec![0, 0]))
            .unwrap();
        assert_ne!(v.kind, SeparationKind::Violation);
    }

    #[test]
    fn covering_examples() {
        let params = validate_params(1, 5).unwrap();
        let report = verify_covering_level0(&params).unwrap();
        assert!(report.covered);
        assert_eq!(report.cells_total, 10);
        assert_eq!(report.grid_step, "1/10");

        let single = verify_covering_level0_with(&params, &[0], DEFAULT_CELL_BUDGET).unwrap();
        assert!(!single.covered);
        assert_eq!(single.cells_uncovered, 4);
        for w in &single.witnesses {
            let x: BigRational = w[0].parse().unwrap();
            // on the torus the uncovered set is (4/5, 6/5) mod 1
            let lifted = if x < r(1, 2) { x + r(1, 1) } else { x };
            assert!(lifted > r(4, 5) && lifted < r(6, 5), "{lifted}");
        }

        let params = validate_params(2, 7).unwrap();
        let report = verify_covering_level0(&params).unwrap();
        assert!(report.covered);
        assert_eq!(report.cells_total, 441);
    }

    #[test]
    fn covering_interval_union_oracle() {
        // Color 0 covers [1/5, 4/5]; color 1 covers [0, 3/10] ∪ [7/10, 1].
        let params = validate_params(1, 5).unwrap();
        for i in 0..1000 {
            let x = r(2 * i + 1, 2000);
            let in_union = (x >= r(1, 5) && x <= r(4, 5)) || x <= r(3, 10) || x >= r(7, 10);
            let located = (0..2).any(|c| locate(&params, c, 0, std::slice::from_ref(&x)).unwrap().is_some());
            assert_eq!(in_union, located);
            assert!(in_union);
        }
    }

    #[test]
    fn covering_budget() {
        let params = validate_params(3, 9).unwrap();
        assert!(matches!(
            verify_covering_level0_with(&params, &[0, 1, 2, 3], 1000),
            Err(Error::ResourceLimit { requested: 46656, .. })
        ));
    }

    #[test]
    fn cube_id_text_form() {
        let cube: CubeId = "0,-1,3,-4".parse().unwrap();
        assert_eq!(cube, CubeId::new(0, -1, vec![3, -4]));
        assert_eq!(cube.to_string(), "0,-1,3,-4");
        assert_eq!(cube.node_name(), "0_-1_3_-4");
        assert!("0,1".parse::<CubeId>().is_err());
        assert!("a,1,2".parse::<CubeId>().is_err());
    }

    #[test]
    fn random_separation_check() {
        let params = validate_params(1, 5).unwrap();
        let check = separation_check(&params, 2000, 1, -3, 4).unwrap();
        assert_eq!(check.violations, 0);
        assert_eq!(check.disjoint_far + check.nested_deep, 2000);
        assert!(check.disjoint_far > 200 && check.nested_deep > 200, "{check:?}");
        let bad = validate_params(1, 6).unwrap();
        let check = separation_check(&bad, 2000, 1, -3, 4).unwrap();
        assert!(check.violations > 0);
        assert!(!check.witnesses.is_empty() && check.witnesses.len() <= MAX_WITNESSES);
        assert!(separation_check(&params, 1, 1, 2, 2).is_err());
    }
}
