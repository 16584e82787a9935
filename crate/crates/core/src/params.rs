//! Construction parameters and the exact constants derived from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated parameters `(n, p)` of the construction.
///
/// `n` is the dimension of the horospheres (the embedded space is
/// `H^{n+1}`), `p` the subdivision factor. Every derived constant is exact
/// except `sigma = ln p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    n: usize,
    p: u32,
    a: BigRational,
    lambda: BigRational,
    nu: Vec<BigRational>,
    eta0: Vec<BigRational>,
    sigma: f64,
}

/// Compact `(n, p)` form used in serialized reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsSpec {
    pub n: usize,
    pub p: u32,
}

pub fn validate_params(n: usize, p: u32) -> Result<Params> {
    if n == 0 {
        return Err(Error::InvalidParams {
            constraint: "n >= 1".into(),
        });
    }
    if p < 2 {
        return Err(Error::InvalidParams {
            constraint: "p >= 2".into(),
        });
    }
    let n_plus_1 = BigInt::from(n as u64 + 1);
    let pb = BigInt::from(p);
    let lhs = BigRational::new(BigInt::one(), &pb - 1) + BigRational::new(BigInt::one(), pb.clone());
    let rhs = BigRational::new(BigInt::one(), n_plus_1.clone());
    if lhs >= rhs {
        return Err(Error::InvalidParams {
            constraint: format!(
                "1/(p-1) + 1/p < 1/(n+1) fails for n={n}, p={p}: {lhs} >= {rhs}"
            ),
        });
    }

    let lambda = BigRational::new(BigInt::one(), pb.clone());
    let a = BigRational::one() - BigRational::new(BigInt::from(2), pb.clone());
    let nu_i = BigRational::new(BigInt::one(), n_plus_1);
    let eta0_i = BigRational::new(BigInt::one(), &pb - 1);
    Ok(Params {
        n,
        p,
        a,
        lambda,
        nu: vec![nu_i; n],
        eta0: vec![eta0_i; n],
        sigma: f64::from(p).ln(),
    })
}

impl Params {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of colors, `|C| = n + 1`.
    pub fn colors(&self) -> usize {
        self.n + 1
    }

    /// Side length of the template cube `A`.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Contraction ratio `1/p` between consecutive levels.
    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    /// Color shift `θ/(n+1)`.
    pub fn nu(&self) -> &[BigRational] {
        &self.nu
    }

    /// Fixed point `θ/(p-1)` of the expansion `H`.
    pub fn eta0(&self) -> &[BigRational] {
        &self.eta0
    }

    /// `ln p`; the curvature of the model space is `-sigma^2`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn spec(&self) -> ParamsSpec {
        ParamsSpec {
            n: self.n,
            p: self.p,
        }
    }

    /// `p` as an exact rational.
    pub fn p_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.p))
    }

    /// `p^k` for any integer `k`, exact.
    pub fn p_pow(&self, k: i64) -> BigRational {
        let base = BigInt::from(self.p);
        let mag = num_traits::pow(base, k.unsigned_abs() as usize);
        if k >= 0 {
            BigRational::from_integer(mag)
        } else {
            BigRational::new(BigInt::one(), mag)
        }
    }

    /// `λ^k = p^{-k}`.
    pub fn lambda_pow(&self, k: i64) -> BigRational {
        self.p_pow(-k)
    }

    /// Per-axis shift `c/(n+1)` of color `c`.
    pub fn color_shift(&self, c: usize) -> BigRational {
        BigRational::new(BigInt::from(c as u64), BigInt::from(self.n as u64 + 1))
    }

    /// The expansion `H(x) = p(x - η)` with `η = θ/p`.
    pub fn expand(&self, x: &[BigRational]) -> Vec<BigRational> {
        let p = self.p_rational();
        x.iter()
            .map(|xi| &p * (xi - &self.lambda))
            .collect()
    }

    /// Inverse of [`Params::expand`]: `x/p + η`.
    pub fn contract(&self, x: &[BigRational]) -> Vec<BigRational> {
        let p = self.p_rational();
        x.iter().map(|xi| xi / &p + &self.lambda).collect()
    }

    /// Whether each colored pattern is mapped into itself by the level
    /// contraction, i.e. `(n+1) | (p-1)`.
    ///
    /// Only then do colors other than 0 inherit the separation property of
    /// color 0. For example `(n, p) = (2, 8)` passes the parameter gate but
    /// color 1 has level-1 cubes straddling level-0 boundaries.
    pub fn colors_self_similar(&self) -> bool {
        (self.p as usize - 1).is_multiple_of(self.n + 1)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            })
        }
    }
}
