//! Numerically stable evaluation of the basis kernels.
//!
//! Unit side: `P_{n,k}(x) = C(n+k, k) x^k (1-x)^{n+1}` on `[0, 1)`.
//! Ray side: `𝒫_{n,k}(ξ) = C(n+k-1, k) ξ^k (1+ξ)^{-n-k}` on `[0, ∞)`.
//!
//! The spectral factor `T_{n,k}` satisfies `ψ 𝒫_{n,k}'' = T_{n,k} 𝒫_{n,k}`;
//! its rational form has a `1/ξ` pole for `k ≥ 2` that cancels against the
//! `ξ^k` of the basis. All products of `T` powers with the basis are
//! therefore computed *fused*: a common factor `ξ^{k-m} (1+ξ)^{m-n-k}` is
//! split off in log space and the remaining polynomial bracket in
//! `ρ = ξ/(1+ξ)` is evaluated directly. The fused products are finite and
//! exact at `ξ = 0`.
//!
//! Binomials use exact integer arithmetic while `n + k ≤ 30` and
//! exponentials of log-gamma sums beyond, so no intermediate overflows.

use crate::domain::{psi, RayPoint, UnitPoint};
use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Pair `(n, k)` addressing one basis function.
///
/// `n ≥ 1` is the operator order. A negative `k` denotes the zero function:
/// every evaluator returns exactly `0` for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    pub n: u32,
    pub k: i64,
}

impl BasisIndex {
    pub fn new(n: u32, k: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(BasisIndex { n, k })
    }
}

/// Orders with `n + k` at or below this use exact small-case arithmetic;
/// larger ones go through log space. The two regimes are cross-checked in
/// the tests on the overlap.
const LOG_SPACE_THRESHOLD: u64 = 30;

/// Exact `C(a, b)` for small arguments via integer arithmetic.
fn binomial_exact(a: u64, b: u64) -> f64 {
    debug_assert!(b <= a);
    let b = b.min(a - b);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=b as u128 {
        num *= (a as u128) - (b as u128) + i;
        den *= i;
    }
    (num / den) as f64
}

/// `ln C(a, b)` through log-gamma.
fn ln_binomial(a: u64, b: u64) -> f64 {
    debug_assert!(b <= a);
    ln_gamma(a as f64 + 1.0) - ln_gamma(b as f64 + 1.0) - ln_gamma((a - b) as f64 + 1.0)
}

/// `ln 𝒫_{n,k}(ξ)` for `ξ > 0`, `k ≥ 0`.
#[inline]
pub(crate) fn ln_baskakov(n: u32, k: u64, xi: f64) -> f64 {
    let nn = n as u64;
    ln_binomial(nn + k - 1, k) + k as f64 * xi.ln() - (nn + k) as f64 * xi.ln_1p()
}

/// `ln P_{n,k}(x)` for `0 < x < 1`, `k ≥ 0`.
#[inline]
pub(crate) fn ln_mkz(n: u32, k: u64, x: f64) -> f64 {
    let nn = n as u64;
    ln_binomial(nn + k, k) + k as f64 * x.ln() + (nn + 1) as f64 * (-x).ln_1p()
}

/// MKZ basis `P_{n,k}(x) = C(n+k, k) x^k (1-x)^{n+1}`. Lies in `[0, 1]`.
pub fn mkz_basis(idx: BasisIndex, x: UnitPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, x) = (idx.n, idx.k as u64, x.get());
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if n as u64 + k <= LOG_SPACE_THRESHOLD {
        binomial_exact(n as u64 + k, k) * x.powi(k as i32) * (1.0 - x).powi(n as i32 + 1)
    } else {
        ln_mkz(n, k, x).exp()
    }
}

/// Baskakov basis `𝒫_{n,k}(ξ) = C(n+k-1, k) ξ^k (1+ξ)^{-n-k}`.
pub fn baskakov_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, xi) = (idx.n, idx.k as u64, p.get());
    if xi == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if n as u64 + k <= LOG_SPACE_THRESHOLD {
        binomial_exact(n as u64 + k - 1, k)
            * xi.powi(k as i32)
            * (1.0 + xi).powi(-(n as i32 + k as i32))
    } else {
        ln_baskakov(n, k, xi).exp()
    }
}

/// The two re-indexing identities `k 𝒫_{n,k} = n ξ 𝒫_{n+1,k-1}` and
/// `(n+k) 𝒫_{n,k} = n (1+ξ) 𝒫_{n+1,k}`, returned as their right-hand sides
/// `(n ξ 𝒫_{n+1,k-1}, n (1+ξ) 𝒫_{n+1,k})`.
pub fn baskakov_recurrences(idx: BasisIndex, p: RayPoint) -> (f64, f64) {
    let n = idx.n as f64;
    let xi = p.get();
    let up = BasisIndex {
        n: idx.n + 1,
        k: idx.k - 1,
    };
    let same = BasisIndex {
        n: idx.n + 1,
        k: idx.k,
    };
    (
        n * xi * baskakov_basis(up, p),
        n * (1.0 + xi) * baskakov_basis(same, p),
    )
}

/// Quadratic bracket of the spectral factor in `ρ = ξ/(1+ξ)`:
/// `T_{n,k} = bracket · (1+ξ)/ξ` with
/// `bracket = k(k-1) - 2k(n+k) ρ + (n+k)(n+k+1) ρ²`.
#[inline]
fn ray_bracket(n: f64, k: f64, rho: f64) -> f64 {
    k * (k - 1.0) - 2.0 * k * (n + k) * rho + (n + k) * (n + k + 1.0) * rho * rho
}

/// Spectral factor `T_{n,k}(ξ)`, rational form (the computational default):
/// `k(k-1)(1+ξ)/ξ - 2k(n+k) + (n+k)(n+k+1) ξ/(1+ξ)`.
///
/// Singular at the origin for `k ≥ 2`; use [`t_times_basis`] in series
/// contexts, where the pole cancels.
pub fn t_factor(idx: BasisIndex, p: RayPoint) -> Result<f64> {
    if idx.k < 0 {
        return Ok(0.0);
    }
    let (n, k, xi) = (idx.n as f64, idx.k as f64, p.get());
    if xi == 0.0 {
        return match idx.k {
            0 => Ok(0.0),
            1 => Ok(-2.0 * (n + 1.0)),
            _ => Err(Error::SingularAtOrigin { k: idx.k }),
        };
    }
    Ok(k * (k - 1.0) * (1.0 + xi) / xi - 2.0 * k * (n + k)
        + (n + k) * (n + k + 1.0) * xi / (1.0 + xi))
}

/// Spectral factor in central-moment form, used as a cross-check of
/// [`t_factor`]:
/// `n [ -1 - (1+2ξ)(k/n - ξ)/ψ + n (k/n - ξ)²/ψ ]`. Requires `ξ > 0`.
pub fn t_factor_central(idx: BasisIndex, p: RayPoint) -> Result<f64> {
    if idx.k < 0 {
        return Ok(0.0);
    }
    let xi = p.get();
    if xi == 0.0 {
        return Err(Error::SingularAtOrigin { k: idx.k });
    }
    let n = idx.n as f64;
    let d = idx.k as f64 / n - xi;
    let w = psi(xi);
    Ok(n * (-1.0 - (1.0 + 2.0 * xi) * d / w + n * d * d / w))
}

/// First derivative `T'_{n,k}(ξ) = -k(k-1)/ξ² + (n+k)(n+k+1)/(1+ξ)²`.
pub fn t_factor_d1(idx: BasisIndex, p: RayPoint) -> Result<f64> {
    if idx.k < 0 {
        return Ok(0.0);
    }
    let (n, k, xi) = (idx.n as f64, idx.k as f64, p.get());
    if xi == 0.0 && idx.k >= 2 {
        return Err(Error::SingularAtOrigin { k: idx.k });
    }
    let pole = if idx.k >= 2 { -k * (k - 1.0) / (xi * xi) } else { 0.0 };
    Ok(pole + (n + k) * (n + k + 1.0) / ((1.0 + xi) * (1.0 + xi)))
}

/// Second derivative `T''_{n,k}(ξ) = 2k(k-1)/ξ³ - 2(n+k)(n+k+1)/(1+ξ)³`.
pub fn t_factor_d2(idx: BasisIndex, p: RayPoint) -> Result<f64> {
    if idx.k < 0 {
        return Ok(0.0);
    }
    let (n, k, xi) = (idx.n as f64, idx.k as f64, p.get());
    if xi == 0.0 && idx.k >= 2 {
        return Err(Error::SingularAtOrigin { k: idx.k });
    }
    let pole = if idx.k >= 2 { 2.0 * k * (k - 1.0) / (xi * xi * xi) } else { 0.0 };
    Ok(pole - 2.0 * (n + k) * (n + k + 1.0) / (1.0 + xi).powi(3))
}

/// Common log-space factor `C(n+k-1, k) ξ^{k-m} (1+ξ)^{m-n-k}` of the fused
/// `T^m 𝒫` products, for `ξ > 0`.
#[inline]
fn fused_base(n: u32, k: u64, xi: f64, m: i32) -> f64 {
    let nn = n as u64;
    (ln_binomial(nn + k - 1, k)
        + (k as f64 - m as f64) * xi.ln()
        + (m as f64 - (nn + k) as f64) * xi.ln_1p())
    .exp()
}

/// Fused product `T_{n,k}(ξ) · 𝒫_{n,k}(ξ)`, finite on all of `[0, ∞)`;
/// equals `𝒟̃ 𝒫_{n,k}(ξ) = ψ(ξ) 𝒫''_{n,k}(ξ)`.
pub fn t_times_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, xi) = (idx.n, idx.k as u64, p.get());
    if xi == 0.0 {
        // Every term carries a surviving power of ξ: the k(k-1)/ξ pole is
        // absorbed into ξ^{k-1}, which vanishes unless k = 1, where the
        // k(k-1) coefficient vanishes instead.
        return 0.0;
    }
    let rho = xi / (1.0 + xi);
    fused_base(n, k, xi, 1) * ray_bracket(n as f64, k as f64, rho)
}

/// Fused product `T²_{n,k}(ξ) · 𝒫_{n,k}(ξ)`, finite on `[0, ∞)`.
pub fn t_sq_times_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, xi) = (idx.n, idx.k as u64, p.get());
    if xi == 0.0 {
        // ξ^{k-2} survives only at k = 2, with bracket (k(k-1))² = 4.
        return if k == 2 {
            2.0 * idx.n as f64 * (idx.n as f64 + 1.0)
        } else {
            0.0
        };
    }
    let rho = xi / (1.0 + xi);
    let b = ray_bracket(n as f64, k as f64, rho);
    fused_base(n, k, xi, 2) * b * b
}

/// Fused product `ψ(ξ) T''_{n,k}(ξ) · 𝒫_{n,k}(ξ)`, finite on `[0, ∞)`:
/// `ξ^{k-2} (1+ξ)^{1-n-k} C(n+k-1,k) · 2[k(k-1) - (n+k)(n+k+1) ρ³]`.
pub fn psi_tpp_times_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, xi) = (idx.n, idx.k as u64, p.get());
    if xi == 0.0 {
        return if k == 2 {
            4.0 * binomial_exact(idx.n as u64 + 1, 2)
        } else {
            0.0
        };
    }
    let nf = n as f64;
    let kf = k as f64;
    let rho = xi / (1.0 + xi);
    // Base here is C(n+k-1,k) ξ^{k-2} (1+ξ)^{1-n-k}.
    fused_base(n, k, xi, 2) / (1.0 + xi)
        * 2.0
        * (kf * (kf - 1.0) - (nf + kf) * (nf + kf + 1.0) * rho * rho * rho)
}

/// Modified Baskakov basis `𝒫̃_{n,k} = (1 - T_{n,k}/n) 𝒫_{n,k}`.
///
/// Not pointwise nonnegative: the factor `1 - T/n` changes sign.
pub fn modified_baskakov_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    baskakov_basis(idx, p) - t_times_basis(idx, p) / idx.n as f64
}

/// `𝒟̃ 𝒫̃_{n,k}(ξ)`: the weighted second derivative of the modified basis,
/// as the three-term expansion with every `T·𝒫` product fused:
/// `(ψ/n) T'' 𝒫 + 2[T_{n+1,k-1} 𝒫_{n+1,k-1} + T_{n+1,k} 𝒫_{n+1,k}]
///  + (1 - T/n) T 𝒫`.
pub fn dtilde_modified_baskakov_basis(idx: BasisIndex, p: RayPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let n = idx.n as f64;
    let shift_down = BasisIndex {
        n: idx.n + 1,
        k: idx.k - 1,
    };
    let shift_same = BasisIndex {
        n: idx.n + 1,
        k: idx.k,
    };
    psi_tpp_times_basis(idx, p) / n
        + 2.0 * (t_times_basis(shift_down, p) + t_times_basis(shift_same, p))
        + t_times_basis(idx, p)
        - t_sq_times_basis(idx, p) / n
}

/// Unit-side quadratic bracket:
/// `φ P''_{n,k} = P_{n,k}/x · [k(k-1)(1-x)² - 2k(n+1)x(1-x) + n(n+1)x²]`.
#[inline]
fn unit_bracket(n: f64, k: f64, x: f64) -> f64 {
    let om = 1.0 - x;
    k * (k - 1.0) * om * om - 2.0 * k * (n + 1.0) * x * om + n * (n + 1.0) * x * x
}

/// `D̃ P_{n,k}(x) = φ(x) P''_{n,k}(x)`, fused so the `1/x` pole cancels.
pub fn dtilde_mkz_basis(idx: BasisIndex, x: UnitPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    let (n, k, xv) = (idx.n, idx.k as u64, x.get());
    if xv == 0.0 {
        // x^{k-1} survives only at k = 1, where the k(k-1) coefficient and
        // the remaining bracket terms all vanish at x = 0.
        return 0.0;
    }
    let base = if n as u64 + k <= LOG_SPACE_THRESHOLD {
        binomial_exact(n as u64 + k, k) * xv.powi(k as i32 - 1) * (1.0 - xv).powi(n as i32 + 1)
    } else {
        (ln_mkz(n, k, xv) - xv.ln()).exp()
    };
    base * unit_bracket(n as f64, k as f64, xv)
}

/// Modified MKZ basis `P̃_{n,k} = P_{n,k} - (1/n) D̃ P_{n,k}`.
pub fn modified_mkz_basis(idx: BasisIndex, x: UnitPoint) -> f64 {
    if idx.k < 0 {
        return 0.0;
    }
    mkz_basis(idx, x) - dtilde_mkz_basis(idx, x) / idx.n as f64
}
