//! The weighted differential operators, central moments, the spectral-sum
//! identities, and the tail sums driving the Voronovskaya bound.
//!
//! `D̃f = φ f''` on the unit side and `𝒟̃F = ψ F''` on the ray side, with
//! powers defined by composition. The tail sums are
//! `λ(n) = Σ_{k≥n} 1/(k(k+1)²)` and `θ(n) = Σ_{k≥n} 1/(k²(k+1)²)`; both
//! reduce by partial fractions to `S₂(n) = Σ_{j>n} 1/j²`:
//! `λ(n) = 1/n - S₂(n)` and `θ(n) = S₂(n-1) + S₂(n) - 2/n`.

use crate::basis::{t_sq_times_basis, BasisIndex};
use crate::domain::{phi, psi, Domain, RayPoint};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::series::{baskakov_profile, sum_profile, truncation_window, TruncationPolicy};

/// Whether a derivative came from an analytic closure or pure finite
/// differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivSource {
    Analytic,
    FiniteDifference,
}

/// Step for centered second differences away from the endpoints.
fn fd_step(x: f64) -> f64 {
    (f64::EPSILON.sqrt() * (1.0 + x.abs())).max(1e-5)
}

fn second_difference(f: &RealFunction, x: f64) -> Result<f64> {
    let h = fd_step(x);
    let lo_ok = match f.domain() {
        Domain::Unit => x - h > 0.0 && x + h < 1.0,
        Domain::Ray => x - h > 0.0,
    };
    if !lo_ok {
        return Err(Error::EndpointDerivative { x });
    }
    Ok((f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h))
}

/// `D̃f(x) = φ(x) f''(x)` (unit) or `𝒟̃F(ξ) = ψ(ξ) F''(ξ)` (ray).
/// Analytic second derivatives are preferred; otherwise a centered
/// difference is used at interior points.
pub fn dtilde(f: &RealFunction, x: f64) -> Result<f64> {
    let weight = match f.domain() {
        Domain::Unit => phi(x),
        Domain::Ray => psi(x),
    };
    if let Some(d2) = f.d2(x) {
        return Ok(weight * d2);
    }
    if let Some(dt) = f.dtilde_analytic() {
        return Ok(dt.eval(x));
    }
    if weight == 0.0 {
        // φ and ψ vanish at the origin (and φ at 1); the endpoint value of
        // D̃f is 0 for any f with bounded second differences there.
        return Ok(0.0);
    }
    Ok(weight * second_difference(f, x)?)
}

/// `m`-fold application of the weighted second derivative, `m ∈ {1,2,3}`.
///
/// Analytic chain links (or analytic second derivatives at the last level)
/// are consumed while available; remaining levels fall back to nested
/// fourth-order differences with a widening step ladder, and the result is
/// flagged as numeric. Each purely numeric level costs roughly three
/// digits; depth-3 all-numeric values are order-of-magnitude only.
pub fn dtilde_power(f: &RealFunction, m: u32, x: f64) -> Result<(f64, DerivSource)> {
    assert!((1..=3).contains(&m), "dtilde_power supports m in 1..=3");
    let mut current = f.clone();
    let mut level = 0;
    while level < m {
        if let Some(next) = current.dtilde_analytic() {
            current = next.clone();
            level += 1;
        } else {
            break;
        }
    }
    if level == m {
        return Ok((current.eval(x), DerivSource::Analytic));
    }
    // `depth = 0` already applies the operator once.
    let (val, used_fd) = dtilde_fd_level(&current, m - level - 1, x)?;
    let source = if used_fd {
        DerivSource::FiniteDifference
    } else {
        DerivSource::Analytic
    };
    Ok((val, source))
}

/// Fourth-order five-point second difference.
fn second_diff4(f: &mut dyn FnMut(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok(
        (-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)?
            - f(x - 2.0 * h)?)
            / (12.0 * h * h),
    )
}

fn dtilde_fd_level(f: &RealFunction, depth: u32, x: f64) -> Result<(f64, bool)> {
    let weight = match f.domain() {
        Domain::Unit => phi as fn(f64) -> f64,
        Domain::Ray => psi as fn(f64) -> f64,
    };
    if depth == 0 {
        if let Some(d2) = f.d2(x) {
            return Ok((weight(x) * d2, false));
        }
        if let Some(dt) = f.dtilde_analytic() {
            return Ok((dt.eval(x), false));
        }
        let h = 1e-3;
        if x - 2.0 * h <= 0.0 || (f.domain() == Domain::Unit && x + 2.0 * h >= 1.0) {
            return Err(Error::EndpointDerivative { x });
        }
        let v = second_diff4(&mut |y| Ok(f.eval(y)), x, h)?;
        return Ok((weight(x) * v, true));
    }
    // The outer steps widen so each level's cancellation noise is absorbed
    // by the next one.
    let h = if depth == 1 { 8e-3 } else { 2.5e-2 };
    let mut used = false;
    let v = second_diff4(
        &mut |y| {
            let (val, fd) = dtilde_fd_level(f, depth - 1, y)?;
            used |= fd;
            Ok(val)
        },
        x,
        h,
    )?;
    Ok((weight(x) * v, used))
}

/// Closed-form central moment `μ_{n,j}(ξ) = Σ (k/n - ξ)^j 𝒫_{n,k}(ξ)` for
/// `j ≤ 3`: `1, 0, ψ/n, (1+2ξ)ψ/n²`.
pub fn central_moment(n: u32, j: u32, p: RayPoint) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let xi = p.get();
    Ok(match j {
        0 => 1.0,
        1 => 0.0,
        2 => psi(xi) / n as f64,
        3 => (1.0 + 2.0 * xi) * psi(xi) / (n as f64 * n as f64),
        _ => {
            return Err(Error::InvalidConfig(
                "closed-form central moments cover j <= 3".into(),
            ))
        }
    })
}

/// Truncated-series evaluation of `μ_{n,j}(ξ)` for `j ≤ 6`, the
/// cross-check of [`central_moment`].
pub fn central_moment_series(n: u32, j: u32, p: RayPoint, trunc: &TruncationPolicy) -> Result<f64> {
    if j > 6 {
        return Err(Error::InvalidConfig(
            "series central moments cover j <= 6".into(),
        ));
    }
    let xi = p.get();
    // |k/n - ξ|^j ≤ (1+k)^j (1/n + ξ)^j.
    let tr = trunc
        .with_degree(j as u8)
        .tightened((1.0 / n as f64 + xi).powi(j as i32));
    let window = truncation_window(n, p, &tr)?;
    let prof = baskakov_profile(n, xi, *window.end());
    let nf = n as f64;
    Ok(sum_profile(&prof, |k, b| {
        (k as f64 / nf - xi).powi(j as i32) * b
    }))
}

/// The spectral quadratic sum `Φ_n(α) = Σ (α - T_{n,k}/n)² 𝒫_{n,k}(ξ)`,
/// returned as `(series value, closed form α² + 2 + 2/n)`.
pub fn phi_alpha(n: u32, alpha: f64, p: RayPoint, trunc: &TruncationPolicy) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let closed = alpha * alpha + 2.0 + 2.0 / n as f64;
    let nf = n as f64;
    // Termwise: α²𝒫 - (2α/n) T𝒫 + (1/n²) T²𝒫, each product fused.
    let series: f64 = if p.get() == 0.0 {
        let t2 = t_sq_times_basis(BasisIndex::new(n, 2)?, p);
        alpha * alpha + t2 / (nf * nf)
    } else {
        // (α - T/n)² ≤ 2α² + 2(1+k)⁴ c²/n² with c the bracket bound.
        let c = crate::series::ray_bracket_bound(n, p.get());
        let tr = trunc
            .with_degree(4)
            .tightened(1.0 + 2.0 * alpha * alpha + 2.0 * c * c / (nf * nf));
        let window = truncation_window(n, p, &tr)?;
        let prof = baskakov_profile(n, p.get(), *window.end());
        let xi = p.get();
        let rho = xi / (1.0 + xi);
        sum_profile(&prof, |k, b| {
            if b == 0.0 {
                return 0.0;
            }
            let kf = k as f64;
            let bracket = kf * (kf - 1.0) - 2.0 * kf * (nf + kf) * rho
                + (nf + kf) * (nf + kf + 1.0) * rho * rho;
            let t_over_n = bracket * (1.0 + xi) / (xi * nf);
            let d = alpha - t_over_n;
            d * d * b
        })
    };
    Ok((series, closed))
}

/// The vanishing first `T`-weighted moment
/// `Σ T_{n,k}(ξ) (k/n - ξ) 𝒫_{n,k}(ξ)`, evaluated with fused products.
pub fn t_weighted_first_moment(n: u32, p: RayPoint, trunc: &TruncationPolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let xi = p.get();
    if xi == 0.0 {
        // Every fused T·𝒫 term vanishes at the origin.
        return Ok(0.0);
    }
    // |T (k/n - ξ)| ≤ (1+k)³ c (1/n + ξ).
    let c = crate::series::ray_bracket_bound(n, xi);
    let tr = trunc
        .with_degree(3)
        .tightened(c * (1.0 / n as f64 + xi) + 1.0);
    let window = truncation_window(n, p, &tr)?;
    let prof = baskakov_profile(n, xi, *window.end());
    let nf = n as f64;
    let rho = xi / (1.0 + xi);
    Ok(sum_profile(&prof, |k, b| {
        if b == 0.0 {
            return 0.0;
        }
        let kf = k as f64;
        let bracket = kf * (kf - 1.0) - 2.0 * kf * (nf + kf) * rho
            + (nf + kf) * (nf + kf + 1.0) * rho * rho;
        (kf / nf - xi) * bracket * (1.0 + xi) / xi * b
    }))
}

/// Tail sums `λ(n)` and `θ(n)` with their proven bracketing bounds.
#[derive(Debug, Clone, Copy)]
pub struct TailSums {
    pub n: u32,
    /// `Σ_{k≥n} 1/(k(k+1)²)`, inside `[1/(3n²), 1/n²]` for `n ≥ 2`.
    pub lambda: f64,
    /// `Σ_{k≥n} 1/(k²(k+1)²)`, at most `4/(9n³)` for `n ≥ 2`.
    pub theta: f64,
}

/// `S₂(n) = Σ_{j>n} 1/j²`: direct summation of the first 10⁵ terms
/// (smallest first) plus an Euler–Maclaurin remainder whose error is below
/// 10⁻³⁰ at that depth.
fn s2(n: u64) -> f64 {
    const DIRECT: u64 = 100_000;
    let cut = n + DIRECT;
    let mut sum = 0.0f64;
    for j in ((n + 1)..=cut).rev() {
        let jf = j as f64;
        sum += 1.0 / (jf * jf);
    }
    let m = cut as f64;
    sum + 1.0 / m - 1.0 / (2.0 * m * m) + 1.0 / (6.0 * m * m * m)
        - 1.0 / (30.0 * m * m * m * m * m)
}

/// Compute `λ(n)` and `θ(n)` for `n ≥ 2` and assert their bounds.
pub fn tail_sums(n: u32) -> Result<TailSums> {
    if n < 2 {
        return Err(Error::InvalidConfig("tail sums require n >= 2".into()));
    }
    let nf = n as f64;
    let lambda = 1.0 / nf - s2(n as u64);
    let theta = s2(n as u64 - 1) + s2(n as u64) - 2.0 / nf;
    let sums = TailSums { n, lambda, theta };
    debug_assert!(sums.bounds_hold(), "tail-sum bounds violated at n = {n}");
    Ok(sums)
}

impl TailSums {
    /// The bracketing bounds `1/(3n²) ≤ λ(n) ≤ 1/n²`, `θ(n) ≤ 4/(9n³)`.
    pub fn bounds_hold(&self) -> bool {
        let nf = self.n as f64;
        1.0 / (3.0 * nf * nf) <= self.lambda
            && self.lambda <= 1.0 / (nf * nf)
            && self.theta <= 4.0 / (9.0 * nf * nf * nf)
            && self.theta > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::lookup;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn rp(x: f64) -> RayPoint {
        RayPoint::new(x).unwrap()
    }

    #[test]
    fn dtilde_on_polynomials() {
        let e1 = lookup("e1").unwrap().func;
        assert_eq!(dtilde(&e1, 0.3).unwrap(), 0.0);
        let x2 = lookup("x2").unwrap().func;
        // 2 φ(0.5) = 0.25.
        assert_relative_eq!(dtilde(&x2, 0.5).unwrap(), 0.25, max_relative = 1e-14);
        let ray_sq = RealFunction::new("xi2", Domain::Ray, |t| t * t).with_d2(|_| 2.0);
        assert_relative_eq!(dtilde(&ray_sq, 1.0).unwrap(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn dtilde_power_chain_and_fd_agree() {
        let x2 = lookup("x2").unwrap().func;
        let (v1, s1) = dtilde_power(&x2, 2, 0.5).unwrap();
        assert_eq!(s1, DerivSource::Analytic);
        assert_relative_eq!(v1, -0.25, max_relative = 1e-13);
        let (v3, s3) = dtilde_power(&x2, 3, 0.5).unwrap();
        assert_eq!(s3, DerivSource::Analytic);
        assert_relative_eq!(v3, phi(0.5) * (144.0 * 0.25 - 96.0 + 56.0), max_relative = 1e-12);

        // Strip the chain and check the numeric fallback to ~1e-3.
        let bare = RealFunction::new("x2-bare", Domain::Unit, |x| x * x);
        let (nv, ns) = dtilde_power(&bare, 2, 0.5).unwrap();
        assert_eq!(ns, DerivSource::FiniteDifference);
        assert_relative_eq!(nv, -0.25, max_relative = 1e-3);
        let (nv3, _) = dtilde_power(&bare, 3, 0.5).unwrap();
        assert_relative_eq!(nv3, v3, max_relative = 2e-2);
    }

    #[test]
    fn central_moment_closed_forms() {
        assert_relative_eq!(central_moment(3, 2, rp(2.0)).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(central_moment(2, 3, rp(1.0)).unwrap(), 1.5, max_relative = 1e-14);
        assert_eq!(central_moment(7, 1, rp(4.2)).unwrap(), 0.0);
        assert_eq!(central_moment(7, 0, rp(4.2)).unwrap(), 1.0);
    }

    #[test]
    fn central_moment_series_cross_check() {
        let tr = TruncationPolicy::default();
        for &n in &[2u32, 5, 17, 100] {
            for &xi in &[0.0, 0.5, 1.0, 3.0, 10.0] {
                for j in 0..=3u32 {
                    let closed = central_moment(n, j, rp(xi)).unwrap();
                    let series = central_moment_series(n, j, rp(xi), &tr).unwrap();
                    assert_abs_diff_eq!(closed, series, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn phi_alpha_identity() {
        let tr = TruncationPolicy::default();
        assert_relative_eq!(phi_alpha(2, 1.0, rp(0.5), &tr).unwrap().1, 4.0);
        assert_relative_eq!(phi_alpha(2, 0.0, rp(0.5), &tr).unwrap().1, 3.0);
        let (series, closed) = phi_alpha(17, -2.0, rp(3.7), &tr).unwrap();
        assert_relative_eq!(closed, 4.0 + 2.0 + 2.0 / 17.0, max_relative = 1e-15);
        assert_abs_diff_eq!(series, closed, epsilon = 1e-7);
        // Origin case is exact termwise.
        let (s0, c0) = phi_alpha(5, 1.0, rp(0.0), &tr).unwrap();
        assert_abs_diff_eq!(s0, c0, epsilon = 1e-13);
    }

    #[test]
    fn t_weighted_moment_vanishes() {
        let tr = TruncationPolicy::default();
        assert_eq!(t_weighted_first_moment(2, rp(0.0), &tr).unwrap(), 0.0);
        assert!(t_weighted_first_moment(5, rp(1.0), &tr).unwrap().abs() <= 1e-7);
        assert!(t_weighted_first_moment(100, rp(10.0), &tr).unwrap().abs() <= 1e-6);
    }

    #[test]
    fn tail_sum_values_and_bounds() {
        // Frozen against high-precision summation of the defining series.
        let t2 = tail_sums(2).unwrap();
        assert_abs_diff_eq!(t2.lambda, 0.10506593315177356, epsilon = 1e-13);
        assert_abs_diff_eq!(t2.theta, 0.03986813369645287, epsilon = 1e-13);
        // Direct brute-force sums as an in-test oracle.
        let lam_direct: f64 = (2u64..2_000_000)
            .rev()
            .map(|k| {
                let kf = k as f64;
                1.0 / (kf * (kf + 1.0) * (kf + 1.0))
            })
            .sum();
        assert_abs_diff_eq!(t2.lambda, lam_direct, epsilon = 1e-10);

        let mut prev = tail_sums(2).unwrap();
        for n in 3..=1000u32 {
            let t = tail_sums(n).unwrap();
            assert!(t.bounds_hold(), "bounds fail at n = {n}");
            assert!(t.lambda < prev.lambda && t.theta < prev.theta);
            prev = t;
        }
        assert!(tail_sums(1).is_err());
        let t1000 = tail_sums(1000).unwrap();
        assert!(t1000.lambda >= 1.0 / 3e6 && t1000.lambda <= 1e-6);
    }
}
