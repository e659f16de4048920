//! Certified truncation of the infinite basis series.
//!
//! Both basis families have unimodal terms in `k` whose successive ratio
//! `t_{k+1}/t_k = ((a+k)/(k+1)) q` (with `a = n`, `q = ξ/(1+ξ)` on the ray
//! and `a = n+1`, `q = x` on the unit interval) decreases monotonically in
//! `k` towards `q < 1`. Past the mode `k* ≈ a q/(1-q)` the tail is therefore
//! dominated by a geometric series, and a polynomial multiplier
//! `(1+k)^d` only perturbs the ratio by the likewise-decreasing factor
//! `((k+2)/(k+1))^d`. The window search expands `K` outward from the mode
//! until `(K+2)^d · t_{K+1} / (1 - r) ≤ tail_tol` with `r` the term ratio at
//! the head of the tail, which certifies the neglected mass.
//!
//! Summation uses term profiles generated by the two-term recurrence,
//! anchored in log space at the mode so that no intermediate underflows
//! poison the bulk of the distribution.

use crate::basis::{ln_baskakov, ln_mkz};
use crate::domain::{RayPoint, UnitPoint};
use crate::error::{Error, Result};
use std::ops::RangeInclusive;

/// Controls for truncating infinite series.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    /// Absolute tolerance for the neglected series tail.
    pub tail_tol: f64,
    /// Hard cap on summed indices.
    pub max_terms: usize,
    /// Polynomial degree in `k` of the multiplier applied to the basis
    /// (0..=6), so tail bounds absorb factors like powers of the spectral
    /// bracket and linearly growing coefficients.
    pub growth_degree: u8,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_tol: 1e-12,
            max_terms: 2_000_000,
            growth_degree: 0,
        }
    }
}

impl TruncationPolicy {
    pub fn with_degree(self, growth_degree: u8) -> Self {
        TruncationPolicy {
            growth_degree,
            ..self
        }
    }

    /// Divide the tail tolerance by a bound on the non-polynomial part of
    /// the term multiplier (point- and order-dependent constants like the
    /// `1/ξ` of the fused spectral bracket). Floored so extreme points
    /// cannot underflow the tolerance to zero.
    pub fn tightened(self, factor: f64) -> Self {
        TruncationPolicy {
            tail_tol: (self.tail_tol / factor.max(1.0)).max(1e-300),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidConfig("tail_tol must be positive".into()));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be at least 1".into()));
        }
        if self.growth_degree > 6 {
            return Err(Error::InvalidConfig(
                "growth_degree must be at most 6".into(),
            ));
        }
        Ok(())
    }
}

/// Bound the unit-side curvature bracket: `|φ P''_{n,k}/P_{n,k}| ≤
/// (1+k)² · c` with `c = (1-x)²/x + 2(n+2) + (n+2)²`.
pub(crate) fn unit_bracket_bound(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    (1.0 - x) * (1.0 - x) / x + 2.0 * (nf + 2.0) + (nf + 2.0) * (nf + 2.0)
}

/// Bound the ray-side spectral factor: `|T_{n,k}| ≤ (1+k)² · c` with
/// `c = (1+ξ)/ξ + 2(n+2) + (n+2)²`.
pub(crate) fn ray_bracket_bound(n: u32, xi: f64) -> f64 {
    let nf = n as f64;
    (1.0 + xi) / xi + 2.0 * (nf + 2.0) + (nf + 2.0) * (nf + 2.0)
}

/// Series geometry shared by the two sides: term `k` carries
/// `C(a+k-1, k) q^k`-type mass with ratio `((a+k)/(k+1)) q`.
#[derive(Clone, Copy)]
struct SeriesShape {
    /// Effective order: `n` on the ray side, `n+1` on the unit side.
    a: f64,
    /// Geometric base: `ξ/(1+ξ)` on the ray side, `x` on the unit side.
    q: f64,
}

impl SeriesShape {
    /// `t_{k+1}/t_k` for the plain basis.
    #[inline]
    fn basis_ratio(&self, k: f64) -> f64 {
        (self.a + k) / (k + 1.0) * self.q
    }

    /// Index of the largest term (the crossing point of ratio 1).
    fn mode(&self) -> f64 {
        if self.q >= 1.0 {
            return f64::INFINITY;
        }
        ((self.a * self.q - 1.0) / (1.0 - self.q)).max(0.0)
    }
}

fn window_impl(
    shape: SeriesShape,
    ln_term: impl Fn(u64) -> f64,
    n: u32,
    point: f64,
    pol: &TruncationPolicy,
) -> Result<RangeInclusive<usize>> {
    pol.validate()?;
    let d = pol.growth_degree as i32;
    let mode = shape.mode();
    if mode + 1.0 > pol.max_terms as f64 {
        return Err(Error::TruncationFailure {
            n,
            point,
            tol: pol.tail_tol,
            cap: pol.max_terms,
        });
    }
    let mut k = mode.ceil() as u64 + 1;
    loop {
        // Ratio of weighted terms at the head of the tail; decreasing in k,
        // so it bounds every later ratio.
        let kf = k as f64;
        let r = shape.basis_ratio(kf + 1.0) * ((kf + 3.0) / (kf + 2.0)).powi(d);
        if r < 1.0 {
            let head = (kf + 2.0).powi(d) * ln_term(k + 1).exp();
            if head / (1.0 - r) <= pol.tail_tol {
                return Ok(0..=(k as usize));
            }
        }
        let step = (k / 8).max(1);
        k += step;
        if k as usize >= pol.max_terms {
            return Err(Error::TruncationFailure {
                n,
                point,
                tol: pol.tail_tol,
                cap: pol.max_terms,
            });
        }
    }
}

/// Window `[0, K]` with `Σ_{k>K} (1+k)^d 𝒫_{n,k}(ξ) ≤ tail_tol` (ray side).
pub fn truncation_window(n: u32, p: RayPoint, pol: &TruncationPolicy) -> Result<RangeInclusive<usize>> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let xi = p.get();
    if xi == 0.0 {
        pol.validate()?;
        return Ok(0..=0);
    }
    let shape = SeriesShape {
        a: n as f64,
        q: xi / (1.0 + xi),
    };
    window_impl(shape, |k| ln_baskakov(n, k, xi), n, xi, pol)
}

/// Window `[0, K]` with `Σ_{k>K} (1+k)^d P_{n,k}(x) ≤ tail_tol` (unit side).
pub fn truncation_window_unit(
    n: u32,
    x: UnitPoint,
    pol: &TruncationPolicy,
) -> Result<RangeInclusive<usize>> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let xv = x.get();
    if xv == 0.0 {
        pol.validate()?;
        return Ok(0..=0);
    }
    let shape = SeriesShape {
        a: n as f64 + 1.0,
        q: xv,
    };
    window_impl(shape, |k| ln_mkz(n, k, xv), n, xv, pol)
}

fn profile_impl(shape: SeriesShape, ln_term: impl Fn(u64) -> f64, k_hi: usize) -> Vec<f64> {
    let mut v = vec![0.0f64; k_hi + 1];
    let anchor = (shape.mode().floor().max(0.0) as usize).min(k_hi);
    v[anchor] = ln_term(anchor as u64).exp();
    for k in anchor..k_hi {
        v[k + 1] = v[k] * shape.basis_ratio(k as f64);
    }
    for k in (1..=anchor).rev() {
        // Inverse of basis_ratio(k-1); the down direction shrinks terms.
        v[k - 1] = v[k] * (k as f64) / ((shape.a + k as f64 - 1.0) * shape.q);
    }
    v
}

/// Values `𝒫_{n,k}(ξ)` for `k = 0..=k_hi`, generated by the anchored
/// two-term recurrence.
pub(crate) fn baskakov_profile(n: u32, xi: f64, k_hi: usize) -> Vec<f64> {
    if xi == 0.0 {
        let mut v = vec![0.0; k_hi + 1];
        v[0] = 1.0;
        return v;
    }
    let shape = SeriesShape {
        a: n as f64,
        q: xi / (1.0 + xi),
    };
    profile_impl(shape, |k| ln_baskakov(n, k, xi), k_hi)
}

/// Values `P_{n,k}(x)` for `k = 0..=k_hi`, anchored recurrence.
pub(crate) fn mkz_profile(n: u32, x: f64, k_hi: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; k_hi + 1];
        v[0] = 1.0;
        return v;
    }
    let shape = SeriesShape {
        a: n as f64 + 1.0,
        q: x,
    };
    profile_impl(shape, |k| ln_mkz(n, k, x), k_hi)
}

/// Neumaier-compensated sum of `term(k, basis_k)` over the window.
pub(crate) fn sum_profile(profile: &[f64], mut term: impl FnMut(usize, f64) -> f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (k, &b) in profile.iter().enumerate() {
        let t = term(k, b);
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{baskakov_basis, mkz_basis, BasisIndex};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rp(x: f64) -> RayPoint {
        RayPoint::new(x).unwrap()
    }

    #[test]
    fn window_at_origin_is_single_term() {
        let pol = TruncationPolicy::default();
        assert_eq!(truncation_window(5, rp(0.0), &pol).unwrap(), 0..=0);
        assert_eq!(
            truncation_window_unit(5, UnitPoint::new(0.0).unwrap(), &pol).unwrap(),
            0..=0
        );
    }

    #[test]
    fn window_tail_is_verified_by_oversummation() {
        let pol = TruncationPolicy {
            tail_tol: 1e-12,
            max_terms: 2_000_000,
            growth_degree: 0,
        };
        let k = *truncation_window(10, rp(1.0), &pol).unwrap().end();
        // Sum ten windows beyond the cut to measure the actual tail.
        let tail: f64 = ((k + 1)..=(10 * (k + 1)))
            .map(|j| baskakov_basis(BasisIndex::new(10, j as i64).unwrap(), rp(1.0)))
            .sum();
        assert!(tail < 1e-12, "actual tail {tail:e} exceeds the certificate");
    }

    #[test]
    fn window_failure_when_mass_exceeds_cap() {
        let pol = TruncationPolicy {
            tail_tol: 1e-12,
            max_terms: 100,
            growth_degree: 0,
        };
        match truncation_window(10, rp(1e6), &pol) {
            Err(Error::TruncationFailure { cap, .. }) => assert_eq!(cap, 100),
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn profiles_match_direct_evaluation() {
        for (n, xi) in [(3u32, 0.8), (40, 3.5), (200, 20.0)] {
            let pol = TruncationPolicy::default();
            let k_hi = *truncation_window(n, rp(xi), &pol).unwrap().end();
            let prof = baskakov_profile(n, xi, k_hi);
            for k in (0..=k_hi).step_by((k_hi / 17).max(1)) {
                let direct = baskakov_basis(BasisIndex::new(n, k as i64).unwrap(), rp(xi));
                if direct > 1e-280 {
                    assert_relative_eq!(prof[k], direct, max_relative = 1e-9);
                }
            }
        }
        let x = 0.7;
        let n = 12;
        let k_hi = 400;
        let prof = mkz_profile(n, x, k_hi);
        for k in (0..=k_hi).step_by(13) {
            let direct = mkz_basis(
                BasisIndex::new(n, k as i64).unwrap(),
                UnitPoint::new(x).unwrap(),
            );
            if direct > 1e-280 {
                assert_relative_eq!(prof[k], direct, max_relative = 1e-9);
            }
        }
    }

    /// Conditioning allowance for anchored log-space evaluation: the anchor
    /// exponent has magnitude ~ (a + K)·ln(1+scale), and one ulp there is
    /// the best any log-gamma route can do.
    fn log_conditioning(k_hi: usize, a: f64, scale: f64) -> f64 {
        4.0 * f64::EPSILON * ((a + k_hi as f64) * (2.0 + scale).ln()).max(1.0)
    }

    proptest! {
        // Partition of unity within tail_tol + 1e-12 plus the log-space
        // conditioning allowance of the anchor magnitude.
        #[test]
        fn partition_of_unity_ray(n in 1u32..=200, xi in 0f64..=50.0) {
            let pol = TruncationPolicy::default();
            let k_hi = *truncation_window(n, rp(xi), &pol).unwrap().end();
            let prof = baskakov_profile(n, xi, k_hi);
            let total = sum_profile(&prof, |_, b| b);
            let tol = pol.tail_tol + 1e-12 + log_conditioning(k_hi, n as f64, xi);
            prop_assert!((total - 1.0).abs() < tol,
                "n={} xi={} total={}", n, xi, total);
        }

        #[test]
        fn partition_of_unity_unit(n in 1u32..=200, x in 0f64..0.999) {
            let pol = TruncationPolicy::default();
            let k_hi = *truncation_window_unit(n, UnitPoint::new(x).unwrap(), &pol)
                .unwrap()
                .end();
            let prof = mkz_profile(n, x, k_hi);
            let total = sum_profile(&prof, |_, b| b);
            let tol = pol.tail_tol + 1e-12 + log_conditioning(k_hi, n as f64 + 1.0, x / (1.0 - x));
            prop_assert!((total - 1.0).abs() < tol,
                "n={} x={} total={}", n, x, total);
        }

        // The certified window really does bound the weighted tail.
        #[test]
        fn weighted_tail_certificate(n in 1u32..=60, xi in 0.01f64..=20.0, d in 0u8..=3) {
            let pol = TruncationPolicy {
                tail_tol: 1e-10,
                max_terms: 2_000_000,
                growth_degree: d,
            };
            let k = *truncation_window(n, rp(xi), &pol).unwrap().end();
            let tail: f64 = ((k + 1)..(k + 1) * 8)
                .map(|j| {
                    (1.0 + j as f64).powi(d as i32)
                        * baskakov_basis(BasisIndex::new(n, j as i64).unwrap(), rp(xi))
                })
                .sum();
            prop_assert!(tail <= pol.tail_tol * 1.0000001);
        }
    }
}
