//! The integral coefficient functionals of the Goodman–Sharma operators.
//!
//! Unit side: `u_{n,0}(f) = f(0)` and, for `k ≥ 1`,
//! `u_{n,k}(f) = n ∫₀¹ P_{n,k-1}(t) (1-t)⁻² f(t) dt`. The integrand's
//! apparent endpoint singularity cancels algebraically:
//! `P_{n,k-1}(t)(1-t)⁻² = C(n+k-1, k-1) t^{k-1} (1-t)^{n-1}`, and
//! `n C(n+k-1, k-1) B(k, n) = 1`, so `u_{n,k}(f)` is exactly the
//! expectation of `f` under the `Beta(k, n)` distribution. Unit
//! normalization (`u_{n,k}(e₀) = 1`) is therefore a free test.
//!
//! Ray side: `v_{n,0}(F) = F(0)` and, for `k ≥ 1`,
//! `v_{n,k}(F) = (n+1) ∫₀^∞ 𝒫_{n+2,k-1}(t) F(t) dt`. Substituting
//! `t = s/(1-s)` and folding one `(1-s)` into the integrand gives
//! `v_{n,k}(F) = ((n+k)/n) · E_{Beta(k,n)}[(1-s) F(s/(1-s))]`, whose
//! integrand is bounded exactly on the weighted class where
//! `(1+t)⁻¹ F(t)` is bounded.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::quad::{beta_expectation, integrate_adaptive, QuadraturePolicy};
use rayon::prelude::*;

/// Weight selector for [`quadrature_integrate`]: the normalized coefficient
/// weights of the two GS families.
#[derive(Debug, Clone, Copy)]
pub enum CoeffWeight {
    /// `Beta(k, n)` density `t^{k-1}(1-t)^{n-1}/B(k,n)` on `(0, 1)`.
    Unit { k: u64, n: u32 },
    /// Normalized ray weight `t^{k-1}(1+t)^{-n-k-1}/B(k, n+1)` on `(0, ∞)`,
    /// integrated after the substitution `t = s/(1-s)`.
    Ray { k: u64, n: u32 },
}

/// `∫ weight · F` for a normalized coefficient weight, with estimated
/// relative error at most `pol.rel_tol`.
pub fn quadrature_integrate(
    weight: CoeffWeight,
    big_f: &RealFunction,
    pol: &QuadraturePolicy,
) -> Result<f64> {
    match weight {
        CoeffWeight::Unit { k, n } => {
            if k == 0 || n == 0 {
                return Err(Error::InvalidConfig(
                    "unit coefficient weight requires k >= 1 and n >= 1".into(),
                ));
            }
            let f = big_f.eval_arc();
            beta_expectation(k, n as u64, move |t| f(t), pol)
        }
        CoeffWeight::Ray { k, n } => {
            if k == 0 || n == 0 {
                return Err(Error::InvalidConfig(
                    "ray coefficient weight requires k >= 1 and n >= 1".into(),
                ));
            }
            let f = big_f.eval_arc();
            beta_expectation(k, n as u64 + 1, move |s| f(s / (1.0 - s)), pol)
        }
    }
}

/// Unit-side GS coefficient `u_{n,k}(f)`.
pub fn u_coeff(n: u32, k: u64, f: &RealFunction, pol: &QuadraturePolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    if f.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: f.domain(),
        });
    }
    if k == 0 {
        return Ok(f.eval(0.0));
    }
    let fe = f.eval_arc();
    beta_expectation(k, n as u64, move |t| fe(t), pol)
}

/// Ray-side GS coefficient `v_{n,k}(F)`.
///
/// Errors with [`Error::DivergentIntegrand`] when `F` grows faster than
/// linearly, probed along `t = σ(1 - 10^-j)`.
pub fn v_coeff(n: u32, k: u64, big_f: &RealFunction, pol: &QuadraturePolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    if big_f.domain() != Domain::Ray {
        return Err(Error::DomainMismatch {
            expected: Domain::Ray,
            got: big_f.domain(),
        });
    }
    if k == 0 {
        return Ok(big_f.eval(0.0));
    }
    check_linear_growth(big_f)?;
    let fe = big_f.eval_arc();
    let value = beta_expectation(k, n as u64, move |s| (1.0 - s) * fe(s / (1.0 - s)), pol)?;
    Ok((n as f64 + k as f64) / n as f64 * value)
}

fn check_linear_growth(big_f: &RealFunction) -> Result<()> {
    // (1-s) F(σ(s)) must stay bounded as s -> 1 for the weighted class.
    let mut prev = f64::NAN;
    for j in [3, 6, 9] {
        let s = 1.0 - 10f64.powi(-j);
        let v = ((1.0 - s) * big_f.eval(s / (1.0 - s))).abs();
        if prev.is_finite() && v > 20.0 * prev.max(1.0) {
            return Err(Error::DivergentIntegrand(format!(
                "{} grows faster than linearly on the ray",
                big_f.label()
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Raw-integrand cross-check path for `u_{n,k}`: adaptive quadrature of
/// `n P_{n,k-1}(t) (1-t)⁻² f(t)` with the basis evaluated through the
/// log-space kernel, no cancellation of the weight.
pub fn u_coeff_raw(n: u32, k: u64, f: &RealFunction, pol: &QuadraturePolicy) -> Result<f64> {
    if k == 0 {
        return Ok(f.eval(0.0));
    }
    let idx = crate::basis::BasisIndex::new(n, k as i64 - 1)?;
    let fe = f.eval_arc();
    let q = integrate_adaptive(
        move |t| {
            let p = crate::basis::mkz_basis(idx, crate::domain::UnitPoint::new(t).unwrap());
            n as f64 * p / ((1.0 - t) * (1.0 - t)) * fe(t)
        },
        0.0,
        1.0 - 1e-13,
        pol,
        &[0.25, 0.5, 0.75, 0.9375],
        0.0,
    )?;
    Ok(q.value)
}

/// Raw-integrand cross-check path for `v_{n,k}`: the half-line integral
/// `(n+1) ∫ 𝒫_{n+2,k-1}(t) F(t) dt` mapped to `(0, 1)` by `t = s/(1-s)`.
pub fn v_coeff_raw(n: u32, k: u64, big_f: &RealFunction, pol: &QuadraturePolicy) -> Result<f64> {
    if k == 0 {
        return Ok(big_f.eval(0.0));
    }
    let idx = crate::basis::BasisIndex::new(n + 2, k as i64 - 1)?;
    let fe = big_f.eval_arc();
    let q = integrate_adaptive(
        move |s| {
            let t = s / (1.0 - s);
            let p = crate::basis::baskakov_basis(idx, crate::domain::RayPoint::new(t).unwrap());
            (n as f64 + 1.0) * p * fe(t) / ((1.0 - s) * (1.0 - s))
        },
        0.0,
        1.0 - 1e-13,
        pol,
        &[0.25, 0.5, 0.75, 0.9375],
        0.0,
    )?;
    Ok(q.value)
}

/// Whole coefficient window `u_{n,0..=k_hi}(f)`, computed in parallel.
/// The result is independent of evaluation order (each entry is its own
/// quadrature).
pub fn u_coeff_window(
    n: u32,
    f: &RealFunction,
    k_hi: usize,
    pol: &QuadraturePolicy,
) -> Result<Vec<f64>> {
    (0..=k_hi as u64)
        .into_par_iter()
        .map(|k| u_coeff(n, k, f, pol))
        .collect()
}

/// Whole coefficient window `v_{n,0..=k_hi}(F)`, computed in parallel.
pub fn v_coeff_window(
    n: u32,
    big_f: &RealFunction,
    k_hi: usize,
    pol: &QuadraturePolicy,
) -> Result<Vec<f64>> {
    check_linear_growth(big_f)?;
    (0..=k_hi as u64)
        .into_par_iter()
        .map(|k| v_coeff(n, k, big_f, pol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn e0() -> RealFunction {
        RealFunction::new("e0", Domain::Unit, |_| 1.0)
    }

    fn e1() -> RealFunction {
        RealFunction::new("e1", Domain::Unit, |x| x)
    }

    #[test]
    fn u_normalization() {
        let pol = QuadraturePolicy::default();
        for (n, k) in [(1u32, 1u64), (3, 2), (17, 40), (500, 1000), (771, 1)] {
            let v = u_coeff(n, k, &e0(), &pol).unwrap();
            assert_relative_eq!(v, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn u_first_moment() {
        let pol = QuadraturePolicy::default();
        // Expectation of e1 under Beta(k, n) is k/(k+n).
        let v = u_coeff(3, 2, &e1(), &pol).unwrap();
        assert_relative_eq!(v, 0.4, max_relative = 1e-10);
        // Cross-checked by the raw singular-weight path.
        let raw = u_coeff_raw(3, 2, &e1(), &pol).unwrap();
        assert_relative_eq!(v, raw, max_relative = 1e-9);
    }

    #[test]
    fn u_k0_is_point_evaluation() {
        let pol = QuadraturePolicy::default();
        let f = RealFunction::new("sinpi", Domain::Unit, |x| (std::f64::consts::PI * x).sin());
        assert_eq!(u_coeff(5, 0, &f, &pol).unwrap(), 0.0);
    }

    #[test]
    fn v_normalization_and_moments() {
        let pol = QuadraturePolicy::default();
        let one = RealFunction::new("e0", Domain::Ray, |_| 1.0);
        for (n, k) in [(1u32, 1u64), (4, 1), (17, 33), (500, 1000)] {
            assert_relative_eq!(v_coeff(n, k, &one, &pol).unwrap(), 1.0, max_relative = 1e-10);
        }
        // First moment of the normalized weight is k/n: F = 1 + t at
        // (n, k) = (4, 1) gives 1.25.
        let aff = RealFunction::new("1+t", Domain::Ray, |t| 1.0 + t);
        assert_relative_eq!(v_coeff(4, 1, &aff, &pol).unwrap(), 1.25, max_relative = 1e-10);
        let raw = v_coeff_raw(4, 1, &aff, &pol).unwrap();
        assert_relative_eq!(raw, 1.25, max_relative = 1e-9);
        // k = 0 is point evaluation.
        let g = RealFunction::new("inv", Domain::Ray, |t| 1.0 / (1.0 + t));
        assert_eq!(v_coeff(4, 0, &g, &pol).unwrap(), 1.0);
    }

    #[test]
    fn v_detects_superlinear_growth() {
        let pol = QuadraturePolicy::default();
        let sq = RealFunction::new("t2", Domain::Ray, |t| t * t);
        assert!(matches!(
            v_coeff(4, 1, &sq, &pol),
            Err(Error::DivergentIntegrand(_))
        ));
    }

    #[test]
    fn quadrature_integrate_examples() {
        let pol = QuadraturePolicy::default();
        // Beta(1,1) weight against e0 is 1.
        assert_relative_eq!(
            quadrature_integrate(CoeffWeight::Unit { k: 1, n: 1 }, &e0(), &pol).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // Beta(2,3) mean is 0.4.
        assert_relative_eq!(
            quadrature_integrate(CoeffWeight::Unit { k: 2, n: 3 }, &e1(), &pol).unwrap(),
            0.4,
            max_relative = 1e-10
        );
        // Normalized ray weight (k=1, n=2) has first moment k/n = 0.5.
        let t = RealFunction::new("t", Domain::Ray, |t| t);
        assert_relative_eq!(
            quadrature_integrate(CoeffWeight::Ray { k: 1, n: 2 }, &t, &pol).unwrap(),
            0.5,
            max_relative = 1e-9
        );
    }

    #[test]
    fn linearity_and_positivity() {
        let pol = QuadraturePolicy::default();
        let f = RealFunction::new("f", Domain::Unit, |x| (3.0 * x).cos());
        let g = RealFunction::new("g", Domain::Unit, |x| x * x * x);
        let combo = RealFunction::new("combo", Domain::Unit, |x| {
            2.5 * (3.0 * x).cos() - 1.25 * x * x * x
        });
        for (n, k) in [(4u32, 3u64), (20, 7)] {
            let lhs = u_coeff(n, k, &combo, &pol).unwrap();
            let rhs = 2.5 * u_coeff(n, k, &f, &pol).unwrap() - 1.25 * u_coeff(n, k, &g, &pol).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
        // Nonnegative integrand keeps coefficients above -1e-12.
        let pos = RealFunction::new("pos", Domain::Unit, |x| x * (1.0 - x));
        for k in 1..=20u64 {
            assert!(u_coeff(9, k, &pos, &pol).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn rejects_wrong_domain() {
        let pol = QuadraturePolicy::default();
        let ray_f = RealFunction::new("rayf", Domain::Ray, |t| t);
        assert!(matches!(
            u_coeff(3, 1, &ray_f, &pol),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn window_matches_pointwise() {
        let pol = QuadraturePolicy::default();
        let f = RealFunction::new("sinpi", Domain::Unit, |x| (std::f64::consts::PI * x).sin());
        let w = u_coeff_window(6, &f, 25, &pol).unwrap();
        for k in [0u64, 1, 7, 25] {
            assert_eq!(w[k as usize], u_coeff(6, k, &f, &pol).unwrap());
        }
    }
}
