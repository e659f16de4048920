//! The unit↔ray function transforms and the bridges built on them.
//!
//! `(𝒯F)(x) = (1-x) F(x/(1-x))` carries ray functions to unit functions;
//! its inverse is `(𝒯⁻¹f)(ξ) = (1+ξ) f(ξ/(1+ξ))`. Under these maps the
//! weighted second derivatives conjugate exactly, `D̃ 𝒯F = 𝒯 𝒟̃F`, and with
//! the ray weight `w(ξ) = (1+ξ)⁻¹` sup norms correspond:
//! `‖f‖ = ‖w F‖` on σ-matched grids.

use crate::coeffs::{u_coeff, v_coeff};
use crate::domain::{ray_weight, sigma, Domain, UnitPoint};
use crate::engine::{gs_ray_series, gs_unit_series};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::quad::QuadraturePolicy;
use crate::series::{truncation_window, truncation_window_unit, TruncationPolicy};
use crate::basis;

/// `𝒯F`: pull a ray function back to the unit interval.
///
/// Derivative closures compose by the chain rule where present:
/// `f'(x) = -F(σ) + F'(σ)/(1-x)`, `f''(x) = F''(σ)/(1-x)³`,
/// `f'''(x) = F'''(σ)/(1-x)⁵ + 3F''(σ)/(1-x)⁴`.
pub fn to_unit(big_f: &RealFunction) -> Result<RealFunction> {
    if big_f.domain() != Domain::Ray {
        return Err(Error::DomainMismatch {
            expected: Domain::Ray,
            got: big_f.domain(),
        });
    }
    let label = format!("to_unit({})", big_f.label());
    let fe = big_f.eval_arc();
    let mut out = RealFunction::new(label, Domain::Unit, move |x| {
        (1.0 - x) * fe(x / (1.0 - x))
    });
    let (f0, f1) = (big_f.clone(), big_f.clone());
    if big_f.d1(0.0).is_some() {
        out = out.with_d1(move |x| {
            let s = x / (1.0 - x);
            -f0.eval(s) + f0.d1(s).unwrap() / (1.0 - x)
        });
    }
    if big_f.d2(0.0).is_some() {
        out = out.with_d2(move |x| {
            let om = 1.0 - x;
            f1.d2(x / om).unwrap() / (om * om * om)
        });
    }
    if big_f.d2(0.0).is_some() && big_f.d3(0.0).is_some() {
        let f2 = big_f.clone();
        out = out.with_d3(move |x| {
            let om = 1.0 - x;
            let s = x / om;
            f2.d3(s).unwrap() / om.powi(5) + 3.0 * f2.d2(s).unwrap() / om.powi(4)
        });
    }
    Ok(out)
}

/// `𝒯⁻¹f`: push a unit function out to the ray.
pub fn to_ray(f: &RealFunction) -> Result<RealFunction> {
    if f.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: f.domain(),
        });
    }
    let label = format!("to_ray({})", f.label());
    let fe = f.eval_arc();
    let mut out = RealFunction::new(label, Domain::Ray, move |xi| {
        (1.0 + xi) * fe(xi / (1.0 + xi))
    });
    let (f0, f1) = (f.clone(), f.clone());
    if f.d1(0.0).is_some() {
        out = out.with_d1(move |xi| {
            let y = xi / (1.0 + xi);
            f0.eval(y) + f0.d1(y).unwrap() / (1.0 + xi)
        });
    }
    if f.d2(0.0).is_some() {
        out = out.with_d2(move |xi| {
            let op = 1.0 + xi;
            f1.d2(xi / op).unwrap() / (op * op * op)
        });
    }
    if f.d2(0.0).is_some() && f.d3(0.0).is_some() {
        let f2 = f.clone();
        out = out.with_d3(move |xi| {
            let op = 1.0 + xi;
            let y = xi / op;
            f2.d3(y).unwrap() / op.powi(5) - 3.0 * f2.d2(y).unwrap() / op.powi(4)
        });
    }
    Ok(out)
}

/// Max absolute two-path residual of the operator bridge
/// `M̃_n(f, x) = (1-x) Ṽ_n(𝒯⁻¹f, x/(1-x))` over a grid: the unit side is
/// summed with `u`-coefficients and `P̃`, the ray side independently with
/// `v`-coefficients and `𝒫̃`.
pub fn bridge_residual(
    n: u32,
    f: &RealFunction,
    x_grid: &[f64],
    trunc: &TruncationPolicy,
    quad: &QuadraturePolicy,
) -> Result<f64> {
    if f.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: f.domain(),
        });
    }
    let big_f = to_ray(f)?;

    let mut k_hi_unit = 0usize;
    let mut k_hi_ray = 0usize;
    for &x in x_grid {
        let xp = UnitPoint::new(x)?;
        k_hi_unit = k_hi_unit.max(*truncation_window_unit(n, xp, &trunc.with_degree(2))?.end());
        k_hi_ray = k_hi_ray.max(*truncation_window(n, sigma(xp)?, &trunc.with_degree(3))?.end());
    }
    let u: Vec<f64> = crate::coeffs::u_coeff_window(n, f, k_hi_unit, quad)?;
    let v: Vec<f64> = crate::coeffs::v_coeff_window(n, &big_f, k_hi_ray, quad)?;

    let mut worst = 0.0f64;
    for &x in x_grid {
        let xp = UnitPoint::new(x)?;
        let unit_side = gs_unit_series(n, &u, xp, trunc, true)?;
        let xi = sigma(xp)?;
        let ray_side = (1.0 - x) * gs_ray_series(n, &v, xi, trunc, true)?;
        worst = worst.max((unit_side - ray_side).abs());
    }
    Ok(worst)
}

/// Pointwise conjugation check `D̃(𝒯F) = 𝒯(𝒟̃F)` for a ray function with an
/// analytic second derivative: the left side by centered differences of
/// `𝒯F`, the right side analytically. Returns the max residual on the grid.
pub fn conjugation_residual(big_f: &RealFunction, x_grid: &[f64]) -> Result<f64> {
    let f = to_unit(big_f)?;
    let mut worst = 0.0f64;
    for &x in x_grid {
        if x <= 1e-4 || x >= 0.97 {
            continue;
        }
        let h = 1e-5;
        let fdd = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
        let left = crate::domain::phi(x) * fdd;
        let s = x / (1.0 - x);
        let right = (1.0 - x) * crate::domain::psi(s) * big_f.d2(s).unwrap();
        worst = worst.max((left - right).abs());
    }
    Ok(worst)
}

/// Grid sup norms on σ-matched grids: `(sup |f(x_i)|, sup w(ξ_i)|F(ξ_i)|)`
/// with `ξ_i = σ(x_i)`. Equal up to roundoff by construction.
pub fn norm_correspondence(f: &RealFunction, x_grid: &[f64]) -> Result<(f64, f64)> {
    if f.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: f.domain(),
        });
    }
    let big_f = to_ray(f)?;
    let mut unit_sup = 0.0f64;
    let mut ray_sup = 0.0f64;
    for &x in x_grid {
        let xp = UnitPoint::new(x)?;
        unit_sup = unit_sup.max(f.eval(x).abs());
        let xi = sigma(xp)?.get();
        ray_sup = ray_sup.max(ray_weight(xi) * big_f.eval(xi).abs());
    }
    Ok((unit_sup, ray_sup))
}

/// Both sides of the GS coefficient identity at index `(n, k)`: the unit
/// `u`-coefficient of `f` against the ray `v`-coefficient of `𝒯⁻¹f`. Used
/// by the verification layer; they are not equal in general, but both feed
/// the bridged series.
pub fn coefficient_pair(
    n: u32,
    k: u64,
    f: &RealFunction,
    quad: &QuadraturePolicy,
) -> Result<(f64, f64)> {
    let big_f = to_ray(f)?;
    Ok((u_coeff(n, k, f, quad)?, v_coeff(n, k, &big_f, quad)?))
}

/// One fused check used in tests: `𝒟̃𝒫 = T·𝒫` transported through the
/// bridge agrees with the unit-side fused `D̃P` at matched points.
#[allow(dead_code)]
pub(crate) fn basis_bridge_residual(n: u32, k: i64, x: UnitPoint) -> Result<f64> {
    let idx = basis::BasisIndex::new(n, k)?;
    let xi = sigma(x)?;
    let unit = basis::mkz_basis(idx, x);
    // P_{n,k}(x) = ((n+k)/n) (1-x) 𝒫_{n,k}(σ(x)).
    let nf = n as f64;
    let kf = k.max(0) as f64;
    let ray = (nf + kf) / nf * (1.0 - x.get()) * basis::baskakov_basis(idx, xi);
    Ok((unit - ray).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn to_unit_examples() {
        let one_plus = RealFunction::new("1+xi", Domain::Ray, |t| 1.0 + t);
        let f = to_unit(&one_plus).unwrap();
        for &x in &[0.0, 0.3, 0.9, 0.999] {
            assert_relative_eq!(f.eval(x), 1.0, max_relative = 1e-14);
        }
        let one = RealFunction::new("1", Domain::Ray, |_| 1.0);
        let g = to_unit(&one).unwrap();
        assert_relative_eq!(g.eval(0.25), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn to_ray_examples() {
        let one = RealFunction::new("1", Domain::Unit, |_| 1.0);
        assert_relative_eq!(to_ray(&one).unwrap().eval(2.0), 3.0, max_relative = 1e-15);
        let e1 = RealFunction::new("e1", Domain::Unit, |x| x);
        assert_relative_eq!(to_ray(&e1).unwrap().eval(7.0), 7.0, max_relative = 1e-14);
    }

    #[test]
    fn round_trip_is_identity() {
        let f = RealFunction::new("mix", Domain::Unit, |x| (2.1 * x).sin() + x * x);
        let back = to_unit(&to_ray(&f).unwrap()).unwrap();
        for j in 0..40 {
            let x = j as f64 / 40.2;
            assert_abs_diff_eq!(back.eval(x), f.eval(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn composed_derivatives_match_finite_differences() {
        let big_f = RealFunction::new("ray-mix", Domain::Ray, |t| (0.5 * t).sin() + t)
            .with_d1(|t| 0.5 * (0.5 * t).cos() + 1.0)
            .with_d2(|t| -0.25 * (0.5 * t).sin())
            .with_d3(|t| -0.125 * (0.5 * t).cos());
        let f = to_unit(&big_f).unwrap();
        for &x in &[0.2, 0.5, 0.8] {
            let h = 1e-5;
            let fd1 = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert_relative_eq!(f.d1(x).unwrap(), fd1, max_relative = 1e-7);
            let fd2 = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
            assert_relative_eq!(f.d2(x).unwrap(), fd2, max_relative = 1e-4);
        }
        let back = to_ray(&f).unwrap();
        for &t in &[0.4, 1.5, 3.0] {
            assert_relative_eq!(
                back.d2(t).unwrap(),
                big_f.d2(t).unwrap(),
                max_relative = 1e-11
            );
            assert_relative_eq!(
                back.d3(t).unwrap(),
                big_f.d3(t).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn conjugation_identity_holds() {
        let big_f = RealFunction::new("smooth", Domain::Ray, |t| 1.0 / (1.0 + t) + 0.1 * t)
            .with_d2(|t| 2.0 / (1.0 + t).powi(3));
        let grid: Vec<f64> = (0..30).map(|j| j as f64 / 31.0).collect();
        let r = conjugation_residual(&big_f, &grid).unwrap();
        assert!(r < 1e-6, "conjugation residual {r}");
    }

    #[test]
    fn basis_level_bridge() {
        for (n, k) in [(3u32, 0i64), (3, 2), (10, 7)] {
            for &x in &[0.1, 0.5, 0.8] {
                let r = basis_bridge_residual(n, k, UnitPoint::new(x).unwrap()).unwrap();
                assert!(r < 1e-13, "n={n} k={k} x={x}: {r}");
            }
        }
    }

    #[test]
    fn matched_grid_norms_agree() {
        let f = RealFunction::new("sinpi", Domain::Unit, |x| (std::f64::consts::PI * x).sin());
        let grid: Vec<f64> = (0..65).map(|j| j as f64 / 65.5).collect();
        let (a, b) = norm_correspondence(&f, &grid).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn classical_and_gs_operators_bridge() {
        // Op(f, x) = (1-x) RayOp(𝒯⁻¹f, x/(1-x)) for the classical and the
        // GS pairs, evaluated through the engine on both sides.
        use crate::engine::{apply, OperatorConfig, OperatorKind};
        let f = crate::registry::lookup("sinpi").unwrap().func;
        let big_f = to_ray(&f).unwrap();
        let cfg = OperatorConfig::new(7);
        for (unit_kind, ray_kind) in [
            (OperatorKind::MkzClassical, OperatorKind::Baskakov),
            (OperatorKind::MkzGs, OperatorKind::BaskakovGs),
            (OperatorKind::MkzGsMod, OperatorKind::BaskakovGsMod),
        ] {
            for &x in &[0.1, 0.45, 0.8] {
                let unit = apply(unit_kind, &cfg, &f, x).unwrap();
                let ray = (1.0 - x) * apply(ray_kind, &cfg, &big_f, x / (1.0 - x)).unwrap();
                assert!(
                    (unit - ray).abs() < 1e-9,
                    "{unit_kind} vs {ray_kind} at {x}: {unit} vs {ray}"
                );
            }
        }
    }
}
