//! Evaluation of the six series operators and their compositions.
//!
//! Unit side (`[0, 1)`): the classical MKZ operator (point samples
//! `f(k/(k+n))`), its Goodman–Sharma modification (integral coefficients
//! `u_{n,k}(f)`), and the second-order modified GS operator (same
//! coefficients against the modified basis `P̃_{n,k}`).
//!
//! Ray side (`[0, ∞)`): the classical Baskakov operator (`F(k/n)`), the
//! GS variant (`v_{n,k}(F)`), and its second-order modification.
//!
//! Grid evaluation computes each coefficient window once and reuses it for
//! every point; iterated application materializes each level on a
//! Chebyshev grid and interpolates it barycentrically so the next level
//! has a genuine function to integrate against.

use crate::coeffs::{u_coeff_window, v_coeff_window};
use crate::domain::{Domain, RayPoint, UnitPoint};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::interp::{chebyshev_lobatto, Barycentric};
use crate::quad::QuadraturePolicy;
use crate::series::{
    baskakov_profile, mkz_profile, sum_profile, truncation_window, truncation_window_unit,
    TruncationPolicy,
};
use crate::transform::to_ray;
use std::fmt;
use std::str::FromStr;

/// Selector for the six operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Classical MKZ operator on `[0, 1)`.
    MkzClassical,
    /// Goodman–Sharma modification of the MKZ operator.
    MkzGs,
    /// Second-order modified MKZ-GS operator.
    MkzGsMod,
    /// Classical Baskakov operator on `[0, ∞)`.
    Baskakov,
    /// Goodman–Sharma variant of the Baskakov operator.
    BaskakovGs,
    /// Second-order modified Baskakov-GS operator.
    BaskakovGsMod,
}

impl OperatorKind {
    pub fn domain(self) -> Domain {
        match self {
            OperatorKind::MkzClassical | OperatorKind::MkzGs | OperatorKind::MkzGsMod => {
                Domain::Unit
            }
            _ => Domain::Ray,
        }
    }

    pub fn is_modified(self) -> bool {
        matches!(self, OperatorKind::MkzGsMod | OperatorKind::BaskakovGsMod)
    }

    fn uses_integral_coefficients(self) -> bool {
        matches!(
            self,
            OperatorKind::MkzGs
                | OperatorKind::MkzGsMod
                | OperatorKind::BaskakovGs
                | OperatorKind::BaskakovGsMod
        )
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorKind::MkzClassical => "mkz-classical",
            OperatorKind::MkzGs => "mkz-gs",
            OperatorKind::MkzGsMod => "mkz-gs-mod",
            OperatorKind::Baskakov => "baskakov",
            OperatorKind::BaskakovGs => "baskakov-gs",
            OperatorKind::BaskakovGsMod => "baskakov-gs-mod",
        };
        write!(f, "{s}")
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mkz-classical" => OperatorKind::MkzClassical,
            "mkz-gs" => OperatorKind::MkzGs,
            "mkz-gs-mod" => OperatorKind::MkzGsMod,
            "baskakov" => OperatorKind::Baskakov,
            "baskakov-gs" => OperatorKind::BaskakovGs,
            "baskakov-gs-mod" => OperatorKind::BaskakovGsMod,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown operator kind `{other}`"
                )))
            }
        })
    }
}

/// Order plus numeric policies for one operator application.
#[derive(Debug, Clone, Copy)]
pub struct OperatorConfig {
    pub n: u32,
    pub trunc: TruncationPolicy,
    pub quad: QuadraturePolicy,
}

impl OperatorConfig {
    pub fn new(n: u32) -> Self {
        OperatorConfig {
            n,
            trunc: TruncationPolicy::default(),
            quad: QuadraturePolicy::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidOrder(self.n));
        }
        self.trunc.validate()?;
        self.quad.validate()
    }
}

/// Materialization grid for iterated application.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub size: usize,
    /// Distance of the right window edge from 1 (unit side).
    pub delta: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            size: 513,
            delta: 2f64.powi(-10),
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        chebyshev_lobatto(self.size, 0.0, 1.0 - self.delta)
    }
}

/// Effective truncation policy for a unit-side GS series: the modified
/// basis carries a degree-2 bracket whose `1/(nx)` prefactor tightens the
/// tail tolerance.
pub(crate) fn effective_trunc_unit(
    n: u32,
    x: f64,
    trunc: &TruncationPolicy,
    modified: bool,
) -> TruncationPolicy {
    if !modified || x == 0.0 {
        return trunc.with_degree(0);
    }
    let factor = 1.0 + crate::series::unit_bracket_bound(n, x) / n as f64;
    trunc.with_degree(2).tightened(factor)
}

/// Ray-side analogue: coefficients of the weighted class grow linearly in
/// `k` (degree 3 total) and the bracket carries `(1+ξ)/(nξ)`.
pub(crate) fn effective_trunc_ray(
    n: u32,
    xi: f64,
    trunc: &TruncationPolicy,
    modified: bool,
) -> TruncationPolicy {
    if xi == 0.0 {
        return trunc.with_degree(0);
    }
    if !modified {
        return trunc.with_degree(1);
    }
    let factor = 1.0 + crate::series::ray_bracket_bound(n, xi) / n as f64;
    trunc.with_degree(3).tightened(factor)
}

/// Sum a unit-side GS series `Σ coeff_k · P_{n,k}` (or `P̃_{n,k}` when
/// `modified`) over the certified window at `x`.
pub(crate) fn gs_unit_series(
    n: u32,
    coeffs: &[f64],
    x: UnitPoint,
    trunc: &TruncationPolicy,
    modified: bool,
) -> Result<f64> {
    let window = truncation_window_unit(n, x, &effective_trunc_unit(n, x.get(), trunc, modified))?;
    let k_hi = (*window.end()).min(coeffs.len().saturating_sub(1));
    let xv = x.get();
    let prof = mkz_profile(n, xv, k_hi);
    let nf = n as f64;
    Ok(sum_profile(&prof, |k, b| {
        if b == 0.0 {
            return if xv == 0.0 && k == 0 { coeffs[0] } else { 0.0 };
        }
        let weight = if modified && xv > 0.0 {
            let kf = k as f64;
            let om = 1.0 - xv;
            let bracket = kf * (kf - 1.0) * om * om - 2.0 * kf * (nf + 1.0) * xv * om
                + nf * (nf + 1.0) * xv * xv;
            1.0 - bracket / (nf * xv)
        } else {
            1.0
        };
        coeffs[k] * weight * b
    }))
}

/// Ray-side analogue of [`gs_unit_series`].
pub(crate) fn gs_ray_series(
    n: u32,
    coeffs: &[f64],
    xi: RayPoint,
    trunc: &TruncationPolicy,
    modified: bool,
) -> Result<f64> {
    let window = truncation_window(n, xi, &effective_trunc_ray(n, xi.get(), trunc, modified))?;
    let k_hi = (*window.end()).min(coeffs.len().saturating_sub(1));
    let xv = xi.get();
    let prof = baskakov_profile(n, xv, k_hi);
    let nf = n as f64;
    let rho = xv / (1.0 + xv);
    Ok(sum_profile(&prof, |k, b| {
        if b == 0.0 {
            return if xv == 0.0 && k == 0 { coeffs[0] } else { 0.0 };
        }
        let weight = if modified && xv > 0.0 {
            let kf = k as f64;
            let bracket = kf * (kf - 1.0) - 2.0 * kf * (nf + kf) * rho
                + (nf + kf) * (nf + kf + 1.0) * rho * rho;
            1.0 - bracket * (1.0 + xv) / (xv * nf)
        } else {
            1.0
        };
        coeffs[k] * weight * b
    }))
}

fn max_window(kind: OperatorKind, cfg: &OperatorConfig, points: &[f64]) -> Result<usize> {
    let mut k_hi = 0usize;
    for &p in points {
        let w = match kind.domain() {
            Domain::Unit => {
                let tr = effective_trunc_unit(cfg.n, p, &cfg.trunc, kind.is_modified());
                truncation_window_unit(cfg.n, UnitPoint::new(p)?, &tr)?
            }
            Domain::Ray => {
                let tr = effective_trunc_ray(cfg.n, p, &cfg.trunc, kind.is_modified());
                truncation_window(cfg.n, RayPoint::new(p)?, &tr)?
            }
        };
        k_hi = k_hi.max(*w.end());
    }
    Ok(k_hi)
}

/// Apply an operator to `f` at every point of a grid, computing the
/// coefficient window once. Results are independent of point order.
pub fn apply_grid(
    kind: OperatorKind,
    cfg: &OperatorConfig,
    f: &RealFunction,
    points: &[f64],
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if f.domain() != kind.domain() {
        return Err(Error::DomainMismatch {
            expected: kind.domain(),
            got: f.domain(),
        });
    }
    for &p in points {
        if !kind.domain().contains(p) {
            return Err(Error::OutOfDomain {
                domain: kind.domain(),
                value: p,
            });
        }
    }
    let k_hi = max_window(kind, cfg, points)?;
    let n = cfg.n;
    let nf = n as f64;

    let coeffs: Vec<f64> = if kind.uses_integral_coefficients() {
        match kind.domain() {
            Domain::Unit => u_coeff_window(n, f, k_hi, &cfg.quad)?,
            Domain::Ray => v_coeff_window(n, f, k_hi, &cfg.quad)?,
        }
    } else {
        match kind {
            OperatorKind::MkzClassical => (0..=k_hi)
                .map(|k| f.eval(k as f64 / (k as f64 + nf)))
                .collect(),
            OperatorKind::Baskakov => (0..=k_hi).map(|k| f.eval(k as f64 / nf)).collect(),
            _ => unreachable!(),
        }
    };

    points
        .iter()
        .map(|&p| match kind.domain() {
            Domain::Unit => gs_unit_series(
                n,
                &coeffs,
                UnitPoint::new(p)?,
                &cfg.trunc,
                kind.is_modified(),
            ),
            Domain::Ray => gs_ray_series(
                n,
                &coeffs,
                RayPoint::new(p)?,
                &cfg.trunc,
                kind.is_modified(),
            ),
        })
        .collect()
}

/// Apply an operator to `f` at one point.
pub fn apply(kind: OperatorKind, cfg: &OperatorConfig, f: &RealFunction, point: f64) -> Result<f64> {
    Ok(apply_grid(kind, cfg, f, &[point])?[0])
}

/// Materialize `Op f` on a Chebyshev grid as a barycentric interpolant,
/// usable as the next level's integrand. Unit side only.
pub fn materialize(
    kind: OperatorKind,
    cfg: &OperatorConfig,
    f: &RealFunction,
    spec: &GridSpec,
) -> Result<RealFunction> {
    if kind.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: kind.domain(),
        });
    }
    let nodes = spec.points();
    let values = apply_grid(kind, cfg, f, &nodes)?;
    let label = format!("{kind}(n={})[{}]", cfg.n, f.label());
    Ok(Barycentric::chebyshev(nodes, values).into_function(label, Domain::Unit))
}

/// Coefficient policy for applications whose integrand is an interpolated
/// iterate: the interpolant itself carries roughly 1e-10 noise, so sharper
/// series and quadrature budgets only spend evaluations without gaining
/// accuracy.
pub fn relaxed_for_interpolants(cfg: &OperatorConfig) -> OperatorConfig {
    OperatorConfig {
        n: cfg.n,
        trunc: TruncationPolicy {
            tail_tol: cfg.trunc.tail_tol.max(1e-9),
            ..cfg.trunc
        },
        quad: QuadraturePolicy {
            nodes_per_panel: cfg.quad.nodes_per_panel.min(16),
            rel_tol: cfg.quad.rel_tol.max(1e-9),
            max_panels: cfg.quad.max_panels,
        },
    }
}

/// `times`-fold application (`times ≤ 3`). Inner levels are materialized on
/// the default Chebyshev grid; `times = 1` is exactly [`apply`].
pub fn apply_iterated(
    kind: OperatorKind,
    cfg: &OperatorConfig,
    f: &RealFunction,
    times: u32,
    point: f64,
) -> Result<f64> {
    if !(1..=3).contains(&times) {
        return Err(Error::InvalidConfig("iteration depth must be 1..=3".into()));
    }
    if times == 1 {
        return apply(kind, cfg, f, point);
    }
    let last = iterate_function(kind, cfg, f, times, &GridSpec::default())?;
    Ok(last.eval(point))
}

/// The full iterate `Op^times f` as a materialized function. The first
/// level runs at the configured policies; later levels (interpolant
/// integrands) at the relaxed ones.
pub fn iterate_function(
    kind: OperatorKind,
    cfg: &OperatorConfig,
    f: &RealFunction,
    times: u32,
    spec: &GridSpec,
) -> Result<RealFunction> {
    if !(1..=3).contains(&times) {
        return Err(Error::InvalidConfig("iteration depth must be 1..=3".into()));
    }
    let mut current = materialize(kind, cfg, f, spec)?;
    let relaxed = relaxed_for_interpolants(cfg);
    for _ in 1..times {
        current = materialize(kind, &relaxed, &current, spec)?;
    }
    Ok(current)
}

/// `D̃ M̃_n f (x)` for a bounded unit function, computed on the ray side as
/// `(1-x) Σ_k v_{n,k}(𝒯⁻¹f) 𝒟̃𝒫̃_{n,k}(σ(x))` and bridged back.
pub fn dtilde_of_modified_grid(
    cfg: &OperatorConfig,
    f: &RealFunction,
    points: &[f64],
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if f.domain() != Domain::Unit {
        return Err(Error::DomainMismatch {
            expected: Domain::Unit,
            got: f.domain(),
        });
    }
    let big_f = to_ray(f)?;
    let n = cfg.n;
    // Terms carry up to the squared spectral bracket (degree 4 in k) plus
    // linear coefficient growth; the window absorbs the point-dependent
    // prefactors into the tolerance.
    let dt_trunc = |xi: f64| {
        let c = crate::series::ray_bracket_bound(n, xi);
        let factor = c * c + 4.0 * c * (n as f64 + 2.0) + 2.0 * (1.0 + xi) / (n as f64 * xi * xi) + 1.0;
        cfg.trunc.with_degree(5).tightened(factor)
    };
    let mut k_hi = 0usize;
    let mut xis = Vec::with_capacity(points.len());
    for &x in points {
        let xi = crate::domain::sigma(UnitPoint::new(x)?)?;
        if xi.get() > 0.0 {
            k_hi = k_hi.max(*truncation_window(n, xi, &dt_trunc(xi.get()))?.end());
        }
        xis.push(xi.get());
    }
    let coeffs = v_coeff_window(n, &big_f, k_hi, &cfg.quad)?;

    let nf = n as f64;
    points
        .iter()
        .zip(&xis)
        .map(|(&x, &xi)| {
            if xi == 0.0 {
                return Ok(0.0);
            }
            let window = truncation_window(n, RayPoint::new(xi)?, &dt_trunc(xi))?;
            let prof = baskakov_profile(n, xi, (*window.end()).min(coeffs.len() - 1));
            let rho = xi / (1.0 + xi);
            let opx = 1.0 + xi;
            let series = sum_profile(&prof, |k, b| {
                if b == 0.0 {
                    return 0.0;
                }
                let kf = k as f64;
                let br = |nn: f64, kk: f64| {
                    kk * (kk - 1.0) - 2.0 * kk * (nn + kk) * rho + (nn + kk) * (nn + kk + 1.0) * rho * rho
                };
                // ψ T''/n · 𝒫, fused.
                let piece_a = b * opx / (nf * xi * xi)
                    * 2.0
                    * (kf * (kf - 1.0) - (nf + kf) * (nf + kf + 1.0) * rho * rho * rho);
                // Shifted bases through the two re-indexing identities.
                let p_up_same = (nf + kf) * b / (nf * opx);
                let p_up_down = kf * b / (nf * xi);
                let tp_up_same = p_up_same * opx / xi * br(nf + 1.0, kf);
                let tp_up_down = p_up_down * opx / xi * br(nf + 1.0, kf - 1.0);
                let tp = b * opx / xi * br(nf, kf);
                let t_over_n = br(nf, kf) * opx / (xi * nf);
                let total = piece_a + 2.0 * (tp_up_down + tp_up_same) + (1.0 - t_over_n) * tp;
                coeffs[k] * total
            });
            Ok((1.0 - x) * series)
        })
        .collect()
}

/// Single-point version of [`dtilde_of_modified_grid`].
pub fn dtilde_of_modified(cfg: &OperatorConfig, f: &RealFunction, x: f64) -> Result<f64> {
    Ok(dtilde_of_modified_grid(cfg, f, &[x])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::lookup;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gs_reproduces_constants_and_linear() {
        let cfg = OperatorConfig::new(6);
        let e0 = lookup("e0").unwrap().func;
        let e1 = lookup("e1").unwrap().func;
        for kind in [OperatorKind::MkzGs, OperatorKind::MkzGsMod] {
            assert_relative_eq!(
                apply(kind, &cfg, &e0, 0.3).unwrap(),
                1.0,
                max_relative = 1e-10
            );
            assert_relative_eq!(
                apply(kind, &cfg, &e1, 0.3).unwrap(),
                0.3,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn baskakov_reproduces_linear() {
        let cfg = OperatorConfig::new(10);
        let e1 = RealFunction::new("xi", Domain::Ray, |t| t);
        assert_relative_eq!(
            apply(OperatorKind::Baskakov, &cfg, &e1, 2.5).unwrap(),
            2.5,
            max_relative = 1e-11
        );
    }

    #[test]
    fn gs_is_below_concave_functions() {
        let cfg = OperatorConfig::new(4);
        let sqrt = lookup("sqrt").unwrap().func;
        let v = apply(OperatorKind::MkzGs, &cfg, &sqrt, 0.5).unwrap();
        assert!(v <= 0.5f64.sqrt() + 1e-12, "GS value {v} above concave f");
    }

    #[test]
    fn endpoint_value_is_f_of_zero() {
        let cfg = OperatorConfig::new(9);
        let f = lookup("sinpi").unwrap().func;
        for kind in [OperatorKind::MkzClassical, OperatorKind::MkzGs, OperatorKind::MkzGsMod] {
            assert_abs_diff_eq!(apply(kind, &cfg, &f, 0.0).unwrap(), 0.0, epsilon = 1e-14);
        }
        let g = lookup("e0").unwrap().func;
        assert_eq!(apply(OperatorKind::MkzGs, &cfg, &g, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let cfg = OperatorConfig::new(3);
        let ray_f = RealFunction::new("rayf", Domain::Ray, |t| t);
        assert!(matches!(
            apply(OperatorKind::MkzGs, &cfg, &ray_f, 0.2),
            Err(Error::DomainMismatch { .. })
        ));
        let unit_f = lookup("e1").unwrap().func;
        assert!(apply(OperatorKind::MkzGs, &cfg, &unit_f, 1.2).is_err());
    }

    #[test]
    fn iterated_once_equals_apply() {
        let cfg = OperatorConfig::new(5);
        let f = lookup("x2").unwrap().func;
        let a = apply(OperatorKind::MkzGsMod, &cfg, &f, 0.4).unwrap();
        let b = apply_iterated(OperatorKind::MkzGsMod, &cfg, &f, 1, 0.4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iterated_preserves_linear_reproduction() {
        let cfg = OperatorConfig::new(7);
        let e1 = lookup("e1").unwrap().func;
        let v = apply_iterated(OperatorKind::MkzGsMod, &cfg, &e1, 3, 0.37).unwrap();
        assert_relative_eq!(v, 0.37, max_relative = 1e-8);
    }

    #[test]
    fn dtilde_of_modified_on_linear_is_zero() {
        let cfg = OperatorConfig::new(8);
        let e1 = lookup("e1").unwrap().func;
        for &x in &[0.0, 0.2, 0.6, 0.9] {
            assert_abs_diff_eq!(
                dtilde_of_modified(&cfg, &e1, x).unwrap(),
                0.0,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn dtilde_of_modified_matches_finite_difference() {
        // Compare against φ (M̃_n f)'' with the operator evaluated directly.
        let cfg = OperatorConfig::new(17);
        let f = lookup("x2").unwrap().func;
        let x = 0.4;
        let h = 1e-4;
        let grid = [x - h, x, x + h];
        let vals = apply_grid(OperatorKind::MkzGsMod, &cfg, &f, &grid).unwrap();
        let fd = crate::domain::phi(x) * (vals[2] - 2.0 * vals[1] + vals[0]) / (h * h);
        let got = dtilde_of_modified(&cfg, &f, x).unwrap();
        assert_abs_diff_eq!(got, fd, epsilon = 1e-5);
    }

    #[test]
    fn grid_evaluation_is_pointwise_stable() {
        // Batching points must not change any single point's bits.
        let cfg = OperatorConfig::new(11);
        let f = lookup("sinpi").unwrap().func;
        let grid = [0.1, 0.35, 0.62, 0.9];
        let batch = apply_grid(OperatorKind::MkzGsMod, &cfg, &f, &grid).unwrap();
        for (&x, &v) in grid.iter().zip(&batch) {
            let single = apply(OperatorKind::MkzGsMod, &cfg, &f, x).unwrap();
            assert_eq!(single.to_bits(), v.to_bits(), "at x={x}");
        }
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for kind in [
            OperatorKind::MkzClassical,
            OperatorKind::MkzGs,
            OperatorKind::MkzGsMod,
            OperatorKind::Baskakov,
            OperatorKind::BaskakovGs,
            OperatorKind::BaskakovGsMod,
        ] {
            let s = kind.to_string();
            assert_eq!(s.parse::<OperatorKind>().unwrap(), kind);
        }
        assert!("mkz".parse::<OperatorKind>().is_err());
    }
}
