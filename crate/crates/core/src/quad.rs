//! Panel-adaptive Gauss–Legendre quadrature.
//!
//! Every panel is evaluated with `m` and `2m` nodes; the difference is the
//! panel error estimate, and the worst panel is bisected until the summed
//! estimate drops below the requested relative tolerance. Beta-weighted
//! expectations additionally restrict integration to a certified effective
//! support: outside of it the log-concave density is bounded by a decaying
//! exponential whose mass is added to the error budget.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Panel-adaptive quadrature controls.
#[derive(Debug, Clone, Copy)]
pub struct QuadraturePolicy {
    /// Base rule size `m`; panels are compared at `m` and `2m` nodes.
    pub nodes_per_panel: usize,
    /// Relative tolerance on the integral (relative to `max(|I|, 1)`).
    pub rel_tol: f64,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            nodes_per_panel: 32,
            rel_tol: 1e-10,
            max_panels: 4096,
        }
    }
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel < 2 {
            return Err(Error::InvalidConfig(
                "nodes_per_panel must be at least 2".into(),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("rel_tol must be positive".into()));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidConfig("max_panels must be positive".into()));
        }
        Ok(())
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    /// Newton iteration on the Legendre polynomial, initialized at the
    /// Chebyshev angles. Standard construction, accurate to a few ulps.
    fn build(m: usize) -> GlRule {
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_m(x) and P'_m(x).
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=m {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        GlRule { nodes, weights }
    }

    /// Shared, lazily built rules keyed by node count.
    pub fn get(m: usize) -> Arc<GlRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(m).or_insert_with(|| Arc::new(GlRule::build(m))).clone()
    }

    /// `∫_a^b f` by this rule.
    pub fn integrate(&self, f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error (panel differences plus any tail budget).
    pub err_est: f64,
}

fn eval_panel(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    lo_rule: &GlRule,
    hi_rule: &GlRule,
) -> Result<Panel> {
    let coarse = lo_rule.integrate(f, a, b);
    let fine = hi_rule.integrate(f, a, b);
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(Error::QuadratureFailure {
            rel_tol: f64::NAN,
            detail: format!("non-finite integrand on panel [{a}, {b}]"),
        });
    }
    Ok(Panel {
        a,
        b,
        value: fine,
        err: (fine - coarse).abs(),
    })
}

/// Adaptive `∫_a^b f` with optional initial interior split points and a
/// fixed extra error budget (used for truncated tails).
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    pol: &QuadraturePolicy,
    init_splits: &[f64],
    extra_err: f64,
) -> Result<Quadrature> {
    pol.validate()?;
    let lo_rule = GlRule::get(pol.nodes_per_panel);
    let hi_rule = GlRule::get(2 * pol.nodes_per_panel);

    let mut edges: Vec<f64> = Vec::with_capacity(init_splits.len() + 2);
    edges.push(a);
    edges.extend(init_splits.iter().copied().filter(|&s| s > a && s < b));
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut panels: Vec<Panel> = Vec::new();
    for w in edges.windows(2) {
        panels.push(eval_panel(&mut f, w[0], w[1], &lo_rule, &hi_rule)?);
    }

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum::<f64>() + extra_err;
        if err <= pol.rel_tol * value.abs().max(1.0) {
            return Ok(Quadrature { value, err_est: err });
        }
        if panels.len() + 1 > pol.max_panels {
            let worst = panels
                .iter()
                .fold((0.0f64, 0.0f64), |acc, p| if p.err > acc.0 { (p.err, p.a) } else { acc });
            return Err(Error::QuadratureFailure {
                rel_tol: pol.rel_tol,
                detail: format!(
                    "panel budget {} exhausted; residual error {:.3e}, worst panel starts at {:.6e}",
                    pol.max_panels, err, worst.1
                ),
            });
        }
        // Bisect the worst panel (first of equals, for determinism).
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if !(pa < mid && mid < pb) {
            return Err(Error::QuadratureFailure {
                rel_tol: pol.rel_tol,
                detail: format!("panel [{pa}, {pb}] cannot be split further"),
            });
        }
        panels[worst] = eval_panel(&mut f, pa, mid, &lo_rule, &hi_rule)?;
        let right = eval_panel(&mut f, mid, pb, &lo_rule, &hi_rule)?;
        panels.insert(worst + 1, right);
    }
}

/// `ln B(a, b)`.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Expectation `E[g]` under the `Beta(a, b)` distribution (integer shape
/// parameters `a = k ≥ 1`, `b ≥ 1`), by panel-adaptive Gauss–Legendre on a
/// certified effective support.
///
/// The density `t^{a-1}(1-t)^{b-1}/B(a,b)` is log-concave; beyond a point
/// `t₀` past the mode its mass is at most `ρ(t₀)/|ℓ'(t₀)|` with `ℓ` the log
/// density. Both one-sided bounds are charged to the error budget.
pub fn beta_expectation(a: u64, b: u64, g: impl FnMut(f64) -> f64, pol: &QuadraturePolicy) -> Result<f64> {
    pol.validate()?;
    let mut g = g;
    let (af, bf) = (a as f64, b as f64);
    debug_assert!(a >= 1 && b >= 1);
    let lb = ln_beta(af, bf);
    let ln_density = |t: f64| (af - 1.0) * t.ln() + (bf - 1.0) * (-t).ln_1p() - lb;

    // Small shapes: the density is a low-degree polynomial; integrate over
    // the whole interval with a mild initial split.
    if a + b <= 60 {
        let q = integrate_adaptive(
            |t| ln_density(t).exp() * g(t),
            0.0,
            1.0,
            pol,
            &[0.125, 0.25, 0.5, 0.75, 0.875],
            0.0,
        )?;
        return Ok(q.value);
    }

    let mode = (af - 1.0) / (af + bf - 2.0);
    // At a boundary mode the density value is 1/B(a,b) exactly; the interior
    // formula would evaluate 0 * ln(0) there.
    let ln_peak = if a == 1 || b == 1 { -lb } else { ln_density(mode) };
    // ln-drop of 45 puts the density at e^-45 of its peak; combined with the
    // slope bound the discarded mass is far below any tolerance in use.
    const DROP: f64 = 45.0;
    let target = ln_peak - DROP;

    let bisect = |mut lo: f64, mut hi: f64, want_below_on_hi: bool| -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let below = ln_density(mid) < target;
            if below == want_below_on_hi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let lo = if a == 1 { 0.0 } else { bisect(1e-300, mode, false) };
    let hi = if b == 1 {
        1.0
    } else {
        bisect(mode.max(1e-300), 1.0 - 1e-16, true)
    };

    // One-sided tail-mass bounds from log-concavity.
    let slope = |t: f64| (af - 1.0) / t - (bf - 1.0) / (1.0 - t);
    let mut tail = 0.0;
    if lo > 0.0 {
        let s = slope(lo);
        if s > 0.0 {
            tail += ln_density(lo).exp() / s;
        }
    }
    if hi < 1.0 {
        let s = -slope(hi);
        if s > 0.0 {
            tail += ln_density(hi).exp() / s;
        }
    }

    let sd = (af * bf / ((af + bf) * (af + bf) * (af + bf + 1.0))).sqrt();
    let n_init = (((hi - lo) / (8.0 * sd)).ceil() as usize).clamp(1, 16);
    let splits: Vec<f64> = (1..n_init)
        .map(|i| lo + (hi - lo) * i as f64 / n_init as f64)
        .collect();

    let q = integrate_adaptive(
        |t| ln_density(t).exp() * g(t),
        lo,
        hi,
        pol,
        &splits,
        tail,
    )?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        let rule = GlRule::get(8);
        // Degree 15 is exact for an 8-point rule.
        let got = rule.integrate(&mut |x: f64| x.powi(15) + 3.0 * x.powi(4), -1.0, 1.0);
        assert_relative_eq!(got, 6.0 / 5.0, max_relative = 1e-13);
        let w: f64 = rule.weights.iter().sum();
        assert_relative_eq!(w, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gl_nodes_match_known_values() {
        let rule = GlRule::get(5);
        // Classical 5-point abscissa sqrt(5 - 2 sqrt(10/7))/3.
        let x2 = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        assert_relative_eq!(rule.nodes[3], x2, max_relative = 1e-14);
        assert_relative_eq!(rule.weights[2], 128.0 / 225.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let pol = QuadraturePolicy::default();
        // A bump narrow relative to the initial panels but wide enough for
        // the doubled rule to see it, so refinement is triggered. (Features
        // invisible to both rules at once must be covered by initial
        // splits, which is what the weighted-expectation path does.)
        let w = 5e-3;
        let q = integrate_adaptive(
            |t: f64| (-((t - 0.3) / w).powi(2)).exp(),
            0.0,
            1.0,
            &pol,
            &[0.25, 0.5, 0.75],
            0.0,
        )
        .unwrap();
        assert_relative_eq!(q.value, std::f64::consts::PI.sqrt() * w, max_relative = 1e-9);
    }

    #[test]
    fn adaptive_reports_failure() {
        let pol = QuadraturePolicy {
            nodes_per_panel: 4,
            rel_tol: 1e-13,
            max_panels: 4,
        };
        // Kink at an irrational point defeats a 4-panel budget.
        let r = integrate_adaptive(
            |t: f64| (t - std::f64::consts::FRAC_1_SQRT_2).abs().sqrt(),
            0.0,
            1.0,
            &pol,
            &[],
            0.0,
        );
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn beta_expectation_normalization_and_mean() {
        let pol = QuadraturePolicy::default();
        for (a, b) in [(1u64, 1u64), (2, 3), (40, 7), (1000, 500), (1, 771)] {
            let one = beta_expectation(a, b, |_| 1.0, &pol).unwrap();
            assert_relative_eq!(one, 1.0, max_relative = 1e-10);
            let mean = beta_expectation(a, b, |t| t, &pol).unwrap();
            assert_relative_eq!(mean, a as f64 / (a + b) as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn beta_expectation_of_smooth_function() {
        let pol = QuadraturePolicy::default();
        // E[t^2] = a(a+1)/((a+b)(a+b+1)) for Beta(a, b).
        for (a, b) in [(2u64, 3u64), (171, 64), (5000, 2000)] {
            let m2 = beta_expectation(a, b, |t| t * t, &pol).unwrap();
            let want = (a * (a + 1)) as f64 / (((a + b) * (a + b + 1)) as f64);
            assert_relative_eq!(m2, want, max_relative = 1e-9);
        }
    }
}
