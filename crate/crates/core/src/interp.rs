//! Chebyshev–Lobatto grids and barycentric Lagrange interpolation.
//!
//! Iterated operators and sup-norm estimation both work on
//! Chebyshev-spaced grids; the barycentric second-form weights for the
//! Lobatto points are `(-1)^j`, halved at the two ends, which keeps the
//! evaluation O(m) and numerically stable.

use crate::domain::Domain;
use crate::function::RealFunction;
use std::sync::Arc;

/// Ascending Chebyshev–Lobatto points mapped to `[a, b]`.
pub fn chebyshev_lobatto(m: usize, a: f64, b: f64) -> Vec<f64> {
    assert!(m >= 2, "need at least two grid points");
    let mut pts: Vec<f64> = (0..m)
        .map(|j| {
            let theta = std::f64::consts::PI * j as f64 / (m - 1) as f64;
            let t = theta.cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect();
    pts.reverse();
    // Pin the endpoints exactly.
    pts[0] = a;
    pts[m - 1] = b;
    pts
}

/// Barycentric interpolant over a fixed node set.
#[derive(Clone)]
pub struct Barycentric {
    nodes: Arc<Vec<f64>>,
    values: Arc<Vec<f64>>,
    weights: Arc<Vec<f64>>,
}

impl Barycentric {
    /// Interpolant through `(nodes[j], values[j])` for Chebyshev–Lobatto
    /// nodes (any affine image).
    pub fn chebyshev(nodes: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), values.len());
        let m = nodes.len();
        let mut weights: Vec<f64> = (0..m)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        weights[0] *= 0.5;
        weights[m - 1] *= 0.5;
        Barycentric {
            nodes: Arc::new(nodes),
            values: Arc::new(values),
            weights: Arc::new(weights),
        }
    }

    /// Evaluate at `x`, clamped to the node span: outside of it a
    /// high-degree interpolant grows like `cosh(m·acosh(u))` and is useless,
    /// so the interpolant extends as a constant. Callers keep their
    /// evaluation windows inside the span; only integral tails clamp.
    ///
    /// The hot loop is branchless so it vectorizes; an exact node hit
    /// surfaces as a non-finite ratio and is resolved afterwards.
    pub fn eval(&self, x: f64) -> f64 {
        let nodes = &self.nodes[..];
        let values = &self.values[..];
        let weights = &self.weights[..];
        let m = nodes.len();
        let x = x.clamp(nodes[0], nodes[m - 1]);
        // Four independent accumulators keep the division units busy
        // instead of serializing on one add chain.
        let mut num = [0.0f64; 4];
        let mut den = [0.0f64; 4];
        let chunks = m / 4 * 4;
        let mut j = 0;
        while j < chunks {
            for l in 0..4 {
                let q = weights[j + l] / (x - nodes[j + l]);
                num[l] += q * values[j + l];
                den[l] += q;
            }
            j += 4;
        }
        for l in chunks..m {
            let q = weights[l] / (x - nodes[l]);
            num[0] += q * values[l];
            den[0] += q;
        }
        let out = (num[0] + num[1] + num[2] + num[3]) / (den[0] + den[1] + den[2] + den[3]);
        if out.is_finite() {
            return out;
        }
        // Division by zero at an exact node: fall back to the node value.
        match nodes.iter().position(|&n| n == x) {
            Some(j) => self.values[j],
            None => out,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wrap as a [`RealFunction`] on the given domain.
    pub fn into_function(self, label: impl Into<String>, domain: Domain) -> RealFunction {
        RealFunction::new(label, domain, move |x| self.eval(x))
    }
}

/// Golden-section search for the maximum of `g` on `[a, b]` (unimodal
/// refinement step after a grid scan).
pub fn golden_section_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..iters {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, g(xm))
}
