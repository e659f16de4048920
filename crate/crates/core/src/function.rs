//! Real-valued functions on a tagged domain, with optional analytic
//! derivative closures and an optional analytic image under the weighted
//! second-derivative operator.

use crate::domain::Domain;
use std::fmt;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on the unit interval or the ray.
///
/// Carries the evaluation closure, up to three optional analytic
/// derivatives of the raw function, and optionally the analytic image
/// `D̃f = φ f''` (resp. `𝒟̃F = ψ F''`) as another [`RealFunction`], which
/// chains to give analytic weighted-derivative powers.
#[derive(Clone)]
pub struct RealFunction {
    label: String,
    domain: Domain,
    eval: EvalFn,
    d1: Option<EvalFn>,
    d2: Option<EvalFn>,
    d3: Option<EvalFn>,
    dtilde: Option<Arc<RealFunction>>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .field("d3", &self.d3.is_some())
            .field("dtilde", &self.dtilde.is_some())
            .finish()
    }
}

impl RealFunction {
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RealFunction {
            label: label.into(),
            domain,
            eval: Arc::new(eval),
            d1: None,
            d2: None,
            d3: None,
            dtilde: None,
        }
    }

    pub fn with_d1(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Arc::new(d1));
        self
    }

    pub fn with_d2(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_d3(mut self, d3: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d3 = Some(Arc::new(d3));
        self
    }

    /// Attach the analytic weighted second derivative (`φ f''` on the unit
    /// side, `ψ F''` on the ray side) as a chained function.
    pub fn with_dtilde(mut self, dt: RealFunction) -> Self {
        self.dtilde = Some(Arc::new(dt));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn d1(&self, x: f64) -> Option<f64> {
        self.d1.as_ref().map(|f| f(x))
    }

    pub fn d2(&self, x: f64) -> Option<f64> {
        self.d2.as_ref().map(|f| f(x))
    }

    pub fn d3(&self, x: f64) -> Option<f64> {
        self.d3.as_ref().map(|f| f(x))
    }

    pub fn has_d2(&self) -> bool {
        self.d2.is_some()
    }

    /// Analytic weighted second derivative, when attached.
    pub fn dtilde_analytic(&self) -> Option<&RealFunction> {
        self.dtilde.as_deref()
    }

    /// Borrow the evaluation closure.
    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + Send + Sync + '_ {
        let e = &self.eval;
        move |x| e(x)
    }

    /// Clone the evaluation closure handle (cheap; shares the allocation).
    pub(crate) fn eval_arc(&self) -> EvalFn {
        Arc::clone(&self.eval)
    }
}
