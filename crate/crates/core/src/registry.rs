//! Built-in unit-interval test functions with hand-derived analytic
//! derivative chains.
//!
//! Each entry records whether the function belongs to the smoothness class
//! `W²(φ)` (bounded `φ f''`) and its boundary subclass `W²₀(φ)`
//! (`φ f'' → 0` at the origin), plus as much of the analytic chain
//! `f → D̃f → D̃²f → D̃³f` as is hand-derivable. Chain derivations, with
//! `φ = x(1-x)²`, `s = sin(πx)`, `c = cos(πx)`:
//!
//! - `x²`: `D̃f = 2φ`; `D̃²f = φ(12x-8)`; `D̃³f = φ(144x²-192x+56)`.
//! - `sin(πx)`: `D̃f = -π²φs`; `D̃²f = π²φ[(π²x(x-1)² - 6x + 4)s
//!   - 2π(1-x)(1-3x)c]`, from `(φs)'' = φ''s + 2πφ'c - π²φs` with
//!   `φ' = (1-x)(1-3x)`, `φ'' = 6x-4`.
//! - `x/(2-x)`: `f'' = 4/(2-x)³`, `D̃f = 4φ/(2-x)³`,
//!   `D̃²f = 8φ(4x²-x-2)/(2-x)⁵`.
//! - `√x`: `D̃f = -(1-x)²/(4√x)`, unbounded near 0 — outside `W²(φ)`; kept
//!   as a slow-decay control.
//!
//! Every chain closure is validated against nested centered differences and
//! frozen spot values in the tests.

use crate::domain::Domain;
use crate::function::RealFunction;
use std::f64::consts::PI;

/// A registry function plus its smoothness-class flags.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub func: RealFunction,
    /// `D̃f` bounded on `[0, 1)`.
    pub in_w2: bool,
    /// Additionally `D̃f(x) → 0` as `x → 0⁺`.
    pub in_w20: bool,
    /// `D̃³f` available and bounded (hypothesis of the Voronovskaya bound).
    pub has_third_chain: bool,
}

fn phi(x: f64) -> f64 {
    x * (1.0 - x) * (1.0 - x)
}

fn e0() -> RegistryEntry {
    let zero = RealFunction::new("zero", Domain::Unit, |_| 0.0)
        .with_d1(|_| 0.0)
        .with_d2(|_| 0.0)
        .with_d3(|_| 0.0);
    let f = RealFunction::new("e0", Domain::Unit, |_| 1.0)
        .with_d1(|_| 0.0)
        .with_d2(|_| 0.0)
        .with_d3(|_| 0.0)
        .with_dtilde(zero.clone().with_dtilde(zero.clone().with_dtilde(zero)));
    RegistryEntry {
        func: f,
        in_w2: true,
        in_w20: true,
        has_third_chain: true,
    }
}

fn e1() -> RegistryEntry {
    let zero = RealFunction::new("zero", Domain::Unit, |_| 0.0)
        .with_d1(|_| 0.0)
        .with_d2(|_| 0.0)
        .with_d3(|_| 0.0);
    let f = RealFunction::new("e1", Domain::Unit, |x| x)
        .with_d1(|_| 1.0)
        .with_d2(|_| 0.0)
        .with_d3(|_| 0.0)
        .with_dtilde(zero.clone().with_dtilde(zero.clone().with_dtilde(zero)));
    RegistryEntry {
        func: f,
        in_w2: true,
        in_w20: true,
        has_third_chain: true,
    }
}

fn x_squared() -> RegistryEntry {
    // D̃³f = φ (144x² - 192x + 56); one more level is not needed anywhere.
    let dt3 = RealFunction::new("dt3(x2)", Domain::Unit, |x| {
        phi(x) * (144.0 * x * x - 192.0 * x + 56.0)
    });
    // D̃²f = φ (12x - 8) = -8x + 28x² - 32x³ + 12x⁴.
    let dt2 = RealFunction::new("dt2(x2)", Domain::Unit, |x| phi(x) * (12.0 * x - 8.0))
        .with_d1(|x| -8.0 + 56.0 * x - 96.0 * x * x + 48.0 * x * x * x)
        .with_d2(|x| 56.0 - 192.0 * x + 144.0 * x * x)
        .with_dtilde(dt3);
    // D̃f = 2φ = 2x - 4x² + 2x³.
    let dt1 = RealFunction::new("dt(x2)", Domain::Unit, |x| 2.0 * phi(x))
        .with_d1(|x| 2.0 - 8.0 * x + 6.0 * x * x)
        .with_d2(|x| -8.0 + 12.0 * x)
        .with_dtilde(dt2);
    let f = RealFunction::new("x2", Domain::Unit, |x| x * x)
        .with_d1(|x| 2.0 * x)
        .with_d2(|_| 2.0)
        .with_d3(|_| 0.0)
        .with_dtilde(dt1);
    RegistryEntry {
        func: f,
        in_w2: true,
        in_w20: true,
        has_third_chain: true,
    }
}

fn sin_pi() -> RegistryEntry {
    let dt2 = RealFunction::new("dt2(sinpi)", Domain::Unit, |x| {
        let s = (PI * x).sin();
        let c = (PI * x).cos();
        let a2 = PI * PI * x * (x - 1.0) * (x - 1.0) - 6.0 * x + 4.0;
        let b2 = -2.0 * PI * (1.0 - x) * (1.0 - 3.0 * x);
        PI * PI * phi(x) * (a2 * s + b2 * c)
    });
    // D̃f = -π² φ sin(πx); its plain derivatives feed nested differences.
    let dt1 = RealFunction::new("dt(sinpi)", Domain::Unit, |x| {
        -PI * PI * phi(x) * (PI * x).sin()
    })
    .with_d2(move |x| {
        let s = (PI * x).sin();
        let c = (PI * x).cos();
        let phi_dd = 6.0 * x - 4.0;
        let phi_d = (1.0 - x) * (1.0 - 3.0 * x);
        -PI * PI * (phi_dd * s + 2.0 * PI * phi_d * c - PI * PI * phi(x) * s)
    })
    .with_dtilde(dt2);
    let f = RealFunction::new("sinpi", Domain::Unit, |x| (PI * x).sin())
        .with_d1(|x| PI * (PI * x).cos())
        .with_d2(|x| -PI * PI * (PI * x).sin())
        .with_d3(|x| -PI * PI * PI * (PI * x).cos())
        .with_dtilde(dt1);
    RegistryEntry {
        func: f,
        in_w2: true,
        in_w20: true,
        has_third_chain: false,
    }
}

fn rational() -> RegistryEntry {
    // f = x/(2-x); f'' = 4/(2-x)³.
    let dt2 = RealFunction::new("dt2(rational)", Domain::Unit, |x| {
        let d = 2.0 - x;
        8.0 * phi(x) * (4.0 * x * x - x - 2.0) / d.powi(5)
    });
    let dt1 = RealFunction::new("dt(rational)", Domain::Unit, |x| {
        let d = 2.0 - x;
        4.0 * phi(x) / (d * d * d)
    })
    .with_dtilde(dt2);
    let f = RealFunction::new("rational", Domain::Unit, |x| x / (2.0 - x))
        .with_d1(|x| {
            let d = 2.0 - x;
            2.0 / (d * d)
        })
        .with_d2(|x| {
            let d = 2.0 - x;
            4.0 / (d * d * d)
        })
        .with_d3(|x| {
            let d = 2.0 - x;
            12.0 / (d * d * d * d)
        })
        .with_dtilde(dt1);
    RegistryEntry {
        func: f,
        in_w2: true,
        in_w20: true,
        has_third_chain: false,
    }
}

fn sqrt_x() -> RegistryEntry {
    // D̃f = -(1-x)²/(4√x) is unbounded near the origin: a deliberate
    // negative control outside W²(φ).
    let dt1 = RealFunction::new("dt(sqrt)", Domain::Unit, |x| {
        if x == 0.0 {
            f64::NEG_INFINITY
        } else {
            -(1.0 - x) * (1.0 - x) / (4.0 * x.sqrt())
        }
    });
    let f = RealFunction::new("sqrt", Domain::Unit, |x| x.sqrt())
        .with_d1(|x| 0.5 / x.sqrt())
        .with_d2(|x| -0.25 / (x * x.sqrt()))
        .with_d3(|x| 0.375 / (x * x * x.sqrt()))
        .with_dtilde(dt1);
    RegistryEntry {
        func: f,
        in_w2: false,
        in_w20: false,
        has_third_chain: false,
    }
}

/// All built-in test functions.
pub fn registry() -> Vec<RegistryEntry> {
    vec![e0(), e1(), x_squared(), sin_pi(), rational(), sqrt_x()]
}

/// Look up a registry function by identifier.
pub fn lookup(label: &str) -> Option<RegistryEntry> {
    registry().into_iter().find(|e| e.func.label() == label)
}

/// Numeric membership probe for `W²₀(φ)`: evaluates `D̃f` along
/// `x = 10^-j`, `j = 4..=10`, and requires decay towards zero.
pub fn check_w20(entry: &RegistryEntry) -> bool {
    let dt = match entry.func.dtilde_analytic() {
        Some(d) => d.clone(),
        None => return false,
    };
    let mut prev = f64::INFINITY;
    for j in 4..=10 {
        let x = 10f64.powi(-j);
        let v = dt.eval(x).abs();
        if !(v <= prev + 1e-12) {
            return false;
        }
        prev = v;
    }
    prev < 1e-3
}
