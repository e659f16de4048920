//! Domains, validated points and the weight functions attached to them.
//!
//! Unit-side objects live on `[0, 1)`, ray-side objects on `[0, ∞)`. The
//! change of variables `σ(x) = x/(1-x)` maps one to the other; `σ⁻¹(ξ) =
//! ξ/(1+ξ)`. The weights are `φ(x) = x(1-x)²` on the unit side, `ψ(ξ) =
//! ξ(1+ξ)` on the ray side, and the ray norm weight `w(ξ) = (1+ξ)⁻¹`.

use crate::error::{Error, Result};
use std::fmt;

/// Which interval a function or point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// The unit interval `[0, 1)`.
    Unit,
    /// The half line `[0, ∞)`.
    Ray,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Unit => write!(f, "unit"),
            Domain::Ray => write!(f, "ray"),
        }
    }
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::Unit => x.is_finite() && (0.0..1.0).contains(&x),
            Domain::Ray => x.is_finite() && x >= 0.0,
        }
    }
}

/// A validated point of `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint(f64);

impl UnitPoint {
    pub fn new(x: f64) -> Result<Self> {
        if Domain::Unit.contains(x) {
            Ok(UnitPoint(x))
        } else {
            Err(Error::OutOfDomain {
                domain: Domain::Unit,
                value: x,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// A validated point of `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPoint(f64);

impl RayPoint {
    pub fn new(x: f64) -> Result<Self> {
        if Domain::Ray.contains(x) {
            Ok(RayPoint(x))
        } else {
            Err(Error::OutOfDomain {
                domain: Domain::Ray,
                value: x,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Unit-side second-derivative weight `φ(x) = x(1-x)²`.
#[inline]
pub fn phi(x: f64) -> f64 {
    x * (1.0 - x) * (1.0 - x)
}

/// Ray-side second-derivative weight `ψ(ξ) = ξ(1+ξ)`.
#[inline]
pub fn psi(xi: f64) -> f64 {
    xi * (1.0 + xi)
}

/// Ray-side norm weight `w(ξ) = (1+ξ)⁻¹`, with `0 < w ≤ 1`.
#[inline]
pub fn ray_weight(xi: f64) -> f64 {
    1.0 / (1.0 + xi)
}

/// Largest unit point `σ` accepts before `1/(1-x)` overflows badly.
pub const SIGMA_MAX_ARG: f64 = 1.0 - 1e-15;

/// Change of variables `σ(x) = x/(1-x)` from the unit interval to the ray.
///
/// Errors for `x > 1 - 1e-15`, where the image is no longer representable
/// with any relative accuracy.
pub fn sigma(x: UnitPoint) -> Result<RayPoint> {
    let v = x.get();
    if v > SIGMA_MAX_ARG {
        return Err(Error::OutOfDomain {
            domain: Domain::Unit,
            value: v,
        });
    }
    RayPoint::new(v / (1.0 - v))
}

/// Inverse change of variables `σ⁻¹(ξ) = ξ/(1+ξ)`.
pub fn sigma_inv(xi: RayPoint) -> UnitPoint {
    let v = xi.get();
    if v.is_infinite() {
        // Closure of the map; callers never produce this from finite input.
        return UnitPoint(1.0 - f64::EPSILON);
    }
    UnitPoint(v / (1.0 + v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sigma_basics() {
        assert_eq!(sigma(UnitPoint::new(0.0).unwrap()).unwrap().get(), 0.0);
        assert_eq!(sigma(UnitPoint::new(0.5).unwrap()).unwrap().get(), 1.0);
        assert_relative_eq!(sigma_inv(RayPoint::new(3.0).unwrap()).get(), 0.75);
    }

    #[test]
    fn sigma_round_trip() {
        for &x in &[0.0, 1e-12, 0.25, 0.5, 0.9, 0.999, 1.0 - 2f64.powi(-10)] {
            let xi = sigma(UnitPoint::new(x).unwrap()).unwrap();
            let back = sigma_inv(xi).get();
            assert_relative_eq!(back, x, max_relative = 1e-15, epsilon = 1e-300);
        }
    }

    #[test]
    fn sigma_monotone() {
        let mut prev = -1.0;
        for j in 0..100 {
            let x = j as f64 / 101.0;
            let v = sigma(UnitPoint::new(x).unwrap()).unwrap().get();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sigma_overflow_guard() {
        assert!(sigma(UnitPoint::new(1.0 - 1e-16).unwrap()).is_err());
    }

    #[test]
    fn domain_checks() {
        assert!(UnitPoint::new(1.0).is_err());
        assert!(UnitPoint::new(-0.1).is_err());
        assert!(UnitPoint::new(f64::NAN).is_err());
        assert!(RayPoint::new(-1e-9).is_err());
        assert!(RayPoint::new(1e9).is_ok());
    }
}
